// Command-line front end: constant reports, the threshold pipeline, the
// sigma series, the disk shooting problem, simulations and verification
// suites. Every output embeds the argv that produced it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfd/core_params.hpp"
#include "hfd/fde_sim.hpp"
#include "hfd/gn_disk.hpp"
#include "hfd/harnack.hpp"
#include "hfd/report.hpp"
#include "hfd/suites.hpp"
#include "hfd/threshold.hpp"

namespace {

using hfd::json;

constexpr int kOk = 0, kVerificationFailed = 1, kUsage = 2;

struct Output {
    std::string format = "json";
    std::string path;
};

json invocation_record(int argc, char** argv) {
    json args = json::array();
    for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
    return {{"program", "hfd"}, {"subcommand", argc > 1 ? argv[1] : ""}, {"argv", args}};
}

void emit(const Output& out, const std::string& text) {
    if (out.path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(out.path);
    if (!f) throw hfd::ConfigError("cannot write " + out.path);
    f << text;
}

/// JSON: the payload with an "invocation" member. CSV: a '#' comment line
/// carrying the invocation, then the table.
std::string render(const Output& out, const json& inv, json payload, const std::string& csv) {
    if (out.format == "csv") return "# invocation: " + inv.dump() + "\n" + csv;
    payload["invocation"] = inv;
    return payload.dump(2) + "\n";
}

std::string verdict_csv(const json& items) {
    std::ostringstream os;
    os.precision(17);
    os << "name,case,lhs,rhs,slack,error,pass\n";
    for (const auto& it : items) {
        auto field = [&](const char* k) { return it.contains(k) ? (it[k].is_string() ? it[k].get<std::string>() : it[k].dump()) : std::string(); };
        os << field("name") << ',' << field("case") << ',' << field("lhs") << ',' << field("rhs") << ',' << field("slack") << ','
           << field("error") << ',' << (it.value("pass", false) ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit constants and numerical checks for fast diffusion Harnack estimates"};
    app.require_subcommand(1);
    Output out;
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", out.path, "write to this file instead of stdout");
    };

    int d = 0;
    double m = 0.0;
    auto* constants = app.add_subcommand("constants", "report every Harnack and local-bound constant for (d, m)");
    constants->add_option("--d", d, "dimension")->required();
    constants->add_option("--m", m, "exponent")->required();
    add_output(constants);

    double eps = 0.0, A = 0.0, G = 0.0;
    std::optional<double> M_over;
    hfd::CompanionConstants cc;
    auto* tstar = app.add_subcommand("tstar", "threshold time t* and every intermediate constant");
    tstar->add_option("--d", d, "dimension")->required();
    tstar->add_option("--m", m, "exponent")->required();
    tstar->add_option("--eps", eps, "relative error target")->required();
    tstar->add_option("--A", A, "tail constant A >= 0")->required();
    tstar->add_option("--G", G, "free-energy bound G >= 0")->required();
    tstar->add_option("--M-over", M_over, "upper mass constant (configured)");
    tstar->add_option("--C-dnu1", cc.C_dnu1, "interpolation constant (configured, default 1)");
    tstar->add_option("--C-over", cc.C_over, "upper envelope constant (configured, default 1)");
    tstar->add_option("--C-under", cc.C_under, "lower envelope constant (configured, default 1)");
    add_output(tstar);

    double tol = 1e-12;
    auto* sigma = app.add_subcommand("sigma", "the series sigma(d) with its tail bound");
    sigma->add_option("--d", d, "dimension")->required();
    sigma->add_option("--tol", tol, "relative tail tolerance");
    add_output(sigma);

    std::vector<double> sweep, bracket{5.0, 10.0};
    double gn_tol = 1e-10;
    std::string profile_csv;
    auto* gn = app.add_subcommand("gn-disk", "shooting for the optimal constant on the disk");
    gn->add_option("--sweep", sweep, "a_lo a_hi n: emit the s(a) table instead")->expected(3);
    gn->add_option("--bracket", bracket, "a_lo a_hi for the root search")->expected(2);
    gn->add_option("--tol", gn_tol, "root tolerance on |s(a)|");
    gn->add_option("--profile-csv", profile_csv, "also write the optimal profile as r,value CSV");
    add_output(gn);

    std::string config;
    std::string snapshot_csv;
    auto* simulate = app.add_subcommand("simulate", "evolve a scenario file");
    simulate->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--snapshot-csv", snapshot_csv, "write the final snapshot as r,value CSV");
    add_output(simulate);

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember(hfd::suite_names()));
    verify->add_option("--config", config, "suite JSON")->required()->check(CLI::ExistingFile);
    add_output(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const json inv = invocation_record(argc, argv);
    try {
        if (*constants) {
            const hfd::ParamSet p = hfd::derive_params(d, m, hfd::Usage::FdeBounds);
            const hfd::ConstantReport rep = hfd::constants_report(p);
            emit(out, render(out, inv, rep.to_json(), rep.to_csv()));
        } else if (*tstar) {
            cc.M_over = M_over;
            hfd::ThresholdInputs in;
            in.params = hfd::derive_params(d, m, hfd::Usage::Threshold);
            in.eps = eps;
            in.A = A;
            in.G = G;
            in.companion = cc;
            const hfd::ConstantReport rep = hfd::threshold_report(hfd::run_threshold(in));
            emit(out, render(out, inv, rep.to_json(), rep.to_csv()));
        } else if (*sigma) {
            const hfd::SeriesSum s = hfd::sigma_series(d, tol);
            json j = {{"d", d}, {"tol", tol}, {"value", s.value}, {"log_value", s.log_value}, {"tail_bound", s.tail_bound}, {"terms", s.terms}};
            std::ostringstream csv;
            csv.precision(17);
            csv << "d,tol,value,log_value,tail_bound,terms\n" << d << ',' << tol << ',' << s.value << ',' << s.log_value << ','
                << s.tail_bound << ',' << s.terms << '\n';
            emit(out, render(out, inv, j, csv.str()));
        } else if (*gn) {
            if (!sweep.empty()) {
                if (sweep[2] < 2 || sweep[2] != static_cast<int>(sweep[2])) throw hfd::ConfigError("--sweep n must be an integer >= 2");
                const std::string csv = hfd::sweep_csv(sweep[0], sweep[1], static_cast<int>(sweep[2]));
                json rows = json::array();
                std::istringstream is(csv);
                std::string line;
                std::getline(is, line);
                while (std::getline(is, line)) {
                    double a, s;
                    int sc;
                    if (std::sscanf(line.c_str(), "%lf,%lf,%d", &a, &s, &sc) == 3) rows.push_back({{"a", a}, {"s", s}, {"sign_changes", sc}});
                }
                emit(out, render(out, inv, json{{"sweep", rows}}, csv));
            } else {
                const hfd::AStarResult r = hfd::find_a_star(bracket[0], bracket[1], gn_tol);
                const hfd::OptimalConstant oc = hfd::optimal_constant(r.shot.profile, r.shot.derivative);
                json cands = json::array();
                for (const auto& c : r.candidates)
                    cands.push_back({{"a", c.a}, {"s", c.s_of_a}, {"sign_changes", c.sign_changes}, {"admissible", c.admissible}});
                json j = {{"a_star", r.a_star},          {"s_of_a_star", r.shot.s_of_a},  {"sign_changes", r.shot.sign_changes},
                          {"C", oc.C},                   {"quartic_integral", oc.quartic}, {"energy_integral", oc.energy},
                          {"identity_gap", oc.identity_gap}, {"candidates", cands}};
                if (!profile_csv.empty()) {
                    std::ofstream f(profile_csv);
                    if (!f) throw hfd::ConfigError("cannot write " + profile_csv);
                    f << r.shot.profile.to_csv();
                }
                std::ostringstream csv;
                csv.precision(17);
                csv << "a_star,s_of_a_star,sign_changes,C,identity_gap\n"
                    << r.a_star << ',' << r.shot.s_of_a << ',' << r.shot.sign_changes << ',' << oc.C << ',' << oc.identity_gap << '\n';
                emit(out, render(out, inv, j, csv.str()));
            }
        } else if (*simulate) {
            const std::string base = std::filesystem::path(config).parent_path().string();
            const hfd::Scenario sc = hfd::scenario_from_json(hfd::read_json_file(config), base.empty() ? "." : base);
            const hfd::Solution sol = hfd::evolve(sc.config, sc.u0);
            const hfd::RadialField last = sol.field(sol.snapshots.back().t);
            if (!snapshot_csv.empty()) {
                std::ofstream f(snapshot_csv);
                if (!f) throw hfd::ConfigError("cannot write " + snapshot_csv);
                f << last.to_csv();
            }
            json j = hfd::solution_to_json(sol);
            j["scenario"] = sc.source;
            emit(out, render(out, inv, j, last.to_csv()));
        } else if (*verify) {
            const std::string base = std::filesystem::path(config).parent_path().string();
            const hfd::SuiteResult r = hfd::run_suite(hfd::read_json_file(config), suite, base.empty() ? "." : base);
            emit(out, render(out, inv, r.to_json(), verdict_csv(r.items)));
            if (!r.pass()) {
                for (const auto& it : r.items)
                    if (!it.value("pass", false)) std::cerr << "FAILED " << it.dump() << '\n';
                return kVerificationFailed;
            }
        }
    } catch (const hfd::RangeError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const hfd::DimensionError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const hfd::DomainError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const hfd::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const hfd::Error& e) {
        std::cerr << e.what() << '\n';
        return kVerificationFailed;
    }
    return kOk;
}
