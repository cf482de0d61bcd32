#pragma once

// Constant reports: ordered named tower values with their equation label,
// the entries they were computed from, and an error note.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hfd/errors.hpp"
#include "hfd/lognum.hpp"
#include "json.hpp"

namespace hfd {

using json = nlohmann::json;

/// Every label an entry may carry. "input" marks user-supplied values.
inline const std::vector<std::string>& equation_labels() {
    static const std::vector<std::string> labels = {
        "input",
        "Eq.(sigma)",
        "Eq.(Lem.Moser.constant)",
        "Eq.(Lem.Log.Est.Ineq.a)",
        "Eq.(c_0)",
        "Eq.(h)",
        "Eq.(proof.Harnack.5)",
        "Eq.(proof.Harnack.10)",
        "Eq.(h-bar)",
        "Eq.(nu)",
        "Eq.(C3.constant)",
        "Eq.(kappa)",
        "Eq.(goth.C)",
        "Eq.(calligrafic.C)",
        "Eq.(kd12)",
        "Eq.(C2)",
        "Eq.(C_3)",
        "Eq.(AD)",
        "Eq.(kappaExpr-kappastarExpr)",
        "Eq.(SUPPL-underlineM)",
        "Eq.(SUPPL-epsilon.md.def)",
        "Eq.(SUPPL-GHP-1)",
        "Eq.(SUPPL-R)",
        "Eq.(SUPPL-Rbis)",
        "Eq.(SUPPL-Rter)",
        "Eq.(SUPPL-RE)",
        "Eq.(SUPPL-t1bis)",
        "Eq.(SUPPL-Tter)",
        "Eq.(SUPPL-toverline)",
        "Eq.(SUPPL-GHP-1-time)",
        "Eq.(lambdas-s)",
        "Eq.(SUPPL-theta)",
        "Eq.(SUPPL-nu)",
        "Eq.(SUPPL-gamma-norm-barenblatt)",
        "Eq.(SUPPL-interpolation.inequality.cpt6)",
        "Eq.(SUPPL-constant-c-control-radius.suppl.1)",
        "Eq.(SUPPL-taustarabstract)",
        "Eq.(t.star.simplified)",
        "Table(table.k.bar)",
        "Barenblatt-mass",
    };
    return labels;
}

inline bool is_known_label(const std::string& label) {
    const auto& l = equation_labels();
    return std::find(l.begin(), l.end(), label) != l.end();
}

struct ReportEntry {
    std::string name;
    std::string equation_label;
    TowerScalar value;
    std::vector<std::string> provenance;
    std::string error_note;
    bool configured = false;  ///< value supplied from outside, not derived here
};

inline json tower_to_json(const TowerScalar& x) { return json{{"sign", x.sign()}, {"level", x.level()}, {"mag", x.mag()}}; }

inline TowerScalar tower_from_json(const json& j) {
    return TowerScalar::normalize(j.at("sign").get<int>(), j.at("level").get<int>(), j.at("mag").get<double>());
}

class ConstantReport {
public:
    /// Inputs are (key, value) pairs rendered into the "inputs" object.
    json inputs = json::object();

    ReportEntry& add(std::string name, std::string label, const TowerScalar& value,
                     std::vector<std::string> provenance = {}, std::string error_note = "",
                     bool configured = false) {
        if (has(name)) throw ConfigError("duplicate report entry " + name);
        if (!is_known_label(label)) throw ConfigError("unknown equation label " + label);
        for (const auto& p : provenance)
            if (!has(p) && !inputs.contains(p)) throw ConfigError("entry " + name + " depends on unknown " + p);
        entries_.push_back({std::move(name), std::move(label), value, std::move(provenance), std::move(error_note), configured});
        return entries_.back();
    }

    bool has(const std::string& name) const {
        return std::any_of(entries_.begin(), entries_.end(), [&](const ReportEntry& e) { return e.name == name; });
    }
    const ReportEntry& get(const std::string& name) const {
        for (const auto& e : entries_)
            if (e.name == name) return e;
        throw ConfigError("no report entry " + name);
    }
    const std::vector<ReportEntry>& entries() const { return entries_; }

    json to_json() const {
        json out;
        out["inputs"] = inputs;
        out["entries"] = json::array();
        for (const auto& e : entries_) {
            out["entries"].push_back(json{{"name", e.name},
                                          {"equation_label", e.equation_label},
                                          {"value", tower_to_json(e.value)},
                                          {"provenance", e.provenance},
                                          {"error_note", e.error_note},
                                          {"configured", e.configured}});
        }
        return out;
    }

    /// name,equation_label,sign,level,mag,log_abs,configured
    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "name,equation_label,sign,level,mag,log_abs,configured\n";
        for (const auto& e : entries_) {
            os << e.name << ',' << e.equation_label << ',' << e.value.sign() << ',' << e.value.level() << ','
               << e.value.mag() << ',';
            if (e.value.is_zero())
                os << "-inf";
            else
                os << e.value.log_abs();
            os << ',' << (e.configured ? 1 : 0) << '\n';
        }
        return os.str();
    }

private:
    std::vector<ReportEntry> entries_;
};

/// Structural validation of a serialized report: required fields, known
/// labels, canonical tower values, unique names, provenance pointing backwards.
/// Returns the list of problems (empty when valid).
inline std::vector<std::string> validate_report_json(const json& j) {
    std::vector<std::string> errs;
    if (!j.is_object()) return {"report is not an object"};
    if (!j.contains("inputs") || !j["inputs"].is_object()) errs.push_back("missing inputs object");
    if (!j.contains("entries") || !j["entries"].is_array()) {
        errs.push_back("missing entries array");
        return errs;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j["entries"].size(); ++i) {
        const json& e = j["entries"][i];
        const std::string where = "entries[" + std::to_string(i) + "]";
        for (const char* k : {"name", "equation_label", "value", "provenance", "error_note", "configured"})
            if (!e.contains(k)) errs.push_back(where + " lacks " + k);
        if (!errs.empty()) continue;
        const std::string name = e["name"].get<std::string>();
        if (seen.count(name)) errs.push_back(where + " duplicates " + name);
        if (!is_known_label(e["equation_label"].get<std::string>()))
            errs.push_back(where + " has unknown label " + e["equation_label"].get<std::string>());
        try {
            const TowerScalar v = tower_from_json(e["value"]);
            if (!(v.sign() == e["value"]["sign"].get<int>() && v.level() == e["value"]["level"].get<int>() &&
                  v.mag() == e["value"]["mag"].get<double>()))
                errs.push_back(where + " value is not canonical");
        } catch (const std::exception& ex) {
            errs.push_back(where + " bad value: " + ex.what());
        }
        for (const auto& p : e["provenance"]) {
            const std::string ps = p.get<std::string>();
            if (!seen.count(ps) && !(j.contains("inputs") && j["inputs"].contains(ps)))
                errs.push_back(where + " provenance " + ps + " does not precede it");
        }
        seen.insert(name);
    }
    return errs;
}

}  // namespace hfd
