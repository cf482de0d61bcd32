#!/usr/bin/env python3
"""End-to-end checks of the hfd command-line tool.

Every JSON output is validated against the published schema and re-run from
its embedded invocation record; the replay must be byte-identical. Exit codes
0, 1 and 2 are exercised.

usage: cli_check.py HFD_BINARY SCHEMA SCENARIO_DIR
"""

import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

HFD, SCHEMA_PATH, SCEN = sys.argv[1], sys.argv[2], sys.argv[3]
with open(SCHEMA_PATH) as f:
    SCHEMA = json.load(f)
jsonschema.Draft202012Validator.check_schema(SCHEMA)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

failures = []


def check(ok, what):
    print(("ok   " if ok else "FAIL ") + what)
    if not ok:
        failures.append(what)


def run(args):
    p = subprocess.run([HFD] + args, capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def run_json(args, label):
    code, out, err = run(args)
    check(code == 0, f"{label}: exit 0 (got {code}; {err.strip()[:200]})")
    if code != 0:
        return None
    doc = json.loads(out)
    errors = sorted(VALIDATOR.iter_errors(doc), key=lambda e: list(e.path))
    check(not errors, f"{label}: schema-valid" + (f" ({errors[0].message[:200]})" if errors else ""))
    replay_code, replay_out, _ = run(doc["invocation"]["argv"])
    check(replay_code == 0 and replay_out == out, f"{label}: replay from invocation record is byte-identical")
    return doc


def entry(doc, name):
    for e in doc["entries"]:
        if e["name"] == name:
            return e
    raise KeyError(name)


def brute_force_log_sigma(d, n=10000):
    logs = [j * math.log(0.75) + (2 * d + 4) * math.log((2 + j) * (1 + j)) for j in range(n)]
    mx = max(logs)
    return mx + math.log(math.fsum(math.exp(x - mx) for x in logs))


# constants: full report with symbolic labels and provenance
doc = run_json(["constants", "--d", "3", "--m", "0.8333333333333334"], "constants")
if doc:
    names = [e["name"] for e in doc["entries"]]
    check(len(names) == len(set(names)), "constants: entry names unique")
    check(entry(doc, "kappa_star")["value"]["level"] == 0, "constants: kappa_star on level 0")
    ks = entry(doc, "kappa_star")["value"]["mag"]
    check(abs(ks - 2**6.5 * 3**1.5) <= 1e-12 * ks, "constants: kappa_star = 2^6.5 3^1.5")

# tstar with A = G = 0: unit bracket, so t* = c*/eps^a
doc = run_json(["tstar", "--d", "3", "--m", "0.8333", "--eps", "1e-3", "--A", "0", "--G", "0"], "tstar")
if doc:
    check(entry(doc, "log_t_star_bracket")["value"]["sign"] == 0, "tstar: bracket is 1 when A = G = 0")
    configured = {e["name"] for e in doc["entries"] if e["configured"]}
    check({"C_dnu1", "C_over", "C_under"} <= configured, "tstar: companion constants flagged as configured")
    check(entry(doc, "t_star")["value"]["sign"] == 1, "tstar: t* positive")
doc2 = run_json(["tstar", "--d", "3", "--m", "0.8333", "--eps", "1e-3", "--A", "1", "--G", "2", "--C-over", "2.5"], "tstar with flags")
if doc2:
    c_over = entry(doc2, "C_over")
    check(c_over["configured"] and abs(c_over["value"]["mag"] - 2.5) < 1e-15, "tstar: --C-over value carried as configured")
    check(entry(doc2, "log_t_star_bracket")["value"]["sign"] == 1, "tstar: bracket exceeds 1 for A, G > 0")

# sigma against a brute-force partial sum
doc = run_json(["sigma", "--d", "1", "--tol", "1e-10"], "sigma")
if doc:
    oracle = brute_force_log_sigma(1)
    rel = abs(math.expm1(doc["log_value"] - oracle))
    check(rel <= 1e-10, f"sigma: matches brute-force oracle (rel {rel:.1e})")
    check(doc["value"] <= math.exp(oracle) * (1 + 1e-14) <= (doc["value"] + doc["tail_bound"]) * (1 + 2e-14),
          "sigma: tail bound brackets the oracle")

# gn-disk: root, constant, sweep
doc = run_json(["gn-disk"], "gn-disk")
if doc:
    check(abs(doc["a_star"] - 7.52449) <= 1e-3, f"gn-disk: a* = {doc['a_star']:.6f}")
    check(abs(doc["C"] - 0.0564922) <= 1e-4, f"gn-disk: C = {doc['C']:.7f}")
    check(doc["sign_changes"] == 1, "gn-disk: one sign change")
run_json(["gn-disk", "--sweep", "1", "8", "5"], "gn-disk sweep")

# simulate and verify
doc = run_json(["simulate", "--config", os.path.join(SCEN, "bump_d2.json")], "simulate")
if doc:
    masses = [s["mass"] for s in doc["snapshots"]]
    check(max(abs(m - masses[0]) for m in masses) <= 1e-6 * masses[0], "simulate: mass conserved")
doc = run_json(["verify", "--suite", "truncation", "--config", os.path.join(SCEN, "verify_suite.json")], "verify truncation")
if doc:
    check(doc["failed"] == 0 and doc["passed"] >= 1, "verify: truncation suite passes")

# CSV output carries the invocation as a comment and replays identically
code, out, _ = run(["sigma", "--d", "2", "--format", "csv"])
check(code == 0 and out.startswith("# invocation: "), "csv: invocation comment line")
if code == 0:
    inv = json.loads(out.splitlines()[0][len("# invocation: "):])
    code2, out2, _ = run(inv["argv"])
    check(code2 == 0 and out2 == out, "csv: replay is byte-identical")

# exit code 1: a verification with no passing instance, and a failed root search
with tempfile.TemporaryDirectory() as tmp:
    empty = os.path.join(tmp, "empty.json")
    with open(empty, "w") as f:
        json.dump({"cases": []}, f)
    code, _, _ = run(["verify", "--suite", "truncation", "--config", empty])
    check(code == 1, f"exit 1 when nothing was verified (got {code})")
code, _, err = run(["gn-disk", "--bracket", "0.5", "1.5"])
check(code == 1 and "sign changes" in err, f"exit 1 when only the trivial root exists (got {code})")

# exit code 2: usage errors name the offending flag
code, _, err = run(["constants", "--d", "3", "--m", "0.8", "--bogus", "1"])
check(code == 2 and "--bogus" in err, f"exit 2 on an unknown flag (got {code})")
code, _, err = run(["constants", "--m", "0.8"])
check(code == 2 and "--d" in err, f"exit 2 on a missing flag (got {code})")
code, _, _ = run(["constants", "--d", "3", "--m", "0.5"])
check(code == 2, f"exit 2 when m is outside the admitted range (got {code})")
code, _, _ = run(["sigma", "--d", "0"])
check(code == 2, f"exit 2 for d = 0 (got {code})")
code, _, _ = run(["simulate", "--config", "/nonexistent.json"])
check(code == 2, f"exit 2 for a missing config file (got {code})")
code, _, _ = run(["verify", "--suite", "nope", "--config", os.path.join(SCEN, "verify_suite.json")])
check(code == 2, f"exit 2 for an unknown suite (got {code})")

print(f"{len(failures)} failed")
sys.exit(1 if failures else 0)
