"""End-to-end checks of the ncvar command line: exit codes, report fields,
CSV layout and byte-identical reruns."""

import csv
import io
import json
import os
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
failures = []


def run(*args):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  {detail}" if detail and not cond else ""))
    if not cond:
        failures.append(name)


tmp = tempfile.mkdtemp()


def spec(name, obj):
    path = os.path.join(tmp, name + ".json")
    with open(path, "w") as f:
        json.dump(obj, f)
    return path


fock1 = spec("fock1", {"modes": 1, "cutoff": 24, "state": {"kind": "fock", "n": 1}})
vac = spec("vac", {"modes": 1, "cutoff": 6, "state": {"kind": "vacuum"}})
dcat = spec("dcat", {"modes": 1, "cutoff": 40, "state": {"kind": "decohered_cat", "alpha": 1.0, "gamma": 0.5}})
coh = spec("coh", {"modes": 1, "cutoff": 30, "state": {"kind": "coherent", "alpha": [0.5, 0.2]}})
sqt = spec("sqt", {"modes": 1, "cutoff": 60, "state": {"kind": "squeezed_thermal", "r": 0.8, "nbar": 0.5}})
bad = spec("bad", {"modes": 1, "cutoff": 10, "state": {"kind": "fock", "n": 1, "extra": 0}})
tight = spec("tight", {"modes": 1, "cutoff": 6, "state": {"kind": "fock", "n": 5}})

code, out, _ = run("measure", "--spec", fock1)
r = json.loads(out)
check("measure fock: exit 0", code == 0)
check("measure fock: M = 2", abs(r["M"] - 2.0) < 1e-6, r.get("M"))
for key in ("i_opt", "i_mean", "Q", "nbar", "q_bound", "optimal_direction", "truncation", "spec_hash", "seed", "tool"):
    check(f"measure report has {key}", key in r)

code, out, _ = run("measure", "--spec", vac)
r = json.loads(out)
check("measure vacuum: all zero", code == 0 and r["M"] == 0 and abs(r["Q"]["value"]) < 1e-12)

code, out, _ = run("measure", "--spec", dcat)
r = json.loads(out)
check("measure decohered cat: M", code == 0 and abs(r["M"] - 1.1147072071934048) < 1e-5, r.get("M"))
check("measure decohered cat: Q labelled upper bound", r["Q"]["label"].startswith("upper bound"))

code, _, err = run("measure", "--spec", bad)
check("unknown spec key: exit 2", code == 2, err)
code, _, _ = run("measure", "--spec", os.path.join(tmp, "missing.json"))
check("missing spec file: exit 2", code == 2)
code, _, _ = run("measure", "--spec", fock1, "--cutoff", "1")
check("inadmissible cutoff: exit 2", code == 2)
code, _, _ = run("measure", "--spec", tight)
check("unconverged truncation: exit 3", code == 3)

code, out1, _ = run("measure", "--spec", dcat, "--seed", "7")
code2, out2, _ = run("measure", "--spec", dcat, "--seed", "7")
check("byte-identical reruns", code == code2 == 0 and out1 == out2)

code, out, _ = run("gaussian", "--spec", sqt)
r = json.loads(out)
check("gaussian: M", code == 0 and abs(r["M"] - 1.4765162121975575) < 1e-9, r.get("M"))
check("gaussian: Fock cross-check", r["fock_cross_check"]["abs_diff_to_gaussian"] < 1e-4)
check("gaussian: unconverged cross-check is flagged", r["fock_cross_check"]["converged"] is False)
code, _, _ = run("gaussian", "--spec", fock1)
check("gaussian on non-Gaussian spec: exit 2", code == 2)

code, out, _ = run("phase", "--spec", fock1, "--budget", "auto", "--restarts", "2")
r = json.loads(out)
check("phase auto budget on |1>: positive", code == 0 and r["result"]["m_phase_alpha"] > 0.05, out[-300:])
code, out, _ = run("phase", "--spec", coh, "--budget", "0", "--restarts", "2")
r = json.loads(out)
check("phase budget 0 on coherent: 0", code == 0 and abs(r["result"]["m_phase_alpha"]) < 1e-6)
code, _, _ = run("phase", "--spec", coh, "--budget", "auto")
check("phase auto budget on classical input: exit 2", code == 2)
code, _, _ = run("phase", "--spec", coh, "--budget", "-1")
check("negative budget: exit 2", code == 2)

code, out, _ = run("crb")
r = json.loads(out)
check("crb default: ratio in band", code == 0 and 0.95 <= r["ratio"] <= 1.08, r.get("ratio"))
check("crb embeds seed", r["seed"] == 1)

csv_path = os.path.join(tmp, "fig2b.csv")
code, _, _ = run("sweep", "--figure", "2b", "--csv", csv_path)
with open(csv_path, newline="") as f:
    text = f.read()
rows = list(csv.DictReader(io.StringIO(text)))
check("sweep 2b: exit 0", code == 0)
check("sweep 2b: CRLF line endings", text.count("\r\n") == len(rows) + 1)
check("sweep 2b: 24 rows", len(rows) == 24, len(rows))
check("sweep 2b: closed-form deltas < 1e-6", all(float(x["abs_delta"]) < 1e-6 for x in rows))

code, out, _ = run("sweep", "--figure", "2a", "--grid", "0.5,1.0", "--r-grid", "0.3")
rows = list(csv.DictReader(io.StringIO(out)))
fock3 = [x for x in rows if x["family"] == "fock" and float(x["parameter"]) == 3]
check("sweep 2a: Fock n=3 Q = 6", len(fock3) == 1 and abs(float(fock3[0]["value"]) - 6) < 1e-9)
check("sweep 2a: Q <= bound", all(float(x["value"]) <= float(x["bound"]) + 1e-9 for x in rows))
code, _, _ = run("sweep", "--figure", "2a", "--grid", ",")
check("empty grid: exit 2", code == 2)
code, _, _ = run("sweep", "--figure", "2a", "--grid", "a,b")
check("non-numeric grid: exit 2", code == 2)

code, out, _ = run("sweep", "--figure", "custom", "--spec", coh, "--param", "alpha", "--grid", "0.2,0.4")
check("custom sweep", code == 0 and out.startswith("family,"))

code, out, _ = run("state", "--spec", fock1)
r = json.loads(out)
check("state report", code == 0 and r["pure"] and not r["truncation"]["insufficient"])

code, out, _ = run("verify", "--suite", "gaussian")
r = json.loads(out)
check("verify gaussian: pass", code == 0 and r["passed"])
code, out, _ = run("verify", "--suite", "qfi", "--inject-fault", "qfi-prefactor")
r = json.loads(out)
failed = [c for c in r["checks"] if not c["passed"]]
check("verify with injected fault: exit 1", code == 1)
check("verify failure carries delta", bool(failed) and all("delta" in c for c in failed))
code, _, _ = run("verify", "--suite", "nonexistent")
check("unknown suite: exit 2", code == 2)

code, out, _ = run("--version")
check("version", code == 0 and "0.1.0" in out)
code, _, _ = run("frobnicate")
check("unknown command: exit 2", code == 2)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
