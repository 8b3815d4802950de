"""End-to-end checks of the dpd command-line tool."""
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BINARY = sys.argv[1]
SCHEMA = json.loads(Path(sys.argv[2]).read_text())
failures = []


def run(*args, env=None):
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=env)


def check(name, ok, detail=""):
    print(("PASS " if ok else "FAIL ") + name + (f": {detail}" if detail and not ok else ""))
    if not ok:
        failures.append(name)


def report(*args):
    p = run(*args)
    check(f"exit 0: {' '.join(args)}", p.returncode == 0, p.stderr)
    r = json.loads(p.stdout)
    try:
        jsonschema.validate(r, SCHEMA)
        check(f"schema: {args[0]}", True)
    except jsonschema.ValidationError as e:
        check(f"schema: {args[0]}", False, e.message)
    return r


def rerun_matches(r):
    p = run(*r["invocation"][1:])
    again = json.loads(p.stdout)
    return p.returncode == 0 and again["result"] == r["result"] and again["seed"] == r["seed"]


r = report("test", "--model", "normal", "--data", "builtin:telephone", "--mu0", "0", "--beta", "0.15")
res = r["result"]
check("telephone beta 0.15 rejects", res["p_value"] < 0.05 and res["reject"])
check("report echoes inputs", r["inputs"]["beta"] == 0.15 and r["inputs"]["gamma"] == 0.15)
check("rerun reproduces test report", rerun_matches(r))

r = report("test", "--model", "normal", "--data", "builtin:telephone", "--mu0", "0", "--beta", "0", "--gamma", "0")
res = r["result"]
lrt = res["n"] * math.log(res["theta_tilde"]["sigma"] ** 2 / res["theta_hat"]["sigma"] ** 2)
check("LRT identity from report fields", abs(res["statistic"] - lrt) < 1e-8, f"{res['statistic']} vs {lrt}")

r = report("test", "--data", "builtin:darwin", "--mu0", "0", "--beta", "0.2", "--force-mc",
           "--mc-draws", "20000", "--seed", "random")
check("random seed is echoed as a number", r["invocation"][-1] == str(r["seed"]))
check("rerun reproduces random-seed report", rerun_matches(r))

r = report("test-onesided", "--data", "builtin:telephone", "--mu0", "0", "--beta", "0.15")
check("one-sided Z p-value near 0.0006", abs(r["result"]["p_value"] - 0.0006) < 0.0015)

r = report("estimate", "--model", "weibull", "--data", "builtin:darwin_cleaned", "--beta", "0.1", "--sigma0", "40")
check("restricted weibull fit pins sigma", r["result"]["restricted_fit"]["theta"]["sigma"] == 40)

r = report("power", "--theta", "0.3,1", "--mu0", "0", "--beta", "0.25", "--n", "50,200")
powers = [row["power"] for row in r["result"]["power"]]
check("power increases with n", powers[0] < powers[1])

r = report("samplesize", "--theta", "0.3,1", "--mu0", "0", "--beta", "0.25", "--target", "0.9")
check("sample size reaches target", r["result"]["power_at_n"] >= 0.9)

r = report("tune", "--data", "builtin:darwin", "--model", "normal")
check("darwin tuning near 0.5657", abs(r["result"]["beta_opt"] - 0.5657) <= 0.06)
p = run("tune", "--data", "builtin:darwin", "--format", "csv")
rows = p.stdout.strip().splitlines()
check("tune csv curve", rows[0] == "beta,mse,bias2,variance,ok,selected" and len(rows) == 102)

r = report("simulate", "--theta", "0,1", "--outlier", "-10,1", "--eps", "0.1", "--mu0", "0",
           "--n", "40", "--betas", "0,0.25", "--reps", "100", "--t-test")
check("simulate rows", len(r["result"]["rows"]) == 3)
check("rerun reproduces simulation", rerun_matches(r))
p = run("simulate", "--theta", "0,1", "--mu0", "0", "--n", "30", "--betas", "0", "--reps", "20", "--format", "csv")
check("simulate csv header", p.stdout.startswith("n,beta,gamma,test,rate,stderr,failures\n"))

report("datasets")
r = report("datasets", "--name", "darwin")
check("dataset values", r["result"]["n"] == 15 and sum(r["result"]["values"]) == 314)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "x.csv"
    path.write_text("id,diff\n1,3.5\n2,4.0\n3,-1.0\n4,2.2\n")
    r = report("estimate", "--data", str(path), "--column", "diff", "--beta", "0.1")
    check("csv column input", r["result"]["n"] == 4)
    out = Path(tmp) / "report.json"
    p = run("datasets", "--output", str(out))
    check("--output writes file", p.returncode == 0 and p.stdout == "" and json.loads(out.read_text())["command"] == "datasets")

# Numerical failures: exit 1 with a structured error report.
p = run("estimate", "--model", "weibull", "--data", "builtin:darwin")
check("domain error exits 1", p.returncode == 1)
err = json.loads(p.stdout)
jsonschema.validate(err, SCHEMA)
check("error report kind", err["error"]["kind"] == "DomainError")
p = run("test", "--data", "builtin:darwin", "--mu0", "0", "--beta", "0.2", "--force-mc",
        "--mc-draws", "100")
check("under-resolved Monte Carlo exits 1", p.returncode == 1 and json.loads(p.stdout)["error"]["kind"] == "MCUnderResolved")

# Usage errors: exit 2, nothing on stdout.
for args in (["test", "--data", "builtin:darwin"],
             ["test", "--data", "builtin:darwin", "--mu0", "0", "--bogus"],
             ["frobnicate"],
             ["test", "--model", "weibull", "--data", "builtin:darwin", "--mu0", "0"],
             ["power", "--theta", "1", "--mu0", "0"],
             ["test", "--data", "builtin:darwin", "--mu0", "0", "--seed", "-3"],
             ["tune", "--data", "builtin:darwin", "--format", "xml"]):
    p = run(*args)
    check(f"usage error exits 2: {' '.join(args)}", p.returncode == 2 and p.stdout == "", p.stdout)

p = run("datasets", env={"DPD_NUM_THREADS": "0", "PATH": "/usr/bin"})
check("bad thread count exits 2", p.returncode == 2)
p = run("datasets", env={"DPD_NUM_THREADS": "2", "PATH": "/usr/bin"})
check("thread count reported", json.loads(p.stdout)["threads"] == 2)
check("help exits 0", run("--help").returncode == 0)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
