"""Exit codes, outputs and determinism of the pfield command line tool.

usage: cli_test.py /path/to/pfield
"""

import csv
import json
import os
import subprocess
import sys
import tempfile

TOOL = os.path.abspath(sys.argv[1])
failures = []


def run(args, cwd, env=None):
    e = dict(os.environ)
    e.pop("PARTITION_FIELDS_THREADS", None)
    if env:
        e.update(env)
    return subprocess.run([TOOL, *args], cwd=cwd, capture_output=True, text=True, env=e)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f": {detail}" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def write(d, name, obj):
    path = os.path.join(d, name)
    with open(path, "w") as f:
        f.write(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def read(path):
    with open(path, "rb") as f:
        return f.read()


def run_in(d, sub, args, env=None):
    """Same arguments in a fresh directory, so output prefixes match."""
    wd = os.path.join(d, sub)
    os.makedirs(wd, exist_ok=True)
    return run(args, wd, env), wd


with tempfile.TemporaryDirectory() as d:
    karlin = {"command": "simulate", "model": {"kind": "Karlin1D", "alphas": [0.6], "n": [10]}, "seed": "1"}
    cfg = write(d, "k.json", karlin)

    r = run(["simulate", "--config", cfg, "--out", "a"], d)
    check("simulate exit 0", r.returncode == 0, r.stderr)
    rows = list(csv.reader(open(os.path.join(d, "a.csv"))))
    check("simulate header", rows[0] == ["t1", "t2", "raw", "normalized"], rows[0])
    check("one row per corner", len(rows) == 5, len(rows))
    meta = json.load(open(os.path.join(d, "a.json")))
    check("metadata has tool version", meta["tool"].startswith("partition_fields "))
    check("echoed config has no parallelism", "parallelism" not in meta["config"])

    _, again = run_in(d, "again", ["simulate", "--config", cfg, "--out", "a"])
    check("simulate byte-identical rerun", read(os.path.join(d, "a.csv")) == read(os.path.join(again, "a.csv"))
          and read(os.path.join(d, "a.json")) == read(os.path.join(again, "a.json")))

    run(["simulate", "--config", cfg, "--out", "c", "--seed", "2"], d)
    check("--seed overrides", read(os.path.join(d, "a.csv")) != read(os.path.join(d, "c.csv")))

    # echoed config parses back to an equivalent run
    echo = write(d, "echo.json", meta["config"])
    r = run(["simulate", "--config", echo, "--out", "e"], d)
    check("echoed config reruns", r.returncode == 0, r.stderr)
    check("echoed config reproduces output", read(os.path.join(d, "a.csv")) == read(os.path.join(d, "e.csv")))

    bad = write(d, "bad.json", {"command": "simulate", "model": {"kind": "Karlin1D", "n": [10]}})
    r = run(["simulate", "--config", bad], d)
    check("missing alpha exit 2", r.returncode == 2, r.returncode)
    check("field path in message", "model.alphas" in r.stderr, r.stderr)

    unknown = write(d, "u.json", {**karlin, "colour": "red"})
    check("unknown field exit 2", run(["simulate", "--config", unknown], d).returncode == 2)
    check("unreadable config exit 2", run(["simulate", "--config", "nope.json"], d).returncode == 2)
    check("missing --config exit 2", run(["simulate"], d).returncode == 2)
    check("bad --seed exit 2", run(["simulate", "--config", cfg, "--seed", "xyz"], d).returncode == 2)
    check("command mismatch exit 2", run(["verify", "--config", cfg], d).returncode == 2)
    check("bad env threads exit 2",
          run(["simulate", "--config", cfg, "--out", "t"], d, {"PARTITION_FIELDS_THREADS": "zero"}).returncode == 2)

    cov = write(d, "cov.json", {"command": "verify", "suite": "covariance", "R": 2,
                                "model": {"kind": "Karlin1D", "alphas": [0.6], "n": [10]}})
    check("covariance R=2 refused with exit 2", run(["verify", "--config", cov], d).returncode == 2)

    var = write(d, "var.json", {"command": "verify", "suite": "variance", "R": 2000, "seed": "9",
                                "model": {"kind": "Karlin1D", "alphas": [0.6], "n": [100]}})
    r = run(["verify", "--config", var, "--out", "v1", "--parallelism", "1"], d)
    check("verify variance exit 0", r.returncode == 0, r.stdout + r.stderr)
    rep = json.load(open(os.path.join(d, "v1.json")))
    check("verify report names suite", rep["suite"] == "variance")
    check("checks csv header", read(os.path.join(d, "v1.csv")).startswith(b"test,analytic,estimate,se,pass"))
    _, p8 = run_in(d, "p8", ["verify", "--config", var, "--out", "v1", "--parallelism", "8"])
    check("verify byte-identical across parallelism", read(os.path.join(d, "v1.json")) == read(os.path.join(p8, "v1.json")))
    _, penv = run_in(d, "penv", ["verify", "--config", var, "--out", "v1"], {"PARTITION_FIELDS_THREADS": "3"})
    check("env thread fallback gives same report", read(os.path.join(d, "v1.json")) == read(os.path.join(penv, "v1.json")))

    # a check that cannot pass: b_n^2 against C_alpha n^(2a+1) at alpha 0.25
    ren = write(d, "ren.json", {"command": "verify", "suite": "renewal-asymptotics",
                                "renewal": {"alpha": 0.25, "kmax": 16000, "n": 1000}})
    r = run(["verify", "--config", ren, "--out", "ra"], d)
    check("failing check exit 1", r.returncode == 1, r.stdout + r.stderr)

    rn = write(d, "rn.json", {"command": "renewal", "renewal": {"alpha": 0.25, "kmax": 10}})
    r = run(["renewal", "--config", rn, "--out", "q"], d)
    check("renewal exit 0", r.returncode == 0, r.stderr)
    q = list(csv.reader(open(os.path.join(d, "q_q.csv"))))
    check("renewal 11 data rows", len(q) == 12, len(q))
    check("q_0 = 1", float(q[1][1]) == 1.0)
    check("prints C_alpha", "C_alpha 0.3386" in r.stdout, r.stdout)
    check("prints sum_q_sq", "sum_q_sq" in r.stdout)
    rn0 = write(d, "rn0.json", {"command": "renewal", "renewal": {"alpha": 0.25, "kmax": 0}})
    check("kmax=0 exit 2", run(["renewal", "--config", rn0], d).returncode == 2)
    rnb = write(d, "rnb.json", {"command": "renewal", "renewal": {"alpha": 0.25, "kmax": 160, "n": 10}})
    run(["renewal", "--config", rnb, "--out", "w"], d)
    b = list(csv.reader(open(os.path.join(d, "w_b.csv"))))
    check("weights csv", b[0] == ["j", "b_nj"] and len(b) == 161, len(b))

    fb = write(d, "fb.json", {"command": "sample-fbs", "hurst": {"H1": 0.3, "H2": 0.7}, "R": 2})
    r = run(["sample-fbs", "--config", fb, "--out", "f"], d)
    check("sample-fbs exit 0", r.returncode == 0, r.stderr)
    f = list(csv.reader(open(os.path.join(d, "f.csv"))))
    check("sample-fbs rows", len(f) == 1 + 2 * 16, len(f))

    js = write(d, "js.json", {**karlin, "R": 3, "format": "json"})
    r = run(["simulate", "--config", js, "--out", "j"], d)
    m = json.load(open(os.path.join(d, "j.json")))
    check("json format embeds samples", r.returncode == 0 and len(m["replicates"]) == 3
          and "sample" in m["replicates"][0])

    hs = write(d, "hs.json", {"command": "simulate", "model": {"kind": "HS1D", "alphas": [0.25], "n": [1 << 40]}})
    r = run(["simulate", "--config", hs, "--out", "h"], d)
    check("runtime failure exit 3", r.returncode == 3, (r.returncode, r.stderr))

check("version flag", run(["--version"], ".").stdout.startswith("partition_fields"))

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
