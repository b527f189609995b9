#!/usr/bin/env python3
"""End-to-end checks of the snailsim executable.

usage: cli_end_to_end.py <snailsim> <source dir> <scratch dir>
"""

import json
import os
import pathlib
import shutil
import subprocess
import sys

import jsonschema

SNAILSIM, SOURCE, SCRATCH = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
FAILURES = []


def run(*args, env=None, cwd=None):
    full_env = dict(os.environ)
    full_env.pop("SNAILSIM_OUT", None)
    full_env.update(env or {})
    return subprocess.run([SNAILSIM, *args], capture_output=True, text=True, env=full_env, cwd=cwd)


def check(name, condition, detail=""):
    print(("ok   " if condition else "FAIL ") + name + ("" if condition else ": " + detail))
    if not condition:
        FAILURES.append(name)


def load_schemas():
    schemas = {}
    for path in (SOURCE / "schemas").glob("*.v1.schema.json"):
        schemas[path.name.split(".")[0]] = json.loads(path.read_text())
    schemas["manifest"]["properties"]["parameters"] = schemas["config"]
    return schemas


SCHEMAS = load_schemas()


def validate_dir(directory):
    count = 0
    for path in sorted(directory.glob("*.json")):
        doc = json.loads(path.read_text())
        name = doc.get("schema", "").removeprefix("snailsim.")
        if name not in SCHEMAS:
            check(f"schema known for {path.name}", False, doc.get("schema", "<none>"))
            continue
        try:
            jsonschema.validate(doc, SCHEMAS[name])
            count += 1
        except jsonschema.ValidationError as e:
            check(f"{path} matches {name} schema", False, e.message)
    return count


def fresh(name):
    d = SCRATCH / name
    shutil.rmtree(d, ignore_errors=True)
    return d


def test_config_errors():
    r = run("--set", "circuit.kk=1", "--out", str(fresh("bad")), "effective")
    check("unknown --set key exits 2", r.returncode == 2, f"exit {r.returncode}")
    check("unknown key is named", "circuit.kk" in r.stderr, r.stderr)

    cfg = fresh("cfg")
    cfg.mkdir(parents=True)
    (cfg / "bad.json").write_text(json.dumps({"sweep": {"pionts": 3}}))
    r = run("--config", str(cfg / "bad.json"), "--out", str(fresh("bad")), "sweep-flux")
    check("unknown config-file key exits 2", r.returncode == 2 and "sweep.pionts" in r.stderr, r.stderr)

    r = run("--set", "sweep.points=\"many\"", "--out", str(fresh("bad")), "sweep-flux")
    check("type mismatch exits 2", r.returncode == 2 and "sweep.points" in r.stderr, r.stderr)

    r = run("--check", "--out", str(fresh("bad")), "effective")
    check("--check outside reproduce exits 2", r.returncode == 2, f"exit {r.returncode}")

    r = run("--out", str(fresh("bad")), "gate", "--target", "custom(1.0)")
    check("malformed gate target exits 2", r.returncode == 2, f"exit {r.returncode}")

    r = run("--set", "zznull.amplitude_max_ghz=0.1", "--out", str(fresh("bad")), "zznull")
    check("missing ZZ crossing exits 3", r.returncode == 3, f"exit {r.returncode} {r.stderr}")


def test_determinism_and_schemas():
    for sub in ["spectrum", "sweep-flux", "effective", "zznull"]:
        a, b = fresh(sub + "_a"), fresh(sub + "_b")
        ra = run("--out", str(a), sub)
        rb = run("--out", str(b), "--threads", "2", sub)
        check(f"{sub} exits 0", ra.returncode == 0 and rb.returncode == 0, ra.stderr + rb.stderr)
        if ra.returncode or rb.returncode:
            continue
        names = sorted(p.name for p in a.iterdir())
        check(f"{sub} writes the same files", names == sorted(p.name for p in b.iterdir()), str(names))
        for n in names:
            if n == "manifest.json":
                ma, mb = json.loads((a / n).read_text()), json.loads((b / n).read_text())
                for m in (ma, mb):
                    m.pop("wall_time_s")
                    m.pop("threads")
                check(f"{sub} manifests agree", ma == mb)
                check(f"{sub} manifest lists outputs", sorted(ma["outputs"]) == sorted(x for x in names if x != n),
                      str(ma["outputs"]))
            else:
                check(f"{sub}/{n} is byte-identical", (a / n).read_bytes() == (b / n).read_bytes())
        check(f"{sub} JSON validates", validate_dir(a) >= 2)


def test_output_env():
    root = fresh("env")
    r = run("effective", env={"SNAILSIM_OUT": str(root)})
    check("SNAILSIM_OUT sets the default output root", r.returncode == 0 and (root / "effective" / "effective.json").exists(),
          r.stderr)
    explicit = fresh("explicit")
    r = run("--out", str(explicit), "effective", env={"SNAILSIM_OUT": str(root / "unused")})
    check("--out overrides SNAILSIM_OUT", (explicit / "effective.json").exists() and not (root / "unused").exists())


def test_config_merging():
    cfg = fresh("merge")
    cfg.mkdir(parents=True)
    (cfg / "one.json").write_text(json.dumps({"schema_version": 1, "sweep": {"points": 3, "flux_max": 0.2}}))
    (cfg / "two.json").write_text(json.dumps({"sweep.points": 4}))
    out = cfg / "out"
    r = run("--config", str(cfg / "one.json"), "--config", str(cfg / "two.json"), "--set", "sweep.flux_min=0.1",
            "--seed", "7", "--out", str(out), "sweep-flux")
    check("merged run exits 0", r.returncode == 0, r.stderr)
    if r.returncode:
        return
    m = json.loads((out / "manifest.json").read_text())
    sweep = m["parameters"]["sweep"]
    check("later config wins", sweep["points"] == 4 and sweep["flux_max"] == 0.2, str(sweep))
    check("--set applies last", sweep["flux_min"] == 0.1, str(sweep))
    check("seed recorded", m["seed"] == 7)
    rows = (out / "sweep_flux.csv").read_text().strip().splitlines()
    check("sweep honours merged points", len(rows) == 1 + 2 * 4, str(len(rows)))


def test_rb_single_qubit():
    out = fresh("rb")
    r = run("--out", str(out), "rb", "--mode", "transmon", "--lengths", "1,4,8", "--randomizations", "4")
    check("rb transmon exits 0", r.returncode == 0, r.stderr)
    if r.returncode:
        return
    doc = json.loads((out / "rb.json").read_text())
    check("rb reports one-qubit transmon run", doc["n_qubits"] == 1 and doc["readout"] == "transmon")
    check("rb fidelity below coherence bound", doc["reference"]["fidelity"] <= doc["coherence_limit"]["per_clifford"] + 0.01,
          str(doc["reference"]["fidelity"]))
    check("rb JSON validates", validate_dir(out) == 2)


def test_gate_schedule():
    out = fresh("gate")
    r = run("--out", str(out), "gate", "--target", "swap")
    check("gate swap exits 0", r.returncode == 0, r.stderr)
    if r.returncode:
        return
    doc = json.loads((out / "gate.json").read_text())
    check("swap error small", abs(doc["error"]["swap_angle_rad"]) < 2e-2, str(doc["error"]))
    check("gate JSON validates", validate_dir(out) == 3)


def test_configs_validate():
    for path in sorted((SOURCE / "configs").glob("*.json")):
        try:
            jsonschema.validate(json.loads(path.read_text()), SCHEMAS["config"])
            check(f"{path.name} matches config schema", True)
        except jsonschema.ValidationError as e:
            check(f"{path.name} matches config schema", False, e.message)


if __name__ == "__main__":
    SCRATCH.mkdir(parents=True, exist_ok=True)
    test_configs_validate()
    test_config_errors()
    test_determinism_and_schemas()
    test_output_env()
    test_config_merging()
    test_rb_single_qubit()
    test_gate_schedule()
    print(f"{len(FAILURES)} failure(s)")
    sys.exit(1 if FAILURES else 0)
