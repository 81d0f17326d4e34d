from __future__ import annotations

import json
from pathlib import Path

import pytest

from mqverify.cli import dumps, main, run_one
from mqverify.instance import BUILTIN, load
from mqverify.reps import sample_rep
from mqverify.scalars import QQ, PrimeField

INSTANCES = Path(__file__).resolve().parents[1] / "instances"


def inst(name: str) -> str:
    return str(INSTANCES / f"{name}.json")


def test_verify_all_builtin_r1():
    code, rep = run_one("verify-all", "builtin:r1")
    assert code == 0 and rep["passed"]
    cx = rep["sections"]["ext"]["complex"]
    assert (cx["h-1"], cx["h0"], cx["h1"]) == (1, 2, 1)
    assert rep["sections"]["stability"]["verdict"]["kind"] == "CertifiedStable"
    assert rep["sections"]["ext"]["rank_matches_moduli"]


def test_check_obstructed_reports_q_power():
    code, rep = run_one("check", inst("obstructed"))
    assert code == 1 and not rep["passed"]
    sec = rep["sections"]["check"]
    assert sec["error"] == "ObstructionError"
    assert sec["q_i^alpha_i"] == {"v": "-1/1"}


def test_validate_malformed_exit_2(capsys):
    assert main(["validate", "--instance", inst("malformed")]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"]["name"] == "ParseError" and doc["error"]["position"] == 31


def test_usage_errors(capsys):
    assert main(["frobnicate", "--instance", "x"]) == 2
    assert main(["validate"]) == 2
    assert main(["validate", "--instance", "builtin:r1", "--seed", "-1"]) == 2


def test_resource_bound_exit_3(tmp_path):
    raw = json.loads((INSTANCES / "loops_g2_q1.json").read_text())
    raw["bounds"]["max_total_dim"] = 4
    p = tmp_path / "small.json"
    p.write_text(json.dumps(raw))
    code, rep = run_one("stability", str(p))
    assert code == 3 and rep["error"]["name"] == "TooLarge"


def test_check_failure_exit_1(tmp_path):
    raw = json.loads(json.dumps(BUILTIN["r1"]))
    raw["matrices"]["a"][0][1] = "2"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    code, rep = run_one("check", str(p))
    assert code == 1 and rep["sections"]["check"]["residual_zero"] is False


@pytest.mark.parametrize("name", ["r1", "two_vertex", "loops_g2_q1"])
def test_instances_pass(name):
    code, rep = run_one("verify-all", inst(name))
    assert code == 0, [c for c in rep["checks"] if not c["passed"]]


def test_cyclotomic_instance_skips_stability():
    code, rep = run_one("verify-all", inst("loops_g2_zeta3"))
    assert code == 0
    assert "skipped" in rep["sections"]["stability"]


def _walk(x, path=()):
    if isinstance(x, dict):
        for k, v in x.items():
            yield from _walk(v, path + (k,))
    elif isinstance(x, list):
        for v in x:
            yield from _walk(v, path)
    else:
        yield path, x


def test_scalar_round_trip():
    """Every exact value in a report parses back to the same scalar."""
    for source in ("builtin:r1", inst("loops_g2_zeta3"), inst("two_vertex")):
        _, rep = run_one("verify-all", source)
        F = load(source).field
        seen = 0
        for path, val in _walk(rep["sections"]):
            if not isinstance(val, str):
                continue
            if "matrices" in path or "residual" in path or path[-1] == "q_power":
                field = F
            elif "theta_gtr" in path or path[-1] == "pairing":
                field = QQ
            elif "basis" in path:
                field = PrimeField(int(val.split(":")[0]))
            else:
                continue
            assert field.serialize(field.parse(val)) == val
            seen += 1
        assert seen > 0
    inst_z = load(inst("loops_g2_zeta3"))
    _, rep = run_one("sample", inst("loops_g2_zeta3"))
    R = sample_rep(inst_z.qd, inst_z.alpha, inst_z.q, inst_z.seed, inst_z.field).rep
    for h, rows in rep["sections"]["sample"]["matrices"].items():
        assert [[inst_z.field.parse(s) for s in r] for r in rows] == R.X[h].rows


def test_byte_identical_reports(tmp_path):
    args = ["verify-all", "--instance", inst("r1"), "--instance", inst("two_vertex"), "--first-order"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--report", str(a)]) == 0
    assert main(args + ["--report", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["passed"] and len(doc["runs"]) == 2
    assert dumps(doc) == a.read_text()


def test_multi_instance_exit_is_max(capsys):
    assert main(["check", "--instance", inst("r1"), "--instance", inst("obstructed"), "--instance", inst("malformed")]) == 2
