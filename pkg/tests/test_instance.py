from __future__ import annotations

import copy
import json

import pytest

from mqverify.errors import BadPairing, ParseError, ZeroParameter
from mqverify.instance import BUILTIN, check_pairing, digest, from_dict, load, loads
from mqverify.scalars import CyclotomicField

BASE = BUILTIN["r1"]


def mutate(**changes):
    raw = copy.deepcopy(BASE)
    for k, v in changes.items():
        if v is None:
            raw.pop(k, None)
        else:
            raw[k] = v
    return raw


def test_builtin_loads_and_defaults():
    inst = load("builtin:r1")
    assert inst.N == 2 and inst.seed == 0 and inst.prime == 5
    assert inst.bounds == {"max_total_dim": 9, "max_prime": 13, "box": 3, "retries": 64}
    assert set(inst.matrices) == {"a", "a*"}
    check_pairing(inst)


def test_digest_ignores_key_order():
    raw = copy.deepcopy(BASE)
    shuffled = json.loads(json.dumps(dict(reversed(list(raw.items())))))
    assert digest(raw) == digest(shuffled)
    assert digest(raw) != digest(mutate(seed=1))


@pytest.mark.parametrize(
    "raw",
    [
        mutate(field={"kind": "quaternion"}),
        mutate(extra=1),
        mutate(alpha=None),
        mutate(alpha={"v": -1}),
        mutate(alpha={"w": 2}),
        mutate(matrices={"a": [["0"]], "a*": [["0"]]}),
        mutate(q={"v": {"root": 1}}),
        mutate(bounds={"max_total_dim": 0}),
        mutate(expressions="a"),
    ],
)
def test_schema_rejections(raw):
    with pytest.raises(ParseError):
        from_dict(raw)


def test_zero_q_and_pairing():
    with pytest.raises(ZeroParameter):
        from_dict(mutate(q={"v": "0"}))
    raw = mutate(quiver={"vertices": [1, 2], "arrows": [["a", 1, 2]]}, alpha={"1": 1, "2": 1}, theta={"1": 1, "2": 1}, q={"1": "-1", "2": "-1"}, matrices=None)
    with pytest.raises(BadPairing):
        check_pairing(from_dict(raw))


def test_cyclotomic_roots():
    raw = mutate(field={"kind": "cyclotomic", "m": 3}, q={"v": {"root": 2}}, matrices=None)
    inst = from_dict(raw)
    F = CyclotomicField(3)
    assert inst.q["v"] == F.zeta(2) and inst.q["v"] ** 3 == 1


def test_json_error_position():
    with pytest.raises(ParseError) as info:
        loads('{"field": {"kind": "rational"},\n "quiver": {"vertices": ["v"] "arrows": []}}')
    assert (info.value.line, info.value.position) == (2, 31)


def test_unknown_builtin_and_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load("builtin:nope")
    with pytest.raises(ParseError):
        load(str(tmp_path / "missing.json"))
