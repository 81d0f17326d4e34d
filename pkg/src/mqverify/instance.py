"""Instance files: JSON documents describing one quiver, parameters and
search bounds.

Schema (keys not listed are rejected)::

    {
      "field":    {"kind": "rational"} | {"kind": "cyclotomic", "m": 3}
                  | {"kind": "prime", "p": 5},
      "quiver":   {"vertices": [...], "arrows": [[name, src, tgt], ...],
                   "ordering": [names]},                       # ordering optional
      "alpha":    {vertex: int},
      "theta":    {vertex: scalar},                            # optional, default 0
      "q":        {vertex: scalar | {"root": k}},              # {"root": k} = zeta_m^k
      "N":        int,                                         # optional, default 2g
      "T":        scalar,                                      # optional
      "seed":     int,                                         # optional, default 0
      "prime":    int,                                         # optional, default 5
      "bounds":   {"max_total_dim", "max_prime", "box", "retries"},  # optional
      "matrices": {arrow: [[scalar, ...], ...]},               # optional
      "partner_seed": int,                                     # optional second sample
      "expressions": [str, ...]                                # optional
    }

Scalars are strings in canonical form ("-1/2", "(3; 0/1, 1/1)", "5:2") or
plain integers. Vertex keys are matched by their string form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import BadPairing, ParseError, ZeroParameter
from .linalg import Matrix
from .quiver import DoubledQuiver, Quiver, double
from .scalars import QQ, CyclotomicField, Field, PrimeField, cyclotomic_root, is_prime

BUILTIN = {
    "r1": {
        "field": {"kind": "rational"},
        "quiver": {"vertices": ["v"], "arrows": [["a", "v", "v"]]},
        "alpha": {"v": 2},
        "theta": {"v": "0"},
        "q": {"v": "-1"},
        "seed": 0,
        "matrices": {"a": [["0", "1"], ["0", "0"]], "a*": [["0", "0"], ["-2", "0"]]},
    },
}

TOP_KEYS = {"field", "quiver", "alpha", "theta", "q", "N", "T", "seed", "prime", "bounds", "matrices", "partner_seed", "expressions"}
BOUND_KEYS = {"max_total_dim", "max_prime", "box", "retries"}


@dataclass
class Instance:
    raw: dict
    field: Field
    qd: DoubledQuiver
    alpha: dict
    theta: dict
    q: dict
    N: int
    T: Fraction | None
    seed: int
    prime: int
    bounds: dict
    matrices: dict | None
    partner_seed: int | None
    expressions: list = field(default_factory=list)

    @property
    def digest(self) -> str:
        return digest(self.raw)

    @property
    def search_bounds(self) -> dict:
        return {k: v for k, v in self.bounds.items() if k in ("max_total_dim", "max_prime")}


def digest(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _fail(msg: str):
    raise ParseError(msg)


def _require(cond: bool, msg: str):
    if not cond:
        _fail(msg)


def parse_field(spec: Any) -> Field:
    _require(isinstance(spec, dict) and "kind" in spec, "field must be an object with a 'kind'")
    kind = spec["kind"]
    if kind == "rational":
        return QQ
    if kind == "cyclotomic":
        m = spec.get("m")
        _require(isinstance(m, int) and m >= 1, "cyclotomic field needs an integer m >= 1")
        return CyclotomicField(m)
    if kind == "prime":
        p = spec.get("p")
        _require(isinstance(p, int) and is_prime(p), "prime field needs a prime p")
        return PrimeField(p)
    _fail(f"unknown field kind {kind!r}")


def parse_scalar(F: Field, x: Any):
    if isinstance(x, bool):
        _fail(f"not a scalar: {x!r}")
    if isinstance(x, int):
        return F(x)
    if isinstance(x, str):
        return F.parse(x)
    _fail(f"not a scalar: {x!r}")


def _vertex_map(vertices, data: Any, what: str, conv, default=None) -> dict:
    if data is None and default is not None:
        return {v: default for v in vertices}
    _require(isinstance(data, dict), f"{what} must be an object keyed by vertex")
    names = {str(v): v for v in vertices}
    unknown = set(data) - set(names)
    _require(not unknown, f"{what} names unknown vertices {sorted(unknown)}")
    missing = set(names) - set(data)
    if missing and default is None:
        _fail(f"{what} is missing vertices {sorted(missing)}")
    return {v: conv(data[str(v)]) if str(v) in data else default for v in vertices}


def from_dict(raw: dict) -> Instance:
    _require(isinstance(raw, dict), "instance must be a JSON object")
    extra = set(raw) - TOP_KEYS
    _require(not extra, f"unknown keys {sorted(extra)}")
    for k in ("field", "quiver", "alpha", "q"):
        _require(k in raw, f"missing key {k!r}")
    F = parse_field(raw["field"])
    qs = raw["quiver"]
    _require(isinstance(qs, dict) and "vertices" in qs and "arrows" in qs, "quiver needs 'vertices' and 'arrows'")
    vertices = qs["vertices"]
    _require(isinstance(vertices, list) and all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in vertices), "vertices must be a list of strings or integers")
    arrows = qs["arrows"]
    _require(isinstance(arrows, list) and all(isinstance(a, list) and len(a) == 3 for a in arrows), "arrows must be [name, src, tgt] triples")
    quiver = Quiver(tuple(vertices), tuple(tuple(a) for a in arrows), tuple(qs.get("ordering", ())))
    qd = double(quiver)

    def as_int(x):
        _require(isinstance(x, int) and not isinstance(x, bool) and x >= 0, f"expected a non-negative integer, got {x!r}")
        return x

    alpha = _vertex_map(vertices, raw["alpha"], "alpha", as_int)
    theta = _vertex_map(vertices, raw.get("theta"), "theta", lambda x: parse_scalar(QQ, x), Fraction(0))

    def as_q(x):
        if isinstance(x, dict):
            _require(set(x) == {"root"} and isinstance(x["root"], int), "q entries as objects must be {'root': k}")
            _require(isinstance(F, CyclotomicField), "{'root': k} needs a cyclotomic field")
            return F(cyclotomic_root(F.m, x["root"] % F.m))
        return parse_scalar(F, x)

    q = _vertex_map(vertices, raw["q"], "q", as_q)
    for v, x in q.items():
        if not x:
            raise ZeroParameter(f"q at vertex {v!r} is zero")
    g = qd.g
    N = raw.get("N", 2 * g)
    _require(isinstance(N, int) and N >= 0, "N must be a non-negative integer")
    T = raw.get("T")
    if T is not None:
        T = parse_scalar(QQ, T)
    seed = raw.get("seed", 0)
    _require(isinstance(seed, int) and seed >= 0, "seed must be a non-negative integer")
    prime = raw.get("prime", 5)
    _require(isinstance(prime, int), "prime must be an integer")
    bounds = {"max_total_dim": 9, "max_prime": 13, "box": 3, "retries": 64}
    b = raw.get("bounds", {})
    _require(isinstance(b, dict) and not set(b) - BOUND_KEYS, f"bounds keys must be among {sorted(BOUND_KEYS)}")
    for k, v in b.items():
        _require(isinstance(v, int) and v > 0, f"bound {k} must be a positive integer")
        bounds[k] = v
    matrices = None
    if "matrices" in raw:
        ms = raw["matrices"]
        _require(isinstance(ms, dict), "matrices must be an object keyed by arrow name")
        matrices = {}
        for h in qd.H:
            _require(h.name in ms, f"matrices missing arrow {h.name!r}")
            rows = ms[h.name]
            _require(isinstance(rows, list) and all(isinstance(r, list) for r in rows), f"matrix for {h.name} must be a list of rows")
            nr, nc = alpha[h.tgt], alpha[h.src]
            _require(len(rows) == nr and all(len(r) == nc for r in rows), f"matrix for {h.name} must be {nr}x{nc}")
            matrices[h.name] = Matrix(F, [[parse_scalar(F, x) for x in r] for r in rows], nc)
        _require(not set(ms) - {h.name for h in qd.H}, "matrices names unknown arrows")
    partner = raw.get("partner_seed")
    _require(partner is None or (isinstance(partner, int) and partner >= 0), "partner_seed must be a non-negative integer")
    exprs = raw.get("expressions", [])
    _require(isinstance(exprs, list) and all(isinstance(e, str) for e in exprs), "expressions must be a list of strings")
    inst = Instance(raw, F, qd, alpha, theta, q, N, T, seed, prime, bounds, matrices, partner, exprs)
    return inst


def check_pairing(inst: Instance):
    total = sum((inst.theta[v] * inst.alpha[v] for v in inst.qd.vertices), Fraction(0))
    if total != 0:
        raise BadPairing(f"theta pairs to {total} with alpha, not 0")


def loads(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, position=e.colno, line=e.lineno) from None


def load(source: str) -> Instance:
    """A path, or ``builtin:<name>`` for a bundled instance."""
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in BUILTIN:
            raise ParseError(f"unknown builtin instance {name!r}")
        return from_dict(json.loads(json.dumps(BUILTIN[name])))
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read {source}: {e.strerror}") from None
    return from_dict(loads(text))
