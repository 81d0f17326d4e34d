"""Batch driver: ``mqverify <command> --instance <path> [...]``.

Every run writes one JSON report (sorted keys, no timings, so identical
inputs give byte-identical output). Exit codes: 0 all checks pass, 1 some
check failed or a module error escaped, 2 usage or parse error, 3 a resource
bound was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import __version__
from .errors import ObstructionError, ParseError, WorkbenchError
from .ext import build_differentials, complex_report, phi_correspondence, verify_bimodule_memberships
from .instance import Instance, check_pairing, load
from .linalg import Matrix
from .ncpath import alpha_dual_closed_form, build_relation, differential_components, format_poly, identity_suite
from .parser import parse_expr
from .quiver import lift_stability, triple
from .reps import Representation, check_rep, induce, sample_rep, tangent_dim
from .scalars import QQ

COMMANDS = ("validate", "identities", "sample", "check", "stability", "ext", "verify-all")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


class Run:
    """Accumulates checks and report sections for one instance."""

    def __init__(self, inst: Instance, first_order: bool = False):
        self.inst = inst
        self.first_order = first_order
        self.checks: list[dict] = []
        self.sections: dict = {}
        self._rep: Representation | None = None

    def check(self, name: str, passed: bool, detail: str = ""):
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    def ser(self, x) -> str:
        return self.inst.field.serialize(x)

    def matrix(self, m: Matrix) -> list:
        return [[m.field.serialize(x) for x in r] for r in m.rows]

    # representation -------------------------------------------------------
    def sample(self, seed: int | None = None):
        inst = self.inst
        return sample_rep(inst.qd, inst.alpha, inst.q, inst.seed if seed is None else seed, inst.field, inst.bounds["box"], inst.bounds["retries"])

    def rep(self) -> Representation:
        if self._rep is None:
            inst = self.inst
            if inst.matrices is not None:
                self._rep = Representation(inst.qd, dict(inst.alpha), inst.field, dict(inst.matrices))
            else:
                self._rep = self.sample().rep
        return self._rep


# ---------------------------------------------------------------------------
# command bodies


def cmd_validate(run: Run):
    inst = run.inst
    check_pairing(inst)
    triple(inst.qd, inst.N)
    run.sections["validate"] = {
        "vertices": [str(v) for v in inst.qd.vertices],
        "arrows": [h.name for h in inst.qd.H],
        "alpha": {str(k): v for k, v in inst.alpha.items()},
        "g": inst.qd.g,
        "N": inst.N,
        "field": repr(inst.field),
    }
    run.check("instance is well formed", True)


def cmd_identities(run: Run):
    inst = run.inst
    rel = build_relation(inst.qd, inst.q, inst.field)
    suite = identity_suite(rel)
    for entry in suite:
        run.check(f"identity: {entry['name']}", entry["passed"], entry["detail"])
    diffs = differential_components(rel)
    closed = alpha_dual_closed_form(rel)
    bad = [h for h in closed if closed[h] != diffs.alpha_dual[h]]
    run.check("alpha^v engine matches closed form", not bad, f"differs at {bad}" if bad else "")
    exprs = []
    for src in inst.expressions:
        p = parse_expr(inst.qd, src, inst.field)
        exprs.append({"input": src, "normal_form": format_poly(p), "degree": p.degree, "homogeneous": p.is_homogeneous()})
    run.sections["identities"] = {"suite": suite, "rho": format_poly(rel.rho), "expressions": exprs}


def _obstructed(run: Run, e: ObstructionError):
    inst = run.inst
    per_vertex = {str(v): run.ser(inst.field(inst.q[v]) ** inst.alpha[v]) for v in inst.qd.vertices}
    run.sections["check"] = {"error": e.name, "q_power": run.ser(e.q_power), "q_i^alpha_i": per_vertex}
    run.check("q^alpha = 1", False, str(e))


def cmd_sample(run: Run):
    try:
        res = run.sample()
    except ObstructionError as e:
        _obstructed(run, e)
        return
    run.sections["sample"] = {
        "attempts": res.attempts,
        "strategy": res.strategy,
        "matrices": {h: run.matrix(m) for h, m in sorted(res.rep.X.items())},
        "relation": res.check.to_json(run.inst.field),
    }
    run.check("sampled representation satisfies the relation", res.ok)


def cmd_check(run: Run):
    inst = run.inst
    try:
        R = run.rep()
        chk = check_rep(R, inst.q)
    except ObstructionError as e:
        _obstructed(run, e)
        return
    run.sections["check"] = chk.to_json(inst.field)
    run.check("relation residual is zero", chk.ok)


def cmd_stability(run: Run):
    from .stability import good_prime, ind_compat_report, verdict

    inst = run.inst
    check_pairing(inst)
    R = run.rep()
    if inst.field != QQ:
        run.sections["stability"] = {"skipped": f"exact verdicts need a module over Q, not {inst.field!r}"}
        return
    b = inst.search_bounds
    p = good_prime(R, inst.prime, b["max_prime"])
    v = verdict(R, inst.theta, p, **b)
    rep = ind_compat_report(R, inst.theta, inst.N, inst.T, p, **b)
    th = lift_stability(inst.theta, inst.alpha, inst.N, inst.T, vertices=list(inst.qd.vertices))
    run.sections["stability"] = {
        "verdict": v.to_json(),
        "ind_compat": rep.to_json(),
        "theta_gtr": {f"{i}@{n}": f"{x.numerator}/{x.denominator}" for (i, n), x in sorted(th.items(), key=lambda kv: (kv[0][1], str(kv[0][0])))},
    }
    run.check("verdict is not inconclusive", v.kind != "Inconclusive", v.kind)
    run.check("ind_compat agrees", rep.agree)


def cmd_ext(run: Run):
    inst = run.inst
    R = run.rep()
    V = induce(R, inst.N)
    W = V
    if inst.partner_seed is not None:
        W = induce(run.sample(inst.partner_seed).rep, inst.N)
    cx = build_differentials(V, W, inst.q)
    rep = complex_report(V, W, inst.q, first_order=R if run.first_order else None, cx=cx)
    phi = phi_correspondence(V, W, inst.q, cx=cx)
    mem = verify_bimodule_memberships(V, W, inst.q, cx=cx)
    section = {"complex": rep.to_json(), "phi_correspondence": phi.to_json(), "memberships": mem.to_json()}
    if W is V:
        tan = tangent_dim(R, inst.q)
        section["moduli_dim"] = tan.moduli_dim
        section["rank_matches_moduli"] = rep.expected_rank == tan.moduli_dim - 2
    run.sections["ext"] = section
    run.check("d1 d0 = 0 and Euler identity", rep.is_complex and rep.euler_ok)
    run.check("dim E - dim L - dim L' = expected_rank", rep.rank_ok is not False)
    run.check("h-1 and h1 match graded Hom", rep.hom_ok is not False)
    if rep.first_order is not None:
        run.check("first-order support", rep.first_order["ok"])
    run.check("phi* correspondence", phi.ok)
    run.check("bimodule memberships", mem.ok)


def cmd_verify_all(run: Run):
    cmd_validate(run)
    cmd_identities(run)
    cmd_sample(run)
    if not all(c["passed"] for c in run.checks):
        return
    cmd_check(run)
    if not all(c["passed"] for c in run.checks):
        return
    cmd_stability(run)
    cmd_ext(run)


BODIES = {
    "validate": cmd_validate,
    "identities": cmd_identities,
    "sample": cmd_sample,
    "check": cmd_check,
    "stability": cmd_stability,
    "ext": cmd_ext,
    "verify-all": cmd_verify_all,
}


# ---------------------------------------------------------------------------
# driver


def run_one(command: str, source: str, seed: int | None = None, prime: int | None = None, first_order: bool = False) -> tuple[int, dict]:
    report: dict = {"command": command, "instance": source, "version": __version__}
    try:
        inst = load(source)
    except WorkbenchError as e:
        report.update(passed=False, error=_error_json(e))
        return e.exit_code if e.exit_code != 1 else EXIT_USAGE, report
    if seed is not None:
        inst.seed = seed
    if prime is not None:
        inst.prime = prime
    report.update(instance_digest=inst.digest, seed=inst.seed)
    run = Run(inst, first_order)
    code = EXIT_PASS
    try:
        BODIES[command](run)
    except WorkbenchError as e:
        report["error"] = _error_json(e)
        code = e.exit_code
    report["checks"] = run.checks
    report["sections"] = run.sections
    passed = code == EXIT_PASS and all(c["passed"] for c in run.checks)
    report["passed"] = passed
    if code == EXIT_PASS and not passed:
        code = EXIT_FAIL
    return code, report


def _error_json(e: WorkbenchError) -> dict:
    out = {"name": e.name, "message": str(e)}
    if isinstance(e, ParseError):
        out["position"] = e.position
        out["line"] = e.line
    if isinstance(e, ObstructionError) and e.q_power is not None:
        out["q_power"] = str(e.q_power)
    return out


def _run_job(args):
    return run_one(*args)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mqverify", description="Exact checks for multiplicative preprojective moduli machinery.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--instance", action="append", required=True, help="instance JSON path or builtin:<name>; repeatable")
    ap.add_argument("--seed", type=int, help="override the instance seed")
    ap.add_argument("--prime", type=int, help="first prime tried by stability searches (primes dividing a denominator are skipped)")
    ap.add_argument("--jobs", type=int, default=1, help="instances processed in parallel")
    ap.add_argument("--report", help="write the report here instead of stdout")
    ap.add_argument("--first-order", action="store_true", help="add the k[eps] support check to ext")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS
    if args.seed is not None and args.seed < 0:
        print("--seed must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    jobs = [(args.command, src, args.seed, args.prime, args.first_order) for src in args.instance]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    if len(results) == 1:
        code, doc = results[0]
    else:
        code = max(c for c, _ in results)
        doc = {"runs": [d for _, d in results], "passed": all(d.get("passed") for _, d in results)}
    text = dumps(doc)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
