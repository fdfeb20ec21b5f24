"""Command-line front end.

Exit codes: ``solve`` 10 SAT / 20 UNSAT; ``pm-check`` 0 pure PMG / 3 PMG only /
4 neither; ``cross-validate`` and ``isolation-rate`` 0 pass / 2 fail; 1 on any
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import parse_circuit
from .cnf import count_models, emit_dimacs, enumerate_models, parse_dimacs
from .ctc import AdversarialPolicy, CtcGenerator
from .errors import UctcError
from .pmf import FULL_PATH_MAX_QUBITS, PmgQuery, traced_isometry_gap, pmo, random_unitary
from .solver import DEFAULT_MAX_N, build_usat_rule, m_usat, sat_decide
from .tensor import DEFAULT_TOL
from .vv import isolation_rate, resolve_mode, vv_reduce_with_constraint

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR = 10, 20, 1
EXIT_PURE, EXIT_PMG_ONLY, EXIT_NEITHER = 0, 3, 4
EXIT_FAIL = 2

CROSS_VALIDATE_TOL = 1e-9


@dataclass
class RunConfig:
    subcommand: str
    input: str | None
    seed: int
    policy: AdversarialPolicy
    adversary_seed: int | None
    iterations: int | None
    tol: float | None
    max_n: int
    mode: str | None
    json: bool

    def __post_init__(self):
        if self.tol is not None and self.tol <= 0:
            raise UctcError("--tol must be positive")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def cmd_solve(cfg: RunConfig, args) -> int:
    phi = parse_dimacs(_read(cfg.input))
    d = sat_decide(
        phi, cfg.policy, cfg.iterations, cfg.seed, cfg.mode, cfg.max_n, cfg.adversary_seed
    )
    if cfg.json:
        print(_dump(d.to_dict(verbose=args.verbose)))
    else:
        print(f"SAT {d.witness}" if d.result == "SAT" else "UNSAT")
    return EXIT_SAT if d.result == "SAT" else EXIT_UNSAT


def cmd_brute(cfg: RunConfig, args) -> int:
    phi = parse_dimacs(_read(cfg.input))
    count = count_models(phi)
    models = enumerate_models(phi) if args.list else None
    if cfg.json:
        out = {"num_vars": phi.num_vars, "count": count}
        if models is not None:
            out["models"] = models
        print(_dump(out))
    else:
        print(f"models {count}")
        for m in models or []:
            print(m)
    return 0


def cmd_vv(cfg: RunConfig, args) -> int:
    phi = parse_dimacs(_read(cfg.input))
    mode = resolve_mode(cfg.mode, phi.original_vars)
    star, h = vv_reduce_with_constraint(phi, cfg.seed, mode)
    text = emit_dimacs(star, [f"vv seed={cfg.seed} k={h.k} mode={mode}"])
    if cfg.json:
        print(_dump({"seed": cfg.seed, "k": h.k, "mode": mode, "dimacs": text}))
    else:
        sys.stdout.write(text)
    return 0


def cmd_isolation_rate(cfg: RunConfig, args) -> int:
    rows = []
    ok = True
    for path in [cfg.input] + list(args.more):
        phi = parse_dimacs(_read(path))
        n = phi.original_vars
        seeds = range(cfg.seed, cfg.seed + args.seeds)
        sat = count_models(phi) > 0
        rate = isolation_rate(phi, seeds, cfg.mode)
        bound = 1.0 / (10 * max(n, 1))
        passed = rate >= bound if sat else rate == 0.0
        ok &= passed
        rows.append(
            {"input": path, "n": n, "satisfiable": sat, "seeds": args.seeds,
             "rate": rate, "bound": bound if sat else 0.0, "pass": passed}
        )
    if cfg.json:
        print(_dump({"rows": rows, "pass": ok}))
    else:
        for r in rows:
            print(
                f"{r['input']}: n={r['n']} sat={r['satisfiable']} rate={r['rate']:.4f} "
                f"bound={r['bound']:.4f} {'PASS' if r['pass'] else 'FAIL'}"
            )
    return 0 if ok else EXIT_FAIL


def _load_query(cfg: RunConfig, args) -> PmgQuery:
    if args.usat:
        phi = parse_dimacs(_read(args.usat))
        return PmgQuery(phi.num_vars, build_usat_rule(phi))
    if cfg.input is None:
        raise UctcError("pm-check needs a circuit file or --usat <cnf>")
    if args.m is None:
        raise UctcError("pm-check needs -m <traced qubits> for circuit files")
    return PmgQuery(args.m, parse_circuit(_read(cfg.input)), args.ancillas)


def cmd_pm_check(cfg: RunConfig, args) -> int:
    q = _load_query(cfg, args)
    path = args.path
    if path is None:
        path = "both" if q.circuit.width <= FULL_PATH_MAX_QUBITS else "simplified"
    _, report = pmo(q, path, cfg.tol or DEFAULT_TOL)
    if cfg.json:
        print(report.to_json())
    else:
        for k, v in report.to_dict().items():
            print(f"{k}: {v}")
    if report.is_pure_pmg:
        return EXIT_PURE
    return EXIT_PMG_ONLY if report.is_pmg else EXIT_NEITHER


def cmd_ctc_demo(cfg: RunConfig, args) -> int:
    phi = parse_dimacs(_read(cfg.input))
    adv = cfg.adversary_seed if cfg.adversary_seed is not None else cfg.seed
    gen = CtcGenerator(cfg.policy, adv, cfg.tol or DEFAULT_TOL)
    res = m_usat(phi, gen, np.random.default_rng(cfg.seed), cfg.max_n, introspect=True)
    out = {
        "witness": res.witness,
        "verified": res.verified,
        "query": res.query_issued,
        "was_valid_pure_pmg": res.was_valid_pure_pmg,
        "policy": str(cfg.policy),
        "total_query_cost": gen.total_cost,
    }
    if cfg.json:
        print(_dump(out))
    else:
        for k, v in out.items():
            print(f"{k}: {v}")
    return 0


def cross_validate(samples: int, seed: int, perturb: float = 0.0, max_qubits: int = 6) -> float:
    """Max gap of the traced-isometry identity over random ``(U, n, r, k)``."""
    rng = np.random.default_rng(seed)
    configs = [
        (n, r, k)
        for n in range(1, max_qubits)
        for r in range(1, max_qubits)
        for k in range(3)
        if n + r + k <= max_qubits
    ]
    worst = 0.0
    for i in range(samples):
        n, r, k = configs[i % len(configs)]
        u = random_unitary(2 ** (n + r + k), rng)
        worst = max(worst, traced_isometry_gap(u, n, r, k, perturb))
    return worst


def cmd_cross_validate(cfg: RunConfig, args) -> int:
    tol = cfg.tol if cfg.tol is not None else CROSS_VALIDATE_TOL
    gap = cross_validate(args.samples, cfg.seed, args.perturb)
    ok = gap <= tol
    if cfg.json:
        print(_dump({"samples": args.samples, "seed": cfg.seed, "max_gap": gap,
                     "tol": tol, "pass": ok}))
    else:
        print(f"max gap {gap:.3e} over {args.samples} samples: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else EXIT_FAIL


COMMANDS = {
    "solve": cmd_solve,
    "brute": cmd_brute,
    "vv": cmd_vv,
    "isolation-rate": cmd_isolation_rate,
    "pm-check": cmd_pm_check,
    "ctc-demo": cmd_ctc_demo,
    "cross-validate": cmd_cross_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--policy", default="identity",
                        help="identity | perm | random | depol:<p>")
    common.add_argument("--adversary-seed", type=int, default=None)
    common.add_argument("--iterations", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    common.add_argument("--mode", choices=["direct", "auxiliary"], default=None)
    common.add_argument("--json", action="store_true")

    p = argparse.ArgumentParser(prog="uctc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("solve", parents=[common], help="decide SAT with the CTC algorithm")
    s.add_argument("input")
    s.add_argument("--verbose", action="store_true", help="include the extended witness")

    s = sub.add_parser("brute", parents=[common], help="brute-force model count")
    s.add_argument("input")
    s.add_argument("--list", action="store_true", help="also list the models")

    s = sub.add_parser("vv", parents=[common], help="emit an isolated formula")
    s.add_argument("input")

    s = sub.add_parser("isolation-rate", parents=[common], help="empirical isolation statistics")
    s.add_argument("input")
    s.add_argument("more", nargs="*")
    s.add_argument("--seeds", type=int, default=10_000)

    s = sub.add_parser("pm-check", parents=[common], help="process-matrix generator checks")
    s.add_argument("input", nargs="?")
    s.add_argument("-m", type=int, default=None, help="number of traced qubits")
    s.add_argument("--ancillas", type=int, default=0)
    s.add_argument("--usat", metavar="CNF", help="check the USAT circuit of a formula")
    s.add_argument("--path", choices=["simplified", "full_cj", "both"], default=None)

    s = sub.add_parser("ctc-demo", parents=[common], help="one USAT query with introspection")
    s.add_argument("input")

    s = sub.add_parser("cross-validate", parents=[common], help="traced-isometry identity sweep")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--perturb", type=float, default=0.0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            subcommand=args.subcommand,
            input=getattr(args, "input", None),
            seed=args.seed,
            policy=AdversarialPolicy.parse(args.policy),
            adversary_seed=args.adversary_seed,
            iterations=args.iterations,
            tol=args.tol,
            max_n=args.max_n,
            mode=args.mode,
            json=args.json,
        )
        return COMMANDS[args.subcommand](cfg, args)
    except (UctcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
