"""Single-query USAT routine and the repeated-isolation SAT decision loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import BasisRule, CircuitSpec
from .cnf import AMBIGUOUS, CnfFormula, evaluate, model_table, prefix_completion
from .ctc import AdversarialPolicy, CtcGenerator, apply, basis_probabilities
from .errors import ResourceError, ValidationError
from .pmf import PmgQuery
from .tensor import basis_string
from .vv import resolve_mode, vv_reduce

DEFAULT_MAX_N = 8
HALF = 0.5
ROOT_3_4 = float(np.sqrt(0.75))

# named sub-streams of the run seed
VV_STREAM = 1
ADVERSARY_STREAM = 2
MEASUREMENT_STREAM = 3


class UsatRule(BasisRule):
    """Basis rule of the USAT circuit on registers ``x`` (n qubits) and ``y`` (n qubits).

    With ``p = x[:-1]`` and ``b`` the completion bit of ``p``:

    * exactly one completion: rotate ``x_n`` by R_1/2 and XOR ``(p, b)`` into ``y``;
    * no completion: flip ``x_n``;
    * both completions (outside the uniqueness promise): XOR ``x`` itself into
      ``y``, leaving ``x`` untouched.

    The last branch keeps the rule unitary and makes the traced block equal to
    ``sum_{z model} sum_y |y xor z><y|`` for any number of models.
    """

    def __init__(self, phi: CnfFormula):
        if phi.num_vars < 1:
            raise ValidationError("USAT circuit needs at least one variable")
        self.phi = phi
        self.n = phi.num_vars
        self._sparse = None
        super().__init__(2 * self.n, self._column, size=2 * self.n + phi.num_literals)

    def _column(self, bits: str):
        n = self.n
        x, y = bits[:n], bits[n:]
        prefix, xn = x[:-1], int(x[-1])
        b = prefix_completion(self.phi, prefix)
        yi = int(y, 2)
        if b is None:
            return [(prefix + str(1 - xn) + y, 1.0)]
        if b == AMBIGUOUS:
            return [(x + basis_string(yi ^ int(x, 2), n), 1.0)]
        z = int(prefix + str(b), 2)
        y_out = basis_string(yi ^ z, n)
        sign = -1.0 if xn else 1.0
        return [
            (prefix + str(xn) + y_out, HALF),
            (prefix + str(1 - xn) + y_out, sign * ROOT_3_4),
        ]

    def sparse_columns(self):
        if self._sparse is None:
            self._sparse = self._build_sparse()
        return self._sparse

    def _build_sparse(self):
        n = self.n
        dn = 2**n
        sat = model_table(self.phi)
        # per x: completion status of its prefix
        xs = np.arange(dn)
        pre = xs >> 1
        s0, s1 = sat[2 * pre], sat[2 * pre + 1]
        matched = s0 ^ s1
        ambiguous = s0 & s1
        z_of_x = 2 * pre + s1.astype(np.int64)

        cols = np.arange(dn * dn, dtype=np.int64)
        cx, cy = cols >> n, cols & (dn - 1)
        m = matched[cx]
        amb = ambiguous[cx]
        none = ~(m | amb)

        rows, cs, vals = [], [], []
        # no completion: flip x_n
        rows.append(((cx[none] ^ 1) << n) | cy[none])
        cs.append(cols[none])
        vals.append(np.ones(none.sum()))
        # both completions: y ^= x
        rows.append((cx[amb] << n) | (cy[amb] ^ cx[amb]))
        cs.append(cols[amb])
        vals.append(np.ones(amb.sum()))
        # one completion: R_1/2 on x_n, y ^= z
        mx, my = cx[m], cy[m]
        y_out = my ^ z_of_x[mx]
        rows.append((mx << n) | y_out)
        cs.append(cols[m])
        vals.append(np.full(m.sum(), HALF))
        rows.append(((mx ^ 1) << n) | y_out)
        cs.append(cols[m])
        vals.append(np.where(mx & 1, -ROOT_3_4, ROOT_3_4))
        return (
            np.concatenate(rows).astype(np.int64),
            np.concatenate(cs).astype(np.int64),
            np.concatenate(vals).astype(np.complex128),
        )


def build_usat_rule(phi: CnfFormula) -> CircuitSpec:
    rule = UsatRule(phi)
    return CircuitSpec(rule.width, rule)


def usat_query(phi: CnfFormula) -> PmgQuery:
    return PmgQuery(phi.num_vars, build_usat_rule(phi))


@dataclass
class UsatOutcome:
    witness: str | None
    verified: bool
    query_issued: dict
    was_valid_pure_pmg: bool | None = None


def measure(state, rng: np.random.Generator) -> int:
    """Computational-basis measurement; deterministic on basis states."""
    p = basis_probabilities(state)
    top = int(np.argmax(p))
    if p[top] >= 1.0 - 1e-12:
        return top
    return int(rng.choice(len(p), p=p))


def m_usat(
    phi: CnfFormula,
    generator: CtcGenerator,
    rng: np.random.Generator | None = None,
    max_n: int = DEFAULT_MAX_N,
    introspect: bool = False,
) -> UsatOutcome:
    """One generator query, one channel use, one measurement, one check."""
    n = phi.num_vars
    if n > max_n:
        raise ResourceError(f"{n} variables exceeds the simulation cap {max_n}")
    q = usat_query(phi)
    handle = generator(q)
    zero = np.zeros(2**n, dtype=np.complex128)
    zero[0] = 1.0
    out = apply(handle, zero)
    outcome = measure(out, rng if rng is not None else np.random.default_rng(0))
    witness = basis_string(outcome, n)
    return UsatOutcome(
        witness=witness,
        verified=evaluate(phi, witness),
        query_issued=q.summary(),
        was_valid_pure_pmg=handle.was_valid_pure_pmg if introspect else None,
    )


@dataclass
class SatDecision:
    result: str
    witness: str | None
    iterations_used: int
    total_query_cost: int
    seed: int
    policy: str
    full_witness: str | None = field(default=None, repr=False)

    def to_dict(self, verbose: bool = False) -> dict:
        d = {
            "result": self.result,
            "witness": self.witness,
            "iterations_used": self.iterations_used,
            "total_query_cost": self.total_query_cost,
            "seed": self.seed,
            "policy": self.policy,
        }
        if verbose:
            d["full_witness"] = self.full_witness
        return d


def sat_decide(
    phi: CnfFormula,
    policy: AdversarialPolicy | None = None,
    iterations: int | None = None,
    seed: int = 0,
    mode: str | None = None,
    max_n: int = DEFAULT_MAX_N,
    adversary_seed: int | None = None,
) -> SatDecision:
    """Repeat isolate-then-query until a verified witness appears.

    Round ``i`` reduces with seed ``[seed, 1, i]``, the adversary answers query
    ``i`` with seed ``[adversary_seed, i]`` (``[seed, 2, i]`` by default) and
    measurement draws from ``[seed, 3, i]``.  Default round count is ``n**2``.
    """
    policy = policy or AdversarialPolicy()
    n = phi.original_vars
    if phi.num_vars > max_n:
        raise ResourceError(f"{phi.num_vars} variables exceeds the simulation cap {max_n}")
    mode = resolve_mode(mode, n)
    rounds = max(1, n * n) if iterations is None else iterations
    adv = [adversary_seed] if adversary_seed is not None else [seed, ADVERSARY_STREAM]
    gen = CtcGenerator(policy, adv)
    for i in range(rounds):
        phi_star = vv_reduce(phi, [seed, VV_STREAM, i], mode)
        rng = np.random.default_rng([seed, MEASUREMENT_STREAM, i])
        res = m_usat(phi_star, gen, rng, max_n=max_n)
        if res.verified:
            w = phi_star.project(res.witness)
            # phi* contains every clause of phi
            assert evaluate(phi, res.witness[: phi.num_vars])
            return SatDecision("SAT", w, i + 1, gen.total_cost, seed, str(policy), res.witness)
    return SatDecision("UNSAT", None, rounds, gen.total_cost, seed, str(policy))
