"""Valiant-Vazirani isolation: conjoin a random affine GF(2) constraint.

The hash family is the uniformly random affine map ``x -> A x + b`` over GF(2)
with ``k`` rows, ``k`` uniform in ``{0, ..., n+1}``.  All draws come from a
numpy PCG64 generator seeded with the caller's 64-bit seed, in the order
``k``, then ``A`` row-major, then ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .cnf import CnfFormula, count_models
from .errors import ResourceError, ValidationError

DIRECT_MAX_ROW_WIDTH = 10
DIRECT_DEFAULT_MAX_N = 8
MODES = ("direct", "auxiliary")


@dataclass(frozen=True)
class HashConstraint:
    """The affine system ``A x = b`` over GF(2); rows of ``a`` are bit tuples."""

    a: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValidationError("A and b must have the same number of rows")
        if not 0 <= len(self.b) <= self.n + 1:
            raise ValidationError(f"k={len(self.b)} outside [0, {self.n + 1}]")
        if any(len(row) != self.n for row in self.a):
            raise ValidationError(f"every row of A must have {self.n} entries")

    @property
    def k(self) -> int:
        return len(self.b)

    def holds(self, bits: str) -> bool:
        x = [int(c) for c in bits[: self.n]]
        return all(
            sum(ai * xi for ai, xi in zip(row, x)) % 2 == bi
            for row, bi in zip(self.a, self.b)
        )


def sample_constraint(n: int, seed: int) -> HashConstraint:
    if n < 0:
        raise ValidationError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, n + 2))
    a = rng.integers(0, 2, size=(k, n))
    b = rng.integers(0, 2, size=k)
    return HashConstraint(
        tuple(tuple(int(v) for v in row) for row in a), tuple(int(v) for v in b), n
    )


def _parity_clauses(vars_: list[int], rhs: int) -> list[tuple[int, ...]]:
    """Clauses forbidding every assignment to ``vars_`` whose parity is not ``rhs``."""
    out = []
    for t in product((0, 1), repeat=len(vars_)):
        if sum(t) % 2 != rhs:
            # the clause is falsified exactly by assignment t
            out.append(tuple(-v if bit else v for v, bit in zip(vars_, t)))
    return out


def _xor_gate(t: int, a: int, b: int) -> list[tuple[int, ...]]:
    # t <-> a xor b
    return [(-t, a, b), (-t, -a, -b), (t, -a, b), (t, a, -b)]


def _false_clauses() -> list[tuple[int, ...]]:
    return [(1,), (-1,)]


def resolve_mode(mode: str | None, n: int) -> str:
    if mode is None:
        return "direct" if n <= DIRECT_DEFAULT_MAX_N else "auxiliary"
    if mode not in MODES:
        raise ValidationError(f"unknown encoding mode {mode!r}; use one of {MODES}")
    return mode


def encode(phi: CnfFormula, h: HashConstraint, mode: str | None = None) -> CnfFormula:
    """``phi`` conjoined with ``A x = b`` on its original variables.

    ``direct`` writes each XOR row as ``2**(w-1)`` clauses over its ``w``
    variables.  ``auxiliary`` chains each row through fresh variables
    ``t_1 = x_1 xor x_2, t_2 = t_1 xor x_3, ...`` (4 clauses per link) and
    asserts the last one; every auxiliary is a function of ``x``.
    """
    if h.n != phi.original_vars:
        raise ValidationError(
            f"constraint is over {h.n} variables, formula has {phi.original_vars} original"
        )
    mode = resolve_mode(mode, h.n)
    clauses = list(phi.clauses)
    num_vars = phi.num_vars
    for row, rhs in zip(h.a, h.b):
        vars_ = [j + 1 for j, bit in enumerate(row) if bit]
        if not vars_:
            if rhs:
                if num_vars == 0:
                    raise ValidationError("cannot encode 0 = 1 without variables")
                clauses += _false_clauses()
            continue
        if mode == "direct":
            if len(vars_) > DIRECT_MAX_ROW_WIDTH:
                raise ResourceError(
                    f"XOR row touches {len(vars_)} variables; direct mode allows "
                    f"{DIRECT_MAX_ROW_WIDTH}"
                )
            clauses += _parity_clauses(vars_, rhs)
            continue
        acc = vars_[0]
        for v in vars_[1:]:
            num_vars += 1
            clauses += _xor_gate(num_vars, acc, v)
            acc = num_vars
        clauses.append((acc,) if rhs else (-acc,))
    return CnfFormula(num_vars, tuple(clauses), phi.original_vars)


def vv_reduce_with_constraint(
    phi: CnfFormula, seed: int, mode: str | None = None
) -> tuple[CnfFormula, HashConstraint]:
    h = sample_constraint(phi.original_vars, seed)
    return encode(phi, h, mode), h


def vv_reduce(phi: CnfFormula, seed: int, mode: str | None = None) -> CnfFormula:
    return vv_reduce_with_constraint(phi, seed, mode)[0]


def isolation_rate(phi: CnfFormula, seeds, mode: str | None = None) -> float:
    """Fraction of seeds for which the reduced formula has exactly one model."""
    seeds = list(seeds)
    hits = sum(count_models(vv_reduce(phi, s, mode)) == 1 for s in seeds)
    return hits / len(seeds)
