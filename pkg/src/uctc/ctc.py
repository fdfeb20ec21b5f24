"""Unitary CTC generator with an adversary for invalid queries.

On a query that is a pure PMG the generator returns the PMO channel.  On any
other query it is free to return an arbitrary channel of the right size; the
choice is made by an :class:`AdversarialPolicy`, drawn from the seed alone
(never from earlier queries).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .pmf import ChannelRep, PmgQuery, ProcessCheckReport, pmo, random_unitary
from .tensor import DEFAULT_TOL, dagger

POLICY_KINDS = ("identity", "perm", "random", "depol")


@dataclass(frozen=True)
class AdversarialPolicy:
    kind: str = "identity"
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"unknown policy {self.kind!r}; use one of {POLICY_KINDS}")
        if self.kind == "depol" and not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"depolarizing probability {self.p} outside [0, 1]")

    @classmethod
    def parse(cls, text: str) -> "AdversarialPolicy":
        """Parse ``identity``, ``perm``, ``random`` or ``depol:<p>``."""
        if text.startswith("depol"):
            _, _, p = text.partition(":")
            try:
                return cls("depol", float(p) if p else 1.0)
            except ValueError:
                raise ValidationError(f"bad depolarizing probability in {text!r}") from None
        return cls(text)

    def __str__(self) -> str:
        return f"depol:{self.p:g}" if self.kind == "depol" else self.kind

    def channel(self, qubits: int, rng: np.random.Generator) -> ChannelRep:
        d = 2**qubits
        if self.kind == "identity":
            return ChannelRep.identity(qubits)
        if self.kind == "perm":
            u = np.eye(d, dtype=np.complex128)[:, rng.permutation(d)]
            return ChannelRep.from_unitary(u)
        if self.kind == "random":
            return ChannelRep.from_unitary(random_unitary(d, rng))
        return ChannelRep.depolarizing(qubits, self.p)


@dataclass
class CtcHandle:
    channel: ChannelRep
    # test introspection only; the solver never branches on it
    was_valid_pure_pmg: bool = field(repr=False)
    query_cost: int
    report: ProcessCheckReport | None = field(default=None, repr=False)


def generate(
    q: PmgQuery, policy: AdversarialPolicy, seed, tol: float = DEFAULT_TOL
) -> CtcHandle:
    """Answer one query ``(m, C)``.

    ``seed`` may be an int or a sequence of ints (numpy ``SeedSequence``
    entropy).  Raises ValidationError for queries outside the generator's
    domain: circuits must be square, ``m + r -> m + r``.
    """
    if q.ancillas:
        raise ValidationError("unitary CTC generator takes square circuits only (k = 0)")
    channel, report = pmo(q, "simplified", tol)
    if report.is_pure_pmg:
        out = ChannelRep.from_unitary(channel.matrix)
    else:
        out = policy.channel(q.r, np.random.default_rng(seed))
    return CtcHandle(out, report.is_pure_pmg, q.cost, report)


class CtcGenerator:
    """Stateful front end that numbers queries and accumulates their cost.

    Query ``i`` is answered with seed ``[seed, i]``; the adversary therefore
    depends on the query index but not on the content of earlier queries.
    """

    def __init__(self, policy: AdversarialPolicy | None = None, seed=0, tol: float = DEFAULT_TOL):
        self.policy = policy or AdversarialPolicy()
        self.seed = seed
        self.tol = tol
        self.queries = 0
        self.total_cost = 0

    def __call__(self, q: PmgQuery) -> CtcHandle:
        base = list(self.seed) if isinstance(self.seed, (list, tuple)) else [self.seed]
        h = generate(q, self.policy, base + [self.queries], self.tol)
        self.queries += 1
        self.total_cost += h.query_cost
        return h


def apply(h: CtcHandle, state) -> np.ndarray:
    """Apply the handle's channel to a state vector or density matrix.

    Unitary channels keep pure states as vectors; any other channel promotes a
    vector to its density matrix first.
    """
    ch = h.channel
    s = np.asarray(state, dtype=np.complex128)
    d = ch.in_dim
    if s.ndim == 1:
        if s.shape[0] != d:
            raise DimensionError(f"state has dimension {s.shape[0]}, channel expects {d}")
        if ch.form == "unitary":
            return ch.matrix @ s
        s = np.outer(s, s.conj())
    if s.shape != (d, d):
        raise DimensionError(f"density matrix has shape {s.shape}, channel expects {(d, d)}")
    return ch(s)


def basis_probabilities(state) -> np.ndarray:
    s = np.asarray(state)
    if s.ndim == 1:
        p = np.abs(s) ** 2
    else:
        p = np.real(np.diag(s)).clip(min=0.0)
    return p / p.sum()


def is_pure_state(state, tol: float = DEFAULT_TOL) -> bool:
    s = np.asarray(state)
    if s.ndim == 1:
        return True
    return abs(np.real(np.trace(s @ s)) - 1.0) <= tol and np.allclose(s, dagger(s), atol=tol)
