"""Process-matrix machinery: Choi operators, indefinite operator, PMO channels.

Choi convention: ``CJ(C) = sum_{x,y} |x><y| (x) C(|x><y|)``, input factor on
the left.  For a channel on ``A_I (x) P -> A_O (x) F`` this puts the four
factors in the order ``A_I, P, A_O, F``, which is exactly the layout
:func:`indefinite_operator` expects; no reordering happens anywhere.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import (
    CircuitSpec,
    compile_unitary,
    rule_unitarity_residual,
    traced_block_unitary,
)
from .errors import DimensionError, ResourceError, ValidationError
from .tensor import (
    DEFAULT_TOL,
    as_matrix,
    dagger,
    is_psd,
    is_unitary,
    num_qubits,
    partial_trace,
    partial_trace_left,
)

CJ_MAX_IN_QUBITS = 6
FULL_PATH_MAX_QUBITS = 6
DENSE_CHOI_MAX_DIM = 4096

FORMS = ("unitary", "isometry", "kraus", "choi", "depolarizing")


def ancilla_embedding(m: np.ndarray, ancillas: int) -> np.ndarray:
    """Columns of ``m`` whose trailing ``ancillas`` qubits are ``|0...0>``.

    This is the operator ``x -> m (x (x) |0^k>)``.
    """
    if ancillas == 0:
        return m
    return m[:, :: 2**ancillas]


@dataclass
class ChannelRep:
    """A linear map on matrices in one of several concrete forms.

    ``isometry`` holds a square matrix ``U`` on ``in + k`` qubits acting on
    ``rho (x) |0^k><0^k|``; the matrix need not be unitary when the object
    comes out of an unverified PMO computation.  ``depolarizing`` holds the
    mixing probability ``p`` of ``rho -> (1-p) rho + p tr(rho) I/d``.
    """

    form: str
    in_qubits: int
    out_qubits: int
    matrix: np.ndarray | None = None
    ancillas: int = 0
    kraus: list[np.ndarray] = field(default_factory=list)
    choi_matrix: np.ndarray | None = None
    p: float = 0.0
    verified: bool = True

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValidationError(f"unknown channel form {self.form!r}")

    # constructors -----------------------------------------------------------

    @classmethod
    def from_unitary(cls, u) -> "ChannelRep":
        u = as_matrix(u)
        n = num_qubits(u.shape[0])
        if u.shape[0] != u.shape[1]:
            raise DimensionError("unitary channel needs a square matrix")
        return cls("unitary", n, n, matrix=u)

    @classmethod
    def from_isometry(cls, u, ancillas: int, verified: bool = True) -> "ChannelRep":
        u = as_matrix(u)
        total = num_qubits(u.shape[0])
        if u.shape[0] != u.shape[1] or ancillas > total:
            raise DimensionError("isometry form needs a square matrix on in + k qubits")
        return cls(
            "isometry", total - ancillas, total, matrix=u, ancillas=ancillas,
            verified=verified,
        )

    @classmethod
    def from_kraus(cls, ops: Sequence) -> "ChannelRep":
        ops = [as_matrix(k) for k in ops]
        if not ops:
            raise ValidationError("Kraus list is empty")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one shape")
        return cls("kraus", num_qubits(shape[1]), num_qubits(shape[0]), kraus=ops)

    @classmethod
    def from_choi(cls, j, in_dim: int, out_dim: int, verified: bool = False) -> "ChannelRep":
        j = as_matrix(j)
        if j.shape != (in_dim * out_dim, in_dim * out_dim):
            raise DimensionError(
                f"Choi matrix {j.shape} does not match dims {in_dim} x {out_dim}"
            )
        return cls(
            "choi", num_qubits(in_dim), num_qubits(out_dim), choi_matrix=j,
            verified=verified,
        )

    @classmethod
    def depolarizing(cls, qubits: int, p: float) -> "ChannelRep":
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"depolarizing probability {p} outside [0, 1]")
        return cls("depolarizing", qubits, qubits, p=float(p))

    @classmethod
    def identity(cls, qubits: int) -> "ChannelRep":
        return cls.from_unitary(np.eye(2**qubits, dtype=np.complex128))

    # views ------------------------------------------------------------------

    @property
    def in_dim(self) -> int:
        return 2**self.in_qubits

    @property
    def out_dim(self) -> int:
        return 2**self.out_qubits

    def operator(self) -> np.ndarray | None:
        """The single Kraus operator for unitary / isometry forms."""
        if self.form == "unitary":
            return self.matrix
        if self.form == "isometry":
            return ancilla_embedding(self.matrix, self.ancillas)
        return None

    def kraus_ops(self) -> list[np.ndarray]:
        if self.form in ("unitary", "isometry"):
            return [self.operator()]
        if self.form == "kraus":
            return list(self.kraus)
        if self.form == "depolarizing":
            d = self.in_dim
            ops = [np.sqrt(1 - self.p) * np.eye(d, dtype=np.complex128)]
            for i in range(d):
                for j in range(d):
                    k = np.zeros((d, d), dtype=np.complex128)
                    k[i, j] = np.sqrt(self.p / d)
                    ops.append(k)
            return ops
        # choi: eigen-decomposition, valid for completely positive maps only
        w, v = np.linalg.eigh((self.choi_matrix + dagger(self.choi_matrix)) / 2)
        ops = []
        for lam, vec in zip(w, v.T):
            if lam > DEFAULT_TOL:
                ops.append(np.sqrt(lam) * vec.reshape(self.in_dim, self.out_dim).T)
        return ops

    def __call__(self, x) -> np.ndarray:
        """Apply the map to an input operator ``x`` (any square matrix)."""
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.in_dim, self.in_dim):
            raise DimensionError(
                f"channel takes {self.in_dim}x{self.in_dim} operators, got {x.shape}"
            )
        op = self.operator()
        if op is not None:
            return op @ x @ dagger(op)
        if self.form == "kraus":
            return sum(k @ x @ dagger(k) for k in self.kraus)
        if self.form == "depolarizing":
            return (1 - self.p) * x + self.p * np.trace(x) * np.eye(self.in_dim) / self.in_dim
        return apply_choi(self.choi_matrix, x, self.in_dim, self.out_dim)


def apply_choi(j: np.ndarray, x: np.ndarray, in_dim: int, out_dim: int) -> np.ndarray:
    """``tr_in((x^T (x) I) J)``, the channel whose Choi operator is ``J``."""
    t = j.reshape(in_dim, out_dim, in_dim, out_dim)
    # sum_{a,b} x[a, b] * J[(a, i), (b, j)]
    return np.einsum("ab,aibj->ij", x, t)


def double_ket(m) -> np.ndarray:
    """``sum_x |x> (x) m|x>`` for a ``2**out x 2**in`` matrix ``m``."""
    m = np.asarray(m, dtype=np.complex128)
    return m.T.reshape(-1).copy()


def cj_of_map(fn: Callable[[np.ndarray], np.ndarray], in_dim: int) -> np.ndarray:
    """Choi operator of an arbitrary linear map, straight from its definition."""
    blocks = []
    for x in range(in_dim):
        row = []
        for y in range(in_dim):
            e = np.zeros((in_dim, in_dim), dtype=np.complex128)
            e[x, y] = 1.0
            row.append(np.asarray(fn(e), dtype=np.complex128))
        blocks.append(row)
    # block (x, y) of |x><y| (x) C(|x><y|) is C(|x><y|)
    return np.block(blocks)


def cj(c: ChannelRep, max_in_qubits: int = CJ_MAX_IN_QUBITS) -> np.ndarray:
    """Choi operator of a channel, dimension ``in_dim * out_dim``."""
    if c.in_qubits > max_in_qubits:
        raise ResourceError(
            f"{c.in_qubits} input qubits exceeds the dense Choi cap {max_in_qubits}"
        )
    if c.form == "choi":
        return c.choi_matrix.copy()
    if c.form == "depolarizing":
        d = c.in_dim
        phi = double_ket(np.eye(d))
        return (1 - c.p) * np.outer(phi, phi.conj()) + c.p * np.eye(d * d) / d
    out = np.zeros((c.in_dim * c.out_dim,) * 2, dtype=np.complex128)
    for k in c.kraus_ops():
        v = double_ket(k)
        out += np.outer(v, v.conj())
    return out


class InverseCJ:
    """The map ``X -> tr_0((X^T (x) I) M)`` recovered from an operator ``M``.

    The transpose on ``X`` makes this the exact inverse of :func:`cj`.
    """

    def __init__(self, m, in_dim: int, out_dim: int):
        m = as_matrix(m)
        if m.shape != (in_dim * out_dim, in_dim * out_dim):
            raise DimensionError(
                f"operator {m.shape} does not split as {in_dim} (x) {out_dim}"
            )
        self.m = m
        self.in_dim = in_dim
        self.out_dim = out_dim

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"expected {self.in_dim}x{self.in_dim} input, got {x.shape}")
        return apply_choi(self.m, x, self.in_dim, self.out_dim)

    def superoperator(self) -> np.ndarray:
        """Dense matrix ``S`` with ``vec(C(X)) = S vec(X)``, row-major ``vec``."""
        t = self.m.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)
        # C(X)[i, j] = sum_{a, b} X[a, b] J[(a, i), (b, j)]
        return t.transpose(1, 3, 0, 2).reshape(self.out_dim**2, self.in_dim**2)

    def channel(self, verified: bool = False) -> ChannelRep:
        return ChannelRep.from_choi(self.m, self.in_dim, self.out_dim, verified)


def cj_inverse(m, in_dim: int, out_dim: int) -> InverseCJ:
    return InverseCJ(m, in_dim, out_dim)


def indefinite_operator(w, n: int, r: int, l: int) -> np.ndarray:
    """``G = tr_{A_I, A_O}(W |A_I,P,F><A_I,P,F|)`` on ``P (x) F``.

    With ``B = sum_x |x> (x) I_P (x) |x> (x) I_F`` this equals ``B^dagger W B``,
    i.e. ``G[(p,f),(q,g)] = sum_{x,y} W[(y,p,y,f),(x,q,x,g)]``.
    """
    w = np.asarray(w, dtype=np.complex128)
    da, dp, df = 2**n, 2**r, 2**l
    d = da * dp * da * df
    if w.shape != (d, d):
        raise DimensionError(
            f"W has shape {w.shape}; layout A_I({n}) P({r}) A_O({n}) F({l}) needs {d}x{d}"
        )
    t = w.reshape(da, dp, da, df, da, dp, da, df)
    g = np.einsum("ypyfxqxg->pfqg", t)
    return g.reshape(dp * df, dp * df)


def indefinite_operator_literal(w, n: int, r: int, l: int) -> np.ndarray:
    """Same operator, built by forming the projector-like term and tracing."""
    da, dp, df = 2**n, 2**r, 2**l
    k = np.zeros((da * dp * da * df,) * 2, dtype=np.complex128)
    eye_p, eye_f = np.eye(dp), np.eye(df)
    for x in range(da):
        for y in range(da):
            exy = np.zeros((da, da))
            exy[x, y] = 1.0
            k += np.kron(np.kron(np.kron(exy, eye_p), exy), eye_f)
    return partial_trace(np.asarray(w) @ k, [da, dp, da, df], keep=[1, 3])


# PMG queries ---------------------------------------------------------------------


@dataclass
class PmgQuery:
    """A pair ``(m, C)``: ``C`` acts on ``m + r + k`` qubits with the last ``k``
    prepared in ``|0>``; the leftmost ``m`` qubits are traced."""

    m: int
    circuit: CircuitSpec
    ancillas: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("m must be at least 1")
        if self.ancillas < 0:
            raise ValidationError("ancilla count must be nonnegative")
        if self.circuit.width < self.m + self.ancillas + 1:
            raise ValidationError(
                f"circuit width {self.circuit.width} leaves no P register "
                f"(m={self.m}, k={self.ancillas})"
            )

    @property
    def r(self) -> int:
        return self.circuit.width - self.m - self.ancillas

    @property
    def l(self) -> int:
        return self.r + self.ancillas

    @property
    def cost(self) -> int:
        return self.circuit.size

    def summary(self) -> dict:
        return {"m": self.m, "r": self.r, "k": self.ancillas, "size": self.cost}


@dataclass
class ProcessCheckReport:
    is_pmg: bool
    is_pure_pmg: bool
    unitarity_residual: float
    psd_min_eig: float
    tp_residual: float
    path_disagreement: float | None = None
    input_unitarity_residual: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("input_unitarity_residual")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def input_unitarity_residual(c: CircuitSpec) -> float:
    # gate lists are products of unitary gates
    return rule_unitarity_residual(c.body) if c.is_rule else 0.0


def unitary_channel_residual(j: np.ndarray, in_dim: int, out_dim: int) -> float:
    """How far a Choi operator is from that of a unitary channel."""
    if in_dim != out_dim:
        return float("inf")
    w, v = np.linalg.eigh((j + dagger(j)) / 2)
    top = np.sqrt(max(w[-1], 0.0)) * v[:, -1]
    rank_res = float(np.linalg.norm(j - np.outer(top, top.conj())))
    u = top.reshape(in_dim, out_dim).T
    return max(rank_res, is_unitary(u, 0.0)[1])


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def is_cptp(c: ChannelRep, tol: float = DEFAULT_TOL) -> tuple[bool, dict]:
    """Complete positivity and trace preservation.

    Returns ``(ok, {"psd_min_eig", "tp_residual"})``; the trace-preservation
    residual is the trace norm of ``tr_out(CJ) - I``.
    """
    din, dout = c.in_dim, c.out_dim
    if c.form in ("unitary", "isometry", "kraus"):
        ops = c.kraus_ops()
        # Choi of a Kraus map is a sum of rank-one PSD terms
        gram = sum(dagger(k) @ k for k in ops)
        min_eig = 0.0
        tp = trace_norm(gram.T - np.eye(din))
    elif c.form == "depolarizing":
        min_eig = min(1 - c.p + c.p / din, c.p / din)
        tp = 0.0
    else:
        if din * dout > DENSE_CHOI_MAX_DIM:
            raise ResourceError(f"dense Choi check capped at dimension {DENSE_CHOI_MAX_DIM}")
        j = cj(c, max_in_qubits=64)
        try:
            _, min_eig = is_psd(j, tol)
        except DimensionError:
            min_eig = -float("inf")
        tp = trace_norm(partial_trace(j, [din, dout], keep=[0]) - np.eye(din))
    ok = min_eig >= -tol and tp <= tol
    return ok, {"psd_min_eig": float(min_eig), "tp_residual": float(tp)}


def _simplified(q: PmgQuery) -> tuple[ChannelRep, np.ndarray]:
    ug = traced_block_unitary(q.circuit, q.m)
    return ChannelRep.from_isometry(ug, q.ancillas, verified=False), ug


def _full_cj(q: PmgQuery) -> ChannelRep:
    if q.circuit.width > FULL_PATH_MAX_QUBITS:
        raise ResourceError(
            f"full CJ path is capped at {FULL_PATH_MAX_QUBITS} qubits, query has "
            f"{q.circuit.width}"
        )
    u = compile_unitary(q.circuit)
    w = cj(ChannelRep.from_isometry(u, q.ancillas))
    g = indefinite_operator(w, q.m, q.r, q.l)
    return cj_inverse(g, 2**q.r, 2**q.l).channel()


def pmo(
    q: PmgQuery, path: str = "simplified", tol: float = DEFAULT_TOL
) -> tuple[ChannelRep, ProcessCheckReport]:
    """Process-matrix channel ``P -> F`` of a query, with validity report.

    ``path`` selects the evaluation route: ``"simplified"`` traces the
    circuit unitary directly, ``"full_cj"`` goes through the Choi operator of
    the whole circuit and the indefinite operator, ``"both"`` runs both and
    records their Frobenius gap (the returned channel is the simplified one).
    """
    if path not in ("simplified", "full_cj", "both"):
        raise ValidationError(f"unknown path {path!r}")
    in_res = input_unitarity_residual(q.circuit)
    input_unitary = in_res <= tol

    full = _full_cj(q) if path in ("full_cj", "both") else None
    if path == "full_cj":
        channel = full
        ok, res = is_cptp(channel, tol)
        u_res = unitary_channel_residual(channel.choi_matrix, channel.in_dim, channel.out_dim)
        disagreement = None
    else:
        channel, ug = _simplified(q)
        ok, res = is_cptp(channel, tol)
        u_res = is_unitary(ug, 0.0)[1]
        disagreement = None
        if full is not None:
            disagreement = float(np.linalg.norm(full.choi_matrix - cj(channel)))
    pmo_unitary = q.ancillas == 0 and u_res <= tol
    channel.verified = ok
    report = ProcessCheckReport(
        is_pmg=ok,
        is_pure_pmg=bool(ok and input_unitary and pmo_unitary and q.ancillas == 0),
        unitarity_residual=float(u_res),
        psd_min_eig=res["psd_min_eig"],
        tp_residual=res["tp_residual"],
        path_disagreement=disagreement,
        input_unitarity_residual=in_res,
    )
    return channel, report


def traced_isometry_gap(u, n: int, r: int, k: int, perturb: float = 0.0) -> float:
    """Frobenius gap between both sides of the traced-isometry identity.

    Left: indefinite operator of ``CJ(C_(U,k))``.  Right: ``CJ(C_(tr_n U, k))``.
    ``perturb`` adds ``perturb * I`` to the traced matrix (fault injection).
    """
    u = as_matrix(u)
    w = cj(ChannelRep.from_isometry(u, k))
    g = indefinite_operator(w, n, r, r + k)
    ug = partial_trace_left(u, n)
    if perturb:
        ug = ug + perturb * np.eye(ug.shape[0])
    rhs = cj(ChannelRep.from_isometry(ug, k, verified=False))
    return float(np.linalg.norm(g - rhs))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary (QR of a complex Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_kraus_channel(
    in_qubits: int, out_qubits: int, num_kraus: int, rng: np.random.Generator
) -> ChannelRep:
    """Random CPTP map from a random isometry ``C^din -> C^(dout * K)``."""
    din, dout = 2**in_qubits, 2**out_qubits
    big = random_unitary(dout * num_kraus, rng)[:, :din]
    ops = [big[i * dout : (i + 1) * dout, :] for i in range(num_kraus)]
    return ChannelRep.from_kraus(ops)
