"""Circuit representation: gate lists and classically specified basis rules.

A circuit acts on ``width`` qubits, qubit 0 being the leftmost (most
significant) one.  Gate-list circuits are simulated by tensor contraction;
basis-rule circuits are described column by column and are kept sparse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ParseError, ResourceError, ValidationError
from .tensor import DEFAULT_TOL, basis_index, basis_string, is_unitary

DENSE_CAP = 14
TRACE_CAP = 18

R_HALF = np.array(
    [[0.5, -np.sqrt(0.75)], [np.sqrt(0.75), 0.5]], dtype=np.complex128
)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)

_ARITY = {"X": 1, "RHALF": 1, "CUSTOM": 1, "CNOT": 2, "SWAP": 2, "TOF": 3}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.upper()
        if kind == "TOFFOLI":
            kind = "TOF"
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if kind not in _ARITY:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[kind]:
            raise ValidationError(
                f"{kind} takes {_ARITY[kind]} qubit(s), got {len(self.targets)}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ValidationError(f"{kind} targets must be distinct: {self.targets}")
        if kind == "CUSTOM":
            if self.matrix is None:
                raise ValidationError("CUSTOM gate needs a 2x2 matrix")
            m = np.asarray(self.matrix, dtype=np.complex128)
            if m.shape != (2, 2):
                raise ValidationError(f"CUSTOM gate matrix must be 2x2, got {m.shape}")
            ok, res = is_unitary(m, DEFAULT_TOL)
            if not ok:
                raise ValidationError(f"CUSTOM gate is not unitary (residual {res:.2e})")
            object.__setattr__(self, "matrix", m)

    def local_matrix(self) -> np.ndarray:
        """Matrix on the gate's own qubits, in ``targets`` order."""
        if self.kind == "X":
            return _X
        if self.kind == "RHALF":
            return R_HALF
        if self.kind == "CUSTOM":
            return self.matrix
        if self.kind == "SWAP":
            m = np.zeros((4, 4), dtype=np.complex128)
            m[0, 0] = m[3, 3] = m[1, 2] = m[2, 1] = 1
            return m
        # CNOT / TOF: controlled X on the last target
        d = 2 ** len(self.targets)
        m = np.eye(d, dtype=np.complex128)
        m[[d - 2, d - 1]] = m[[d - 1, d - 2]]
        return m


class BasisRule:
    """A circuit given by its action on each computational basis state.

    ``rule(bits)`` returns a list of ``(output_bits, amplitude)`` pairs, i.e. the
    column of the unitary at ``bits``.  Subclasses may override
    :meth:`sparse_columns` with a vectorised construction.
    """

    def __init__(
        self,
        width: int,
        rule: Callable[[str], Iterable[tuple[str, complex]]] | None = None,
        size: int | None = None,
    ):
        if width < 1:
            raise ValidationError("basis rule needs at least one qubit")
        self.width = width
        self._rule = rule
        self._size = size

    @property
    def size(self) -> int:
        return self._size if self._size is not None else self.width

    def column(self, bits: str) -> list[tuple[str, complex]]:
        if self._rule is None:
            raise NotImplementedError
        out = list(self._rule(bits))
        if not out:
            raise ValidationError(f"basis rule gave no output for |{bits}>")
        for b, amp in out:
            if len(b) != self.width:
                raise ValidationError(f"basis rule output {b!r} has wrong width")
            if not np.isfinite(complex(amp)):
                raise ValidationError("basis rule produced a non-finite amplitude")
        return out

    def sparse_columns(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All nonzero entries as ``(rows, cols, values)`` arrays."""
        rows, cols, vals = [], [], []
        for c in range(2**self.width):
            for b, amp in self.column(basis_string(c, self.width)):
                rows.append(basis_index(b))
                cols.append(c)
                vals.append(complex(amp))
        return (
            np.asarray(rows, dtype=np.int64),
            np.asarray(cols, dtype=np.int64),
            np.asarray(vals, dtype=np.complex128),
        )

    def sparse_matrix(self) -> sp.csc_matrix:
        rows, cols, vals = self.sparse_columns()
        d = 2**self.width
        return sp.csc_matrix((vals, (rows, cols)), shape=(d, d))


Body = Union[Sequence[Gate], BasisRule]


@dataclass
class CircuitSpec:
    width: int
    body: Body

    def __post_init__(self):
        if self.width < 1:
            raise ValidationError("circuit width must be positive")
        if isinstance(self.body, BasisRule):
            if self.body.width != self.width:
                raise ValidationError(
                    f"rule width {self.body.width} != circuit width {self.width}"
                )
        else:
            self.body = list(self.body)
            for g in self.body:
                if any(t < 0 or t >= self.width for t in g.targets):
                    raise ValidationError(
                        f"{g.kind} targets {g.targets} outside width {self.width}"
                    )

    @property
    def is_rule(self) -> bool:
        return isinstance(self.body, BasisRule)

    @property
    def size(self) -> int:
        """Circuit size used for query-cost accounting."""
        if self.is_rule:
            return self.body.size
        return max(1, len(self.body))


def _apply_gates(gates: Sequence[Gate], width: int, states: np.ndarray) -> np.ndarray:
    """Apply a gate list to a batch of states with shape ``(2**width, batch)``."""
    batch = states.shape[1]
    t = states.reshape([2] * width + [batch])
    for g in gates:
        k = len(g.targets)
        u = g.local_matrix().reshape([2] * (2 * k))
        t = np.tensordot(u, t, axes=(list(range(k, 2 * k)), list(g.targets)))
        # tensordot puts the gate's output axes first; move them back in place
        t = np.moveaxis(t, list(range(k)), list(g.targets))
    return t.reshape(2**width, batch)


def rule_unitarity_residual(rule: BasisRule) -> float:
    """Frobenius residual of ``U^dagger U - I`` and ``U U^dagger - I`` (the max)."""
    u = rule.sparse_matrix()
    uh = u.conj().T.tocsc()
    return max(_identity_residual(uh @ u), _identity_residual(u @ uh))


def _identity_residual(g: sp.spmatrix) -> float:
    # ||g - I||_F^2 = sum |g|^2 - sum |g_ii|^2 + sum |g_ii - 1|^2
    diag = g.diagonal()
    sq = float(np.sum(np.abs(g.data) ** 2))
    sq += float(np.sum(np.abs(diag - 1.0) ** 2) - np.sum(np.abs(diag) ** 2))
    return float(np.sqrt(max(sq, 0.0)))


def validate_rule(rule: BasisRule, tol: float = DEFAULT_TOL) -> float:
    res = rule_unitarity_residual(rule)
    if res > tol:
        raise ValidationError(f"basis rule is not unitary (residual {res:.3e})")
    return res


def compile_unitary(c: CircuitSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense ``2**width`` unitary of a circuit."""
    if c.width > cap:
        raise ResourceError(f"width {c.width} exceeds dense cap {cap}")
    if c.is_rule:
        validate_rule(c.body)
        return c.body.sparse_matrix().toarray()
    return _apply_gates(c.body, c.width, np.eye(2**c.width, dtype=np.complex128))


def apply_to_basis(c: CircuitSpec, index: str) -> np.ndarray:
    """Column of the circuit unitary at basis state ``|index>``."""
    if len(index) != c.width:
        raise DimensionError(f"index {index!r} has length {len(index)}, width is {c.width}")
    col = basis_index(index)
    out = np.zeros(2**c.width, dtype=np.complex128)
    if c.is_rule:
        for b, amp in c.body.column(index):
            out[basis_index(b)] += amp
        return out
    out[col] = 1.0
    return _apply_gates(c.body, c.width, out[:, None])[:, 0]


def traced_block_unitary(c: CircuitSpec, traced_qubits: int) -> np.ndarray:
    """Trace out the leftmost ``traced_qubits`` qubits of the circuit unitary.

    ``V[y', y] = sum_x <x, y'| U |x, y>``, assembled from columns of ``U``; the
    full unitary is never materialised.
    """
    if traced_qubits < 0 or traced_qubits > c.width:
        raise DimensionError(
            f"cannot trace {traced_qubits} qubits of a width-{c.width} circuit"
        )
    if c.width > TRACE_CAP:
        raise ResourceError(f"width {c.width} exceeds trace cap {TRACE_CAP}")
    rest = c.width - traced_qubits
    d_r = 2**rest
    v = np.zeros((d_r, d_r), dtype=np.complex128)
    if c.is_rule:
        rows, cols, vals = c.body.sparse_columns()
        keep = (rows >> rest) == (cols >> rest)
        np.add.at(v, (rows[keep] & (d_r - 1), cols[keep] & (d_r - 1)), vals[keep])
        return v
    d = 2**c.width
    for x in range(2**traced_qubits):
        # columns |x, y> for every y, as one batch
        batch = np.zeros((d, d_r), dtype=np.complex128)
        batch[x * d_r + np.arange(d_r), np.arange(d_r)] = 1.0
        out = _apply_gates(c.body, c.width, batch)
        v += out[x * d_r : (x + 1) * d_r, :]
    return v


def parse_circuit(text: str) -> CircuitSpec:
    """Parse the line-oriented circuit format.

    ::

        qubits 3
        X 0
        CNOT 0 1
        TOF 0 1 2
        RHALF 2
        CUSTOM 1 re00 im00 re01 im01 re10 im10 re11 im11

    Text after ``#`` is a comment; blank lines are ignored.
    """
    width = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0].upper()
        try:
            if head == "QUBITS":
                if width is not None:
                    raise ParseError("duplicate qubits header", lineno)
                if len(tok) != 2:
                    raise ParseError("expected 'qubits <width>'", lineno)
                width = int(tok[1])
                if width < 1:
                    raise ParseError("width must be positive", lineno)
                continue
            if width is None:
                raise ParseError("gate before 'qubits' header", lineno)
            if head == "CUSTOM":
                if len(tok) != 10:
                    raise ParseError("CUSTOM takes a qubit and 8 reals", lineno)
                nums = [float(t) for t in tok[2:]]
                m = np.array(
                    [complex(nums[i], nums[i + 1]) for i in range(0, 8, 2)]
                ).reshape(2, 2)
                g = Gate("CUSTOM", (int(tok[1]),), m)
            else:
                if head not in _ARITY:
                    raise ParseError(f"unknown gate {tok[0]!r}", lineno)
                g = Gate(head, tuple(int(t) for t in tok[1:]))
            if any(t < 0 or t >= width for t in g.targets):
                raise ParseError(f"qubit index out of range for width {width}", lineno)
            gates.append(g)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from exc
    if width is None:
        raise ParseError("missing 'qubits <width>' header")
    return CircuitSpec(width, gates)


def format_circuit(c: CircuitSpec) -> str:
    if c.is_rule:
        raise ValidationError("basis-rule circuits have no text form")
    lines = [f"qubits {c.width}"]
    for g in c.body:
        if g.kind == "CUSTOM":
            nums = []
            for z in g.matrix.reshape(-1):
                nums += [repr(float(z.real)), repr(float(z.imag))]
            lines.append(f"CUSTOM {g.targets[0]} " + " ".join(nums))
        else:
            lines.append(" ".join([g.kind] + [str(t) for t in g.targets]))
    return "\n".join(lines) + "\n"
