"""Dense complex linear algebra on qubit registers.

Index convention used everywhere in the package: the leftmost tensor factor
(and, inside a register, the leftmost qubit) is the most significant bit of a
basis-state index.  ``basis_index("10") == 2``.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import DimensionError, ShapeError

DEFAULT_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix has non-finite entries")
    return a


def num_qubits(dim: int) -> int:
    """Number of qubits of a power-of-two dimension."""
    if dim < 1 or dim & (dim - 1):
        raise DimensionError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


def basis_index(bits: str) -> int:
    """Integer index of a computational basis string, leftmost bit most significant."""
    if bits == "":
        return 0
    if any(c not in "01" for c in bits):
        raise DimensionError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def basis_string(index: int, width: int) -> str:
    return format(index, "b").zfill(width) if width else ""


def ket(bits: str) -> np.ndarray:
    """Computational basis column vector ``|bits>``."""
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[basis_index(bits)] = 1.0
    return v


def dagger(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace_left(m, traced_qubits: int) -> np.ndarray:
    """Trace out the leftmost ``traced_qubits`` qubits of a square matrix.

    Computes ``sum_x (<x| (x) I) m (|x> (x) I)`` over all basis strings ``x``
    of the traced register.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"partial trace needs a square matrix, got {m.shape}")
    total = num_qubits(m.shape[0])
    if traced_qubits < 0 or traced_qubits > total:
        raise DimensionError(
            f"cannot trace {traced_qubits} qubits out of a {total}-qubit operator"
        )
    d_t = 2**traced_qubits
    d_r = m.shape[0] // d_t
    return np.einsum("xaxb->ab", m.reshape(d_t, d_r, d_t, d_r))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """General partial trace keeping the factors listed in ``keep`` (in order)."""
    m = np.asarray(m, dtype=np.complex128)
    dims = list(dims)
    _check_dims(m, dims)
    k = len(dims)
    keep = list(keep)
    t = m.reshape(dims + dims)
    # contract every traced factor's row index with its column index
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = [letters[i] for i in range(k)]
    cols = [letters[k + i] if i in keep else letters[i] for i in range(k)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    r = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return r.reshape(d_keep, d_keep)


def is_unitary(m, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Check ``m^dagger m = I`` and ``m m^dagger = I`` in Frobenius norm.

    Returns ``(ok, residual)`` where residual is the larger of the two norms.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"unitarity needs a square matrix, got {m.shape}")
    eye = np.eye(m.shape[0])
    mh = dagger(m)
    residual = max(
        float(np.linalg.norm(mh @ m - eye)), float(np.linalg.norm(m @ mh - eye))
    )
    return residual <= tol, residual


def is_isometry(m, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    m = np.asarray(m, dtype=np.complex128)
    residual = float(np.linalg.norm(dagger(m) @ m - np.eye(m.shape[1])))
    return residual <= tol, residual


def hermitian_residual(m) -> float:
    m = np.asarray(m, dtype=np.complex128)
    return float(np.linalg.norm(m - dagger(m)))


def is_psd(m, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Positive-semidefiniteness test; returns ``(ok, min_eigenvalue)``.

    Raises ShapeError when ``m`` is not Hermitian within ``tol`` (scaled by the
    matrix norm for large operators).
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"PSD check needs a square matrix, got {m.shape}")
    herm = hermitian_residual(m)
    if herm > tol * max(1.0, float(np.linalg.norm(m))):
        raise ShapeError(f"matrix is not Hermitian (residual {herm:.3e})")
    h = (m + dagger(m)) / 2
    min_eig = float(np.linalg.eigvalsh(h)[0])
    return min_eig >= -tol, min_eig


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    for d in dims:
        if d < 1 or d & (d - 1):
            raise DimensionError(f"subsystem dimension {d} is not a power of two")
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(
            f"subsystem dims {list(dims)} do not multiply to {m.shape[0]}"
        )


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a square operator.

    Factor ``perm[i]`` of the input becomes factor ``i`` of the output, on both
    rows and columns, so ``permute_subsystems(kron(A, B), [da, db], [1, 0])``
    equals ``kron(B, A)``.
    """
    m = np.asarray(m, dtype=np.complex128)
    dims = list(dims)
    _check_dims(m, dims)
    k = len(dims)
    if sorted(perm) != list(range(k)):
        raise DimensionError(f"{list(perm)} is not a permutation of {k} factors")
    t = m.reshape(dims + dims)
    axes = list(perm) + [k + p for p in perm]
    return t.transpose(axes).reshape(m.shape)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def permute_vector(v, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return v.reshape(list(dims)).transpose(list(perm)).reshape(-1)


def matrix_to_json(m) -> str:
    """Debug dump: ``{"rows", "cols", "re", "im"}`` with row-major entries."""
    m = as_matrix(m)
    flat = m.reshape(-1)
    return json.dumps(
        {
            "rows": m.shape[0],
            "cols": m.shape[1],
            "re": flat.real.tolist(),
            "im": flat.imag.tolist(),
        }
    )


def matrix_from_json(text: str) -> np.ndarray:
    d = json.loads(text)
    rows, cols = int(d["rows"]), int(d["cols"])
    re, im = d["re"], d["im"]
    if len(re) != rows * cols or len(im) != rows * cols:
        raise DimensionError("entry count does not match rows * cols")
    return as_matrix((np.array(re) + 1j * np.array(im)).reshape(rows, cols))
