"""CNF formulas, DIMACS I/O and brute-force model oracles.

Assignments are bit strings, ``bits[i-1]`` being the value of variable ``i``.
As basis indices they follow the package convention: variable 1 is the most
significant bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ParseError, ResourceError, ValidationError

COUNT_CAP = 24
ENUM_CAP = 16

AMBIGUOUS = "ambiguous"


def _normalize(clause: Iterable[int]) -> tuple[int, ...] | None:
    seen: dict[int, None] = {}
    for lit in clause:
        seen.setdefault(int(lit), None)
    lits = tuple(seen)
    if any(-lit in seen for lit in lits):
        return None  # tautology
    return lits


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    original_vars: int | None = None

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError("num_vars must be nonnegative")
        norm = []
        for cl in self.clauses:
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(
                        f"literal {lit} out of range for {self.num_vars} variables"
                    )
            c = _normalize(cl)
            if c is not None:
                norm.append(c)
        object.__setattr__(self, "clauses", tuple(norm))
        ov = self.num_vars if self.original_vars is None else self.original_vars
        if not 0 <= ov <= self.num_vars:
            raise ValidationError("original_vars must lie in [0, num_vars]")
        object.__setattr__(self, "original_vars", ov)

    @property
    def num_literals(self) -> int:
        return sum(len(c) for c in self.clauses)

    def project(self, bits: str) -> str:
        """Restrict an assignment to the original (non-auxiliary) variables."""
        return bits[: self.original_vars]


def _check_bits(phi: CnfFormula, bits: str) -> None:
    if len(bits) != phi.num_vars:
        raise DimensionError(
            f"assignment has {len(bits)} bits, formula has {phi.num_vars} variables"
        )
    if any(c not in "01" for c in bits):
        raise DimensionError(f"not a bit string: {bits!r}")


def evaluate(phi: CnfFormula, bits: str) -> bool:
    _check_bits(phi, bits)
    for clause in phi.clauses:
        for lit in clause:
            if (bits[abs(lit) - 1] == "1") == (lit > 0):
                break
        else:
            return False
    return True


@lru_cache(maxsize=64)
def _variable_masks(n: int) -> tuple[int, ...]:
    """Bitset over all 2**n assignments where variable ``i`` is true, per ``i``."""
    idx = np.arange(2**n, dtype=np.int64)
    masks = [0]
    for i in range(1, n + 1):
        col = ((idx >> (n - i)) & 1).astype(bool)
        masks.append(int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little"))
    return tuple(masks)


def satisfying_mask(phi: CnfFormula) -> int:
    """Bitset whose bit ``a`` is set iff assignment index ``a`` satisfies ``phi``."""
    n = phi.num_vars
    if n > COUNT_CAP:
        raise ResourceError(f"{n} variables exceeds brute-force cap {COUNT_CAP}")
    masks = _variable_masks(n)
    full = (1 << (2**n)) - 1
    acc = full
    for clause in phi.clauses:
        cm = 0
        for lit in clause:
            cm |= masks[lit] if lit > 0 else full ^ masks[-lit]
        acc &= cm
        if not acc:
            break
    return acc


def model_table(phi: CnfFormula) -> np.ndarray:
    """Boolean array of length ``2**n``: entry ``a`` is ``phi`` at assignment index ``a``."""
    n = phi.num_vars
    mask = satisfying_mask(phi)
    raw = np.frombuffer(mask.to_bytes((2**n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: 2**n].astype(bool)


def count_models(phi: CnfFormula) -> int:
    return satisfying_mask(phi).bit_count()


def enumerate_models(phi: CnfFormula) -> list[str]:
    """All satisfying assignments, in increasing index order."""
    if phi.num_vars > ENUM_CAP:
        raise ResourceError(f"{phi.num_vars} variables exceeds enumeration cap {ENUM_CAP}")
    table = model_table(phi)
    return [format(int(a), "b").zfill(phi.num_vars) if phi.num_vars else "" for a in np.flatnonzero(table)]


def prefix_completion(phi: CnfFormula, prefix: str):
    """Which last bit completes ``prefix`` to a model of ``phi``.

    Returns 0 or 1 when exactly one completion satisfies, ``None`` when neither
    does, and :data:`AMBIGUOUS` when both do.
    """
    n = phi.num_vars
    if n < 1 or len(prefix) != n - 1:
        raise DimensionError(
            f"prefix must have {max(n - 1, 0)} bits, got {len(prefix)}"
        )
    ok0 = evaluate(phi, prefix + "0")
    ok1 = evaluate(phi, prefix + "1")
    if ok0 and ok1:
        return AMBIGUOUS
    if ok0:
        return 0
    if ok1:
        return 1
    return None


def random_cnf(n: int, num_clauses: int, clause_width: int, seed: int) -> CnfFormula:
    """Uniform random ``clause_width``-CNF: distinct variables per clause, fair signs."""
    if n < 1 or num_clauses < 0 or clause_width < 1:
        raise ValidationError("n and clause_width must be positive")
    if clause_width > n:
        raise ValidationError(f"clause width {clause_width} exceeds {n} variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(num_clauses):
        vars_ = rng.choice(n, size=clause_width, replace=False) + 1
        signs = rng.integers(0, 2, size=clause_width) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vars_, signs)))
    return CnfFormula(n, tuple(clauses))


_HEADER = re.compile(r"^p\s+cnf\s+(\d+)\s+(\d+)\s*$")


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF.

    A ``c original_vars <k>`` comment, when present, restores the auxiliary
    variable boundary written by :func:`emit_dimacs`.
    """
    header = None
    original = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        last_line = lineno
        if not line:
            continue
        if line.startswith("c"):
            tok = line.split()
            if len(tok) == 3 and tok[1] == "original_vars":
                try:
                    original = int(tok[2])
                except ValueError:
                    raise ParseError("bad original_vars comment", lineno) from None
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            m = _HEADER.match(line)
            if not m:
                raise ParseError(f"malformed header {line!r}", lineno)
            header = (int(m.group(1)), int(m.group(2)))
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(
                    f"literal {lit} out of range for {header[0]} variables", lineno
                )
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("clause missing terminating 0", last_line)
    if len(clauses) != header[1]:
        raise ParseError(
            f"header declares {header[1]} clauses, found {len(clauses)}", last_line
        )
    try:
        return CnfFormula(header[0], tuple(clauses), original)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def emit_dimacs(phi: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    if phi.original_vars != phi.num_vars:
        lines.append(f"c original_vars {phi.original_vars}")
    lines.append(f"p cnf {phi.num_vars} {len(phi.clauses)}")
    lines += [" ".join(str(l) for l in cl) + (" 0" if cl else "0") for cl in phi.clauses]
    return "\n".join(lines) + "\n"


def dimacs_comments(text: str) -> dict[str, str]:
    """``key=value`` pairs found on comment lines."""
    out = {}
    for line in text.splitlines():
        if line.startswith("c"):
            for tok in line.split()[1:]:
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    out[k] = v
    return out
