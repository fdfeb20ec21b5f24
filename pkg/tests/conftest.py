import itertools

import numpy as np
import pytest

from uctc.cnf import CnfFormula, count_models, random_cnf


def xor_shift(z: int, n: int) -> np.ndarray:
    """Independent oracle for sum_y |y xor z><y|, built by a scalar loop."""
    d = 2**n
    m = np.zeros((d, d))
    for y in range(d):
        m[y ^ z, y] = 1.0
    return m


def cube(bits: str) -> CnfFormula:
    """Unit clauses pinning every variable: the only model is ``bits``."""
    return CnfFormula(len(bits), tuple((i + 1,) if b == "1" else (-(i + 1),) for i, b in enumerate(bits)))


def formula_with_models(n: int, models) -> CnfFormula:
    """Blocking-clause CNF whose model set is exactly ``models``."""
    keep = set(models)
    clauses = []
    for t in itertools.product("01", repeat=n):
        a = "".join(t)
        if a not in keep:
            clauses.append(tuple(-(i + 1) if c == "1" else i + 1 for i, c in enumerate(a)))
    return CnfFormula(n, tuple(clauses))


def structured_unique_family(max_n: int = 5):
    """Every cube for n <= max_n plus the cube with an extra redundant clause."""
    out = []
    for n in range(1, max_n + 1):
        for t in itertools.product("01", repeat=n):
            z = "".join(t)
            out.append((cube(z), z))
            if n >= 2:
                phi = formula_with_models(n, [z])
                out.append((phi, z))
    return out


def random_unique_formulas(count: int, seed: int = 0, ns=(1, 2, 3, 4, 5)):
    """Random CNFs certified uniquely satisfiable by brute force."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(ns))
        width = min(3, n)
        m = int(rng.integers(1, 6 * n + 2))
        phi = random_cnf(n, m, width, int(rng.integers(2**31)))
        if count_models(phi) == 1:
            out.append(phi)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
