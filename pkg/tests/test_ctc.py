import numpy as np
import pytest

from conftest import formula_with_models, xor_shift
from uctc.circuit import CircuitSpec, Gate
from uctc.cnf import CnfFormula
from uctc.ctc import (
    AdversarialPolicy,
    CtcGenerator,
    apply,
    basis_probabilities,
    generate,
    is_pure_state,
)
from uctc.errors import DimensionError, ValidationError
from uctc.pmf import PmgQuery, is_cptp
from uctc.solver import usat_query
from uctc.tensor import ket

POLICIES = [AdversarialPolicy(k) for k in ("identity", "perm", "random")] + [AdversarialPolicy("depol", 1.0), AdversarialPolicy("depol", 0.25)]


def test_policy_parse_and_str():
    assert AdversarialPolicy.parse("depol:0.5") == AdversarialPolicy("depol", 0.5)
    assert str(AdversarialPolicy.parse("depol")) == "depol:1"
    assert str(AdversarialPolicy.parse("random")) == "random"
    for bad in ("chaos", "depol:x", "depol:2"):
        with pytest.raises(ValidationError):
            AdversarialPolicy.parse(bad)


@pytest.mark.parametrize("policy", POLICIES, ids=str)
def test_valid_query_ignores_policy_and_seed(policy):
    q = usat_query(CnfFormula(3, ((-1,), (2,), (3,))))
    for seed in range(5):
        h = generate(q, policy, seed)
        assert h.was_valid_pure_pmg
        assert h.channel.form == "unitary"
        np.testing.assert_allclose(h.channel.matrix, xor_shift(0b011, 3), atol=1e-12)


def test_two_model_query_identity_policy():
    q = usat_query(formula_with_models(2, ["01", "10"]))
    h = generate(q, AdversarialPolicy("identity"), 0)
    assert not h.was_valid_pure_pmg
    np.testing.assert_array_equal(h.channel.matrix, np.eye(4))


def test_identity_circuit_query_is_invalid():
    for m in (1, 2):
        h = generate(PmgQuery(m, CircuitSpec(m + 1, [])), AdversarialPolicy(), 0)
        assert not h.was_valid_pure_pmg


def test_ancilla_queries_rejected():
    with pytest.raises(ValidationError):
        generate(PmgQuery(1, CircuitSpec(3, []), ancillas=1), AdversarialPolicy(), 0)


@pytest.mark.parametrize("policy", POLICIES, ids=str)
def test_adversarial_channels_are_cptp(policy):
    q = usat_query(CnfFormula(2, ((1,), (-1,))))
    for seed in range(5):
        h = generate(q, policy, seed)
        assert is_cptp(h.channel, 1e-10)[0]


@pytest.mark.parametrize("policy", POLICIES, ids=str)
def test_determinism(policy):
    q = usat_query(CnfFormula(3, ((1,), (-1,))))
    a, b = generate(q, policy, [9, 4]), generate(q, policy, [9, 4])
    for x, y in zip(a.channel.kraus_ops(), b.channel.kraus_ops()):
        assert np.array_equal(x, y)


def test_random_policy_depends_on_seed():
    q = usat_query(CnfFormula(2, ((1,), (-1,))))
    a = generate(q, AdversarialPolicy("random"), 1).channel.matrix
    b = generate(q, AdversarialPolicy("random"), 2).channel.matrix
    assert not np.allclose(a, b)


def test_generator_cost_accounting():
    gen = CtcGenerator(AdversarialPolicy("random"), seed=[3, 2])
    phis = [CnfFormula(2, ((1,), (-2,))), CnfFormula(3, ((1, 2), (-3,))), CnfFormula(1, ((1,),))]
    expected = 0
    for phi in phis:
        q = usat_query(phi)
        h = gen(q)
        assert h.query_cost == q.circuit.size == 2 * phi.num_vars + phi.num_literals
        expected += h.query_cost
    assert gen.queries == 3 and gen.total_cost == expected


def test_generator_seeds_by_query_index():
    q = usat_query(CnfFormula(2, ((1,), (-1,))))
    gen = CtcGenerator(AdversarialPolicy("random"), seed=5)
    first, second = gen(q), gen(q)
    np.testing.assert_array_equal(first.channel.matrix, generate(q, AdversarialPolicy("random"), [5, 0]).channel.matrix)
    np.testing.assert_array_equal(second.channel.matrix, generate(q, AdversarialPolicy("random"), [5, 1]).channel.matrix)


def test_apply_xor_channel_to_zero():
    h = generate(usat_query(CnfFormula(3, ((1,), (-2,), (3,)))), AdversarialPolicy(), 0)
    np.testing.assert_allclose(apply(h, ket("000")), ket("101"), atol=1e-12)


def test_apply_identity_and_depolarizing(rng):
    q = usat_query(CnfFormula(2, ((1,), (-1,))))
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    np.testing.assert_allclose(apply(generate(q, AdversarialPolicy(), 0), psi), psi)
    rho = apply(generate(q, AdversarialPolicy("depol", 1.0), 0), psi)
    np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-12)
    assert not is_pure_state(rho)
    np.testing.assert_allclose(basis_probabilities(rho), np.full(4, 0.25))


def test_apply_shape_checks():
    h = generate(usat_query(CnfFormula(2, ((1,),))), AdversarialPolicy("depol", 0.5), 0)
    with pytest.raises(DimensionError):
        apply(h, np.ones(8))
    with pytest.raises(DimensionError):
        apply(h, np.eye(2))


def test_gate_query_passthrough():
    # SWAP on two qubits traced over the first is the identity, a valid pure PMG
    h = generate(PmgQuery(1, CircuitSpec(2, [Gate("SWAP", (0, 1))])), AdversarialPolicy("random"), 0)
    assert h.was_valid_pure_pmg
    np.testing.assert_allclose(h.channel.matrix, np.eye(2), atol=1e-12)
