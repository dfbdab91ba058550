import numpy as np
import pytest

from moufang import jets
from moufang.algebra import OCTONIONS, QUATERNIONS, sample_ball
from moufang.birep import action_taylor, first_order_direct, regular_birep, twisted_birep
from moufang.mc import (FIRST_ORDER_PATTERN, VectorField, classical_lie_residuals,
                        cross_commutator_magnitude, gle_residuals, gle_terms, gmc_coordinate_terms,
                        gmc_operator_terms, gmc_residuals, infinitesimal_op, minimality_first_order,
                        operator_bracket, pattern_closure, second_order_minimality, sign_prepass,
                        vf_commutator)

OCT_REG = regular_birep(OCTONIONS)
OCT_TW = twisted_birep(OCTONIONS)
QUAT_REG = regular_birep(QUATERNIONS)
QUAT_TW = twisted_birep(QUATERNIONS)


def test_prepass_recovers_pattern_closure():
    assert sign_prepass([OCT_REG, OCT_TW]) == pattern_closure()


def test_regular_action_alone_is_ambiguous():
    assert len(sign_prepass([OCT_REG])) > len(pattern_closure())


def test_pattern_closure_contents():
    closure = pattern_closure()
    assert ("l", -1, "lhat") in closure
    assert ("r", 1, "m") in closure
    assert ("r", -1, "rhat") in closure
    assert len(closure) == 6


@pytest.mark.parametrize("act", [OCT_REG, OCT_TW, QUAT_TW], ids=lambda a: a.name)
def test_first_order_minimality(act):
    recs = minimality_first_order(act, samples=20, seed=2)
    assert all(r.passed for r in recs), [(r.name, r.max_residual) for r in recs]


def test_octonion_associators_individually_nonzero():
    rng = np.random.default_rng(4)
    A, g = sample_ball(rng, 2, 7, 0.3)
    d = first_order_direct(OCT_TW, A, g)
    assert min(np.max(np.abs(v)) for v in d.values()) > 1e-4


def test_g_at_unit_gives_zero_associators():
    A = sample_ball(np.random.default_rng(5), 1, 7, 0.3)[0]
    d = first_order_direct(OCT_REG, A, np.zeros(7))
    assert max(np.max(np.abs(v)) for v in d.values()) < 1e-12


def test_classical_reduction_on_quaternions():
    assert all(r.passed for r in classical_lie_residuals(QUAT_REG, samples=20))
    assert not all(r.passed for r in classical_lie_residuals(OCT_REG, samples=5))


@pytest.mark.parametrize("act", [OCT_REG, OCT_TW, QUAT_REG], ids=lambda a: a.name)
def test_gle_terms_vanish_and_sum(act):
    recs = gle_residuals(act, samples=20, seed=1)
    assert all(r.passed for r in recs), [(r.name, r.max_residual) for r in recs]


def test_gle_terms_zero_at_unit_point():
    fields = action_taylor(OCT_REG)
    g = sample_ball(np.random.default_rng(6), 1, 7, 0.3)[0]
    t = gle_terms(OCT_REG, fields, np.zeros(7), g)
    assert max(np.max(np.abs(v)) for v in t.values()) < 1e-12


@pytest.mark.parametrize("act", [OCT_REG, OCT_TW], ids=lambda a: a.name)
def test_second_order_minimality(act):
    recs = second_order_minimality(act, samples=10, seed=3)
    assert all(r.passed for r in recs), [(r.name, r.max_residual) for r in recs]


def test_infinitesimal_op_basics():
    fields = action_taylor(OCT_REG)
    A = sample_ball(np.random.default_rng(7), 1, 7, 0.3)[0]
    zero = infinitesimal_op(fields, np.zeros(7), "S")
    assert np.array_equal(zero(A), np.zeros(7))
    x, y = np.eye(7)[0], np.eye(7)[3]
    lin = infinitesimal_op(fields, 2 * x - 3 * y, "T")(A)
    np.testing.assert_allclose(lin, 2 * infinitesimal_op(fields, x, "T")(A)
                               - 3 * infinitesimal_op(fields, y, "T")(A), atol=1e-14)
    # at the unit, S_x is the tangent vector itself
    np.testing.assert_allclose(infinitesimal_op(fields, x, "S")(np.zeros(7)), x, atol=1e-15)
    with pytest.raises(ValueError):
        infinitesimal_op(fields, x, "P")
    with pytest.raises(ValueError):
        infinitesimal_op(fields, np.ones(3), "S")


def test_vf_commutator_properties():
    fields = action_taylor(OCT_REG)
    A = sample_ball(np.random.default_rng(8), 1, 7, 0.3)[0]
    V = infinitesimal_op(fields, np.eye(7)[1], "S")
    W = infinitesimal_op(fields, np.eye(7)[4], "T")
    assert np.max(np.abs(vf_commutator(V, V)(A))) < 1e-15
    c1 = VectorField(7, lambda A: np.ones(7), lambda A: np.zeros((7, 7)))
    c2 = VectorField(7, lambda A: np.arange(7.0), lambda A: np.zeros((7, 7)))
    assert np.array_equal(vf_commutator(c1, c2)(A), np.zeros(7))
    # Jacobi-Lie bracket against a finite-difference oracle
    oracle = (jets.fd_jacobian(W, A) @ V(A)) - (jets.fd_jacobian(V, A) @ W(A))
    assert np.max(np.abs(vf_commutator(V, W)(A) - oracle)) < 1e-8
    np.testing.assert_array_equal(operator_bracket(V, W)(A), vf_commutator(W, V)(A))
    with pytest.raises(ValueError):
        vf_commutator(V, VectorField(3, None, None))


def test_standard_bracket_is_anti_homomorphism_on_quaternions():
    fields = action_taylor(QUAT_REG)
    br = fields.loop.algebra().bracket
    A = sample_ball(np.random.default_rng(9), 1, 3, 0.3)[0]
    x, y = np.array([0.3, -0.5, 0.8]), np.array([0.1, 0.7, 0.2])
    Sx, Sy = infinitesimal_op(fields, x), infinitesimal_op(fields, y)
    Sxy = infinitesimal_op(fields, br(x, y))(A)
    assert np.max(np.abs(vf_commutator(Sx, Sy)(A) + Sxy)) < 1e-12
    assert np.max(np.abs(operator_bracket(Sx, Sy)(A) - Sxy)) < 1e-12


@pytest.mark.parametrize("act", [OCT_REG, OCT_TW, QUAT_REG], ids=lambda a: a.name)
def test_maurer_cartan(act):
    recs = gmc_residuals(act, samples=15, seed=4)
    assert all(r.passed for r in recs), [(r.name, r.max_residual) for r in recs]
    names = {r.name for r in recs}
    assert ("mc-classical:[Sx,Ty]" in names) == act.associative


@pytest.mark.parametrize("scale", [1.0, 2.0])
def test_maurer_cartan_scale_covariant(scale):
    recs = gmc_residuals(OCT_REG, samples=5, seed=5, scale=scale)
    assert all(r.passed for r in recs)


def test_coordinate_and_operator_forms_agree():
    fields = action_taylor(OCT_TW)
    A = sample_ball(np.random.default_rng(11), 1, 7, 0.3)[0]
    x, y = np.eye(7)[2], np.eye(7)[5]
    co = gmc_coordinate_terms(fields, A)
    op = gmc_operator_terms(fields, x, y, A)
    np.testing.assert_allclose(np.einsum("mjk,j,k->m", co["S"], x, y), op["a"], atol=1e-8)


def test_cross_commutator_nonzero_on_octonions_only():
    assert cross_commutator_magnitude(OCT_REG, samples=5) > 0.1
    assert cross_commutator_magnitude(QUAT_REG, samples=5) < 1e-12


def test_pattern_constant_shape():
    assert all(s in (1, -1) for _, s, _ in FIRST_ORDER_PATTERN)
