import numpy as np
import pytest
from hypothesis import given, settings

from strategies import reps
from superloc.config import DimensionError, DivergenceError, EquivarianceError
from superloc.exact import ExactValue, cq, parse_complex
from superloc.locverify import (
    apply_q,
    build_model,
    calibrate_kappa,
    check_q_squared,
    invariant_u,
    is_equivariant,
    make_equivariant_form,
    random_integrable,
    torus_derivation,
    verify_localization,
    verify_random_suite,
    verify_total_derivative,
)
from superloc.qrep import CSRep, rescale
from superloc.superalg import Coord, SuperFunction, apply_derivation, eval_origin, multiply


def model_of(*lambdas, flips=None):
    return build_model(CSRep.from_lambdas(lambdas, flips))


def test_q_field_on_generators():
    model = model_of("3i")
    z = SuperFunction.generator(1, Coord.Z, 0)
    theta = SuperFunction.generator(1, Coord.THETA, 0)
    thetabar = SuperFunction.generator(1, Coord.THETABAR, 0)
    zbar = SuperFunction.generator(1, Coord.ZBAR, 0)
    lam = parse_complex("3i")
    assert apply_q(model, z) == theta
    assert apply_q(model, theta) == z.scale(cq(0, 1) * lam)
    assert apply_q(model, thetabar) == zbar.scale(-(cq(0, 1) * lam))


def test_q_field_second_block():
    model = model_of("1", "2")
    z2 = SuperFunction.generator(2, Coord.Z, 1)
    assert apply_q(model, z2) == SuperFunction.generator(2, Coord.THETA, 1)


def test_apply_q_block_mismatch():
    with pytest.raises(DimensionError):
        apply_q(model_of("1"), SuperFunction.constant(2))


@settings(max_examples=40, deadline=None)
@given(reps(max_blocks=3, flips=True))
def test_q_squares_to_torus_action(rep):
    assert check_q_squared(build_model(rep)) == []
    assert check_q_squared(build_model(rescale(rep, "1+i"))) == []


def test_invariant_u_is_closed():
    model = model_of("1+2i", "-3i", flips=[True, False])
    for i in range(2):
        u = invariant_u(model, i)
        assert is_equivariant(model, u)
        assert apply_derivation(torus_derivation(model), u).is_zero()
        assert eval_origin(u).is_zero
    with pytest.raises(DimensionError):
        invariant_u(model, 2)


def test_witness_form():
    model = model_of("3i")
    f = make_equivariant_form(model)
    theta_thetabar = 0b11
    expected = SuperFunction(1, [(1, [0, 0], 0), (cq(1) / (cq(0, 1) * parse_complex("3i")), [0, 0], theta_thetabar)], [1])
    assert f == expected


def test_localization_single_block():
    report = verify_localization(model_of("3i"), make_equivariant_form(model_of("3i")))
    # 2π/(3i)
    assert report.lhs == ExactValue(cq(0, "-2/3"), 1)
    assert report.rhs == report.lhs
    assert report.equal
    assert report.residual.is_zero


def test_localization_u_times_witness_vanishes():
    model = model_of("3i")
    f = make_equivariant_form(model, [[0, 1]])
    report = verify_localization(model, f)
    assert report.lhs.is_zero
    assert report.rhs.is_zero
    assert report.equal


def test_localization_two_blocks():
    model = model_of("1+2i", "3i")
    report = verify_localization(model, make_equivariant_form(model))
    lam1, lam2 = parse_complex("1+2i"), parse_complex("3i")
    assert report.lhs == ExactValue(cq(4) / (lam1 * lam2), 2)
    assert report.equal


def test_localization_flipped_block():
    model = model_of("3i", flips=[True])
    report = verify_localization(model, make_equivariant_form(model, [[2, -1, 1]], ["1/2"]))
    assert report.equal


def test_localization_requires_equivariance():
    model = model_of("3i")
    with pytest.raises(EquivarianceError):
        verify_localization(model, SuperFunction.gaussian(1, [1]))


def test_equivariant_form_needs_decay():
    with pytest.raises(DivergenceError):
        make_equivariant_form(model_of("1"), [[1]], [0])
    with pytest.raises(DimensionError):
        make_equivariant_form(model_of("1"), [[1], [1]], [1, 1])


@pytest.mark.parametrize("blocks", [1, 2])
def test_total_derivatives_integrate_to_zero(blocks):
    rng = np.random.default_rng(7)
    lambdas = ["1+2i", "-3i"][:blocks]
    model = model_of(*lambdas)
    for _ in range(100):
        g = random_integrable(rng, blocks)
        assert verify_total_derivative(model, g).is_zero


def test_total_derivative_of_simple_functions():
    model = model_of("2")
    theta = SuperFunction.generator(1, Coord.THETA, 0)
    g = multiply(theta, SuperFunction.gaussian(1, [1]))
    assert verify_total_derivative(model, g).is_zero
    assert verify_total_derivative(model, SuperFunction.zero(1, [1])).is_zero


def test_perturbed_coefficients_are_detected():
    model = model_of("1-2i", "3i")
    f = make_equivariant_form(model, [[1, 1], [2, 0, 1]], ["1", "2"])
    assert is_equivariant(model, f)
    for (even, odd), c in f.terms.items():
        terms = f.terms
        terms[(even, odd)] = c + cq(1)
        perturbed = SuperFunction(f.blocks, terms, f.envelope)
        assert not is_equivariant(model, perturbed)


def test_random_suite_passes():
    report = verify_random_suite(seed=1, count=200)
    assert report.count == 200
    assert len(report.rows) == 200
    assert report.failures == 0
    assert report.ok


def test_random_suite_is_reproducible():
    a = verify_random_suite(seed=3, count=5).to_dict()
    b = verify_random_suite(seed=3, count=5).to_dict()
    assert a == b


def test_random_suite_on_fixed_rep():
    rep = CSRep.from_lambdas(["2", "5i"], [False, True])
    report = verify_random_suite(seed=0, count=10, rep=rep)
    assert report.ok
    assert {row["blocks"] for row in report.rows} == {2}


@pytest.mark.parametrize("lam", ["1", "3i", "1+2i"])
def test_calibrate_kappa(lam):
    assert calibrate_kappa(lam) == ExactValue(cq(0, 2))
