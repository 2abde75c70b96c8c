import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gutzmer import make_space
from gutzmer.heat_kernels import WeightFamily, WeightFunction, find_delta_star
from gutzmer.quadrature import x_grid
from gutzmer.reports import Verdict
from gutzmer.sobolev import (
    MembershipVerdict,
    SobolevOrder,
    bergman_norm_predicted,
    bergman_norm_sq,
    bergman_norms_sq,
    duality_pairing,
    holo_sobolev_norm_sq,
    membership_test,
    sobolev_norm_sq,
    weight_multiplier,
)
from gutzmer.space_model import dimension, eigenvalue
from gutzmer.transform import SpectralCoeffs, bargmann_forward, holo_fourier_coeffs, stenzel_constant, synthesize


def test_order_must_be_finite():
    with pytest.raises(ValueError):
        SobolevOrder(math.nan)
    with pytest.raises(ValueError):
        sobolev_norm_sq(SpectralCoeffs.zeros(make_space("circle"), 1), math.inf)


def test_zero_order_norm_is_l2_norm(space, rng):
    c = SpectralCoeffs.random(space, 5, rng)
    coords, w = x_grid(space, 64)
    l2 = float(np.dot(w, np.abs(synthesize(c, coords)) ** 2))
    assert sobolev_norm_sq(c, 0) == pytest.approx(l2, rel=1e-12)


@given(st.floats(-4, 4), st.floats(0.01, 3))
def test_sobolev_norm_increases_with_order(s, ds):
    sp = make_space("sphere2")
    c = SpectralCoeffs.random(sp, 6, np.random.default_rng(7))
    assert sobolev_norm_sq(c, s + ds) > sobolev_norm_sq(c, s)


def test_sobolev_norm_single_mode(space):
    lam = 3
    c = SpectralCoeffs.from_function(space, 4, lambda l, j: (l == lam) * (j == 1) * 1.0)
    expected = dimension(space, lam) * (1 + eigenvalue(space, lam)) ** 1.5
    assert sobolev_norm_sq(c, 1.5) == pytest.approx(expected, rel=1e-14)


def test_holo_sobolev_norm_from_coefficients(space, rng):
    t = 0.3
    image = bargmann_forward(SpectralCoeffs.random(space, 3, rng), t)
    tilde = holo_fourier_coeffs(space, image, t, 3)
    for s in (-1.0, 0.0, 2.0):
        assert holo_sobolev_norm_sq(tilde, s, t) == pytest.approx(holo_sobolev_norm_sq(image, s), rel=1e-8)
    with pytest.raises(ValueError):
        holo_sobolev_norm_sq(tilde, 0.0)


def test_weight_multipliers(space):
    t = 0.2
    lam = np.arange(5)
    a = eigenvalue(space, lam)
    assert np.all(weight_multiplier(WeightFunction(WeightFamily.PT, space, t), lam) == 1)
    assert np.allclose(weight_multiplier(WeightFunction(WeightFamily.WM, space, t, 2), lam), (1 + a) ** 2)
    assert np.allclose(weight_multiplier(WeightFunction(WeightFamily.WM_DELTA, space, t, 2, 0.5), lam), 0.5 + a**2)
    # s = 1: the Riemann-Liouville integral of e^{r b} over [0, 2t] is (e^{2tb} - 1)/b
    expected = np.exp(2 * t * (space.rho**2 - a)) * np.expm1(2 * t * (1 + a)) / (1 + a)
    assert np.allclose(weight_multiplier(WeightFunction(WeightFamily.W_NEG, space, t, 1.0), lam), expected,
                       rtol=1e-13)


def test_predicted_norm_requires_matching_time(space, rng):
    image = bargmann_forward(SpectralCoeffs.random(space, 2, rng), 0.3)
    with pytest.raises(ValueError):
        bergman_norm_predicted(image, WeightFunction(WeightFamily.PT, space, 0.4))


@pytest.mark.parametrize("family, order", [
    (WeightFamily.PT, 0), (WeightFamily.WM, 1), (WeightFamily.WM, 2),
    (WeightFamily.WM_DELTA, 1), (WeightFamily.W_NEG, 1.0),
])
def test_bergman_norm_matches_spectral_prediction(space, rng, family, order):
    t, lmax = 0.25, 3
    image = bargmann_forward(SpectralCoeffs.random(space, lmax, rng), t)
    delta = find_delta_star(space, t, order) if family is WeightFamily.WM_DELTA else 0.0
    w = WeightFunction(family, space, t, order, delta)
    value, report = bergman_norm_sq(image, w, lmax)
    assert report.verdict is Verdict.PASS
    assert value == pytest.approx(bergman_norm_predicted(image, w), rel=1e-7)
    if w.signed:
        parts = report.fitted_constants
        assert parts["positive_part"] - parts["negative_part"] == pytest.approx(value, rel=1e-9)


def test_batched_norms_match_single(space, rng):
    t = 0.25
    images = [bargmann_forward(SpectralCoeffs.random(space, l, rng), t) for l in (1, 3)]
    w = WeightFunction(WeightFamily.PT, space, t)
    values, ok = bergman_norms_sq(images, w, 3)
    assert ok
    for v, im in zip(values, images):
        assert v == pytest.approx(bergman_norm_sq(im, w, 3)[0], rel=1e-9)


def test_stenzel_ratio_is_constant(space, rng):
    t = 0.25
    images = [bargmann_forward(SpectralCoeffs.random(space, 3, rng), t) for _ in range(3)]
    values, _ = bergman_norms_sq(images, WeightFunction(WeightFamily.PT, space, t), 3)
    ratios = values / [sobolev_norm_sq(im.preimage(), 0) for im in images]
    assert np.allclose(ratios, stenzel_constant(space, t), rtol=1e-8)


def test_duality_pairing_polarizes_stenzel(space, rng):
    t = 0.25
    f, g = SpectralCoeffs.random(space, 3, rng), SpectralCoeffs.random(space, 3, rng)
    pairing = duality_pairing(bargmann_forward(f, t), bargmann_forward(g, t), t, space, 3)
    expected = stenzel_constant(space, t) * np.sum(dimension(space, f.lams) * f.data * np.conj(g.data))
    assert pairing == pytest.approx(expected, rel=1e-8)


def test_membership_verdicts(space):
    t, lmax = 0.25, 32
    smooth = bargmann_forward(SpectralCoeffs.from_function(
        space, lmax, lambda l, j: np.exp(-t * eigenvalue(space, l))), t)
    assert membership_test(smooth, 3.0, t, lmax).verdict is MembershipVerdict.CONVERGED
    delta = bargmann_forward(SpectralCoeffs.from_function(space, lmax, lambda l, j: np.ones(np.shape(l))), t)
    assert membership_test(delta, 0.0, t, lmax).verdict is MembershipVerdict.GROWING
    order = -(2 * space.mult_alpha + 4)
    assert membership_test(delta, order, t, lmax).verdict is MembershipVerdict.CONVERGED


def test_membership_needs_space_for_callables():
    sp = make_space("circle")
    image = bargmann_forward(SpectralCoeffs.zeros(sp, 2), 0.2)
    with pytest.raises(ValueError):
        membership_test(lambda u, h: image(u, h), 0.0, 0.2, 2)
