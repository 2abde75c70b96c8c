import numpy as np
import pytest

from gutzmer import make_space
from gutzmer.diagnostics import (
    BUILTIN_INPUTS,
    GrowthVerdict,
    builtin_image,
    classify,
    defining_property_check,
    delta_star_check,
    derivative_bound_check,
    distribution_image_classifier,
    duality_check,
    gutzmer_check,
    gutzmer_series,
    growth_profile,
    holo_fourier_check,
    isometry_check,
    membership_check,
    negative_order_check,
    reproducing_kernel_check,
    run_suite,
    sandwich_check,
    smooth_image_classifier,
    stenzel_check,
    sufficiency_parameters,
    u_samples,
)
from gutzmer.reports import Verdict
from gutzmer.transform import BargmannImage, SpectralCoeffs, bargmann_forward, stenzel_constant

T = 0.25


def test_circle_gutzmer_series_oracle():
    sp = make_space("circle")
    # slot 1 of label n is e^{inz}, slot 2 is e^{-inz}
    c = SpectralCoeffs.from_ragged(sp, [[0.0], [0.0, 0.0], [2.0, 1.0]])
    H = np.array([-0.3, 0.0, 0.5])
    expected = 4 * np.exp(-4 * H) + np.exp(4 * H)
    assert np.allclose(gutzmer_series(BargmannImage(c, T), H), expected, rtol=1e-14)


def test_gutzmer_identity(space, rng):
    image = bargmann_forward(SpectralCoeffs.random(space, 6, rng), T)
    n = 16 if space.name == "SPHERE2" else None
    assert gutzmer_check(image, np.linspace(0, 1.0, 5), n).passed


def test_defining_property(space):
    assert defining_property_check(space, T, 6).passed


def test_stenzel_constant_fits_derived_value(space):
    rep = stenzel_check(space, T, 3, n_functions=4)
    assert rep.passed
    assert rep.fitted_constants["derived_rel_error"] < 1e-8
    assert rep.fitted_constants["c_t_derived"] == stenzel_constant(space, T)


def test_holo_fourier_identity(space):
    assert holo_fourier_check(space, T, 3).passed


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_sandwich(s):
    rep = sandwich_check(T, s)
    assert rep.passed and rep.fitted_constants["monotone"]


def test_delta_star_and_derivative_bounds(space):
    assert delta_star_check(space, T, 1).passed
    for m in range(3):
        assert derivative_bound_check(space, T, m).passed


def test_sobolev_structure_small(space):
    assert isometry_check(space, T, 3).passed
    assert duality_check(space, T, 3).passed
    assert negative_order_check(space, T, 3, 1.0).passed
    assert all(r.passed for r in membership_check(space, T))


@pytest.mark.parametrize("m", [1, 2])
def test_circle_reproducing_kernel(m):
    assert reproducing_kernel_check(T, m, y_values=(0.0, 1.0)).passed


def test_reproducing_kernel_needs_positive_order():
    with pytest.raises(ValueError):
        reproducing_kernel_check(T, 0)


def test_sufficiency_parameters():
    d = {name: sufficiency_parameters(make_space(name))["d"] for name in ("circle", "sphere2", "su2")}
    assert d == {"circle": 3, "sphere2": 5, "su2": 7}


def test_u_samples_include_identity(space):
    u = u_samples(space, 32)
    identity = {"CIRCLE": [0.0], "SPHERE2": [0.0, 0.0, 0.0], "SU2_ZONAL": [1.0, 0.0]}[space.kind.name]
    assert np.array_equal(u[0], identity)
    assert np.array_equal(u, u_samples(space, 32))


@pytest.mark.parametrize("name, label", [
    ("delta", "DISTRIBUTION"), ("gaussian-coeff", "SMOOTH"), ("super-growth", "UNBOUNDED"), ("random", "SMOOTH"),
])
def test_builtin_inputs_classify(space, name, label):
    lmax = 24 if space.name == "SPHERE2" else 48
    out = classify(builtin_image(name, space, T, lmax if name != "random" else 6), T)
    assert out["label"] == label


def test_classifiers_agree_with_profile():
    sp = make_space("circle")
    image = builtin_image("delta", sp, T, 48)
    profile = growth_profile(image, T)
    assert smooth_image_classifier(image, T, profile=profile).verdict is GrowthVerdict.NOT_SMOOTH
    dist = distribution_image_classifier(image, T, profile=profile)
    assert dist.verdict is GrowthVerdict.DISTRIBUTION_CONSISTENT and dist.order_estimate <= 2


def test_growth_profile_needs_space_for_callables():
    with pytest.raises(ValueError):
        growth_profile(lambda u, h: np.ones(len(u)), T)


def test_unknown_names():
    sp = make_space("circle")
    assert set(BUILTIN_INPUTS) == {"delta", "gaussian-coeff", "super-growth", "random"}
    with pytest.raises(ValueError):
        builtin_image("comb", sp, T, 8)
    with pytest.raises(ValueError):
        run_suite("everything", sp, T, 8)


def test_node_cap_downgrades_to_low_confidence(monkeypatch):
    monkeypatch.setenv("GUTZMER_MAX_NODES", "32")
    rep = defining_property_check(make_space("su2"), T, 4)
    assert rep.verdict is Verdict.LOW_CONFIDENCE and rep.notes


def test_suite_is_deterministic():
    sp = make_space("su2")
    first = [r.to_dict(include_runtime=False) for r in run_suite("stenzel", sp, T, 4, seed=3)]
    second = [r.to_dict(include_runtime=False) for r in run_suite("stenzel", sp, T, 4, seed=3)]
    assert first == second
