import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gutzmer import SpaceKind, make_space
from gutzmer.quadrature import integrate_X
from gutzmer.space_model import (
    SpectralIndex,
    dimension,
    eigenvalue,
    jacobian_J,
    jacobian_J0,
    jacobian_J1,
    phi_factor,
    root_product,
    slot_count,
    slot_index,
)
from gutzmer.special_functions import basis_values, x_to_u


@pytest.mark.parametrize("name, rho, m", [("circle", 0.0, 0), ("sphere2", 0.5, 1), ("su2", 1.0, 2)])
def test_space_constants(name, rho, m):
    sp = make_space(name)
    assert sp.rho == rho and sp.mult_alpha == m


def test_parse_accepts_names_and_members():
    assert make_space("SPHERE2").kind is SpaceKind.SPHERE2
    assert make_space(SpaceKind.SU2_ZONAL).kind is SpaceKind.SU2_ZONAL
    with pytest.raises(ValueError):
        make_space("torus")


def test_sphere_eigenvalue_matches_laplacian():
    sp = make_space("sphere2")
    for l in range(6):
        assert eigenvalue(sp, l) == pytest.approx(l * (l + 1) + 0.25)


def test_su2_eigenvalue_matches_casimir():
    # the character of the (l+1)-dimensional representation has Casimir l(l+2)
    sp = make_space("su2")
    for l in range(6):
        assert eigenvalue(sp, l) == pytest.approx(l * (l + 2) + 1)


def test_slot_counts():
    assert [slot_count(make_space("circle"), l) for l in range(3)] == [1, 2, 2]
    assert [slot_count(make_space("sphere2"), l) for l in range(3)] == [1, 3, 5]
    assert [slot_count(make_space("su2"), l) for l in range(3)] == [1, 1, 1]


@pytest.mark.parametrize("name", ["circle", "sphere2", "su2"])
def test_plancherel_weight_matches_norm(name):
    # ||phi_j^l||^2 = 1 / d_l under the normalized measure on X
    sp = make_space(name)
    lmax = 5
    n = 24

    def f(*x):
        coords = np.stack(x, axis=1)
        vals = basis_values(sp, lmax, x_to_u(sp, coords), 0.0)
        return np.abs(vals) ** 2

    norms = integrate_X(sp, f, n)
    lams, _ = slot_index(sp, lmax)
    np.testing.assert_allclose(norms, 1.0 / dimension(sp, lams), rtol=1e-12)


@given(st.integers(0, 40), st.sampled_from(["circle", "sphere2", "su2"]))
def test_slot_index_enumerates_blocks(lmax, name):
    sp = make_space(name)
    lams, js = slot_index(sp, lmax)
    assert lams.size == sum(slot_count(sp, l) for l in range(lmax + 1))
    assert np.all(np.diff(lams) >= 0)
    for l in range(lmax + 1):
        assert list(js[lams == l]) == list(range(1, slot_count(sp, l) + 1))


def test_spectral_index_check():
    sp = make_space("sphere2")
    SpectralIndex(2, 5).check(sp)
    with pytest.raises(IndexError):
        SpectralIndex(2, 6).check(sp)
    with pytest.raises(IndexError):
        SpectralIndex(-1, 1).check(sp)


@given(st.floats(0.0, 3.0), st.sampled_from(["circle", "sphere2", "su2"]))
def test_jacobian_identities(H, name):
    sp = make_space(name)
    assert jacobian_J1(sp, 2 * H) == pytest.approx(float(jacobian_J(sp, H)), rel=1e-12, abs=1e-300)
    # Phi * J1 = prod (alpha, H)^m
    assert float(phi_factor(sp, H) * jacobian_J1(sp, H)) == pytest.approx(
        float(root_product(sp, H)), rel=1e-12, abs=1e-15)


def test_jacobian_J0_is_sine_power():
    sp = make_space("su2")
    H = np.linspace(0, math.pi, 7)
    np.testing.assert_allclose(jacobian_J0(sp, H), np.sin(H) ** 2)


def test_phi_factor_large_argument_is_finite():
    sp = make_space("su2")
    assert 0.0 <= float(phi_factor(sp, 1000.0)) < 1e-300
