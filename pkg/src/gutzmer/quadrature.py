"""Quadrature rules on chambers, circles, group orbits and Gaussian half-lines."""
from __future__ import annotations

import enum
import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .space_model import SpaceKind, SpaceModel

__all__ = [
    "DomainTag",
    "QuadratureRule",
    "LowConfidenceWarning",
    "max_nodes",
    "gauss_legendre",
    "periodic_trapezoid",
    "halfline_gaussian",
    "radial_extent",
    "radial_rule",
    "u_grid",
    "integrate_U",
    "x_grid",
    "integrate_X",
    "converge",
]

DEFAULT_SIGMA_MULT = 12.0
DEFAULT_MAX_NODES = 2**14
OVERFLOW_LOG = 690.0


class LowConfidenceWarning(RuntimeWarning):
    """A doubling quadrature stopped at the node cap before reaching its tolerance."""


class DomainTag(enum.Enum):
    INTERVAL = "interval"
    PERIODIC = "periodic"
    HALFLINE_GAUSSIAN = "halfline_gaussian"


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain_tag: DomainTag

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")

    def __len__(self):
        return len(self.nodes)

    def __call__(self, f: Callable):
        """Integrate the vectorized callable *f*."""
        return np.dot(self.weights, f(self.nodes))


def max_nodes() -> int:
    """Node cap for doubling loops, overridable through ``GUTZMER_MAX_NODES``."""
    raw = os.environ.get("GUTZMER_MAX_NODES")
    if not raw:
        return DEFAULT_MAX_NODES
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"GUTZMER_MAX_NODES must be an integer, got {raw!r}") from None
    if value < 2:
        raise ValueError("GUTZMER_MAX_NODES must be at least 2")
    return value


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule with *n* nodes on ``[a, b]``, exact to degree ``2n-1``."""
    if n < 1:
        raise ValueError("n must be positive")
    if not a < b:
        raise ValueError("need a < b")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(a + (x + 1.0) * half, w * half, DomainTag.INTERVAL)


def periodic_trapezoid(n: int) -> QuadratureRule:
    """Equispaced rule on ``[0, 2*pi)``.

    Integrates ``e^{ik theta}`` exactly for ``|k| < n``; frequencies that are
    multiples of *n* alias onto the constant mode.
    """
    if n < 1:
        raise ValueError("n must be positive")
    nodes = 2 * math.pi * np.arange(n) / n
    return QuadratureRule(nodes, np.full(n, 2 * math.pi / n), DomainTag.PERIODIC)


def halfline_gaussian(t: float, sigma_mult: float = DEFAULT_SIGMA_MULT, n: int = 64,
                      shift: float = 0.0) -> QuadratureRule:
    """Gauss-Legendre rule on ``[0, shift + sigma_mult*sqrt(2t)]``.

    Meant for integrands carrying a factor ``e^{-y^2/(2t)}``; *shift* moves the
    cut-off past the peak of exponentially tilted integrands.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    R = shift + sigma_mult * math.sqrt(2 * t)
    rule = gauss_legendre(n, 0.0, R)
    return QuadratureRule(rule.nodes, rule.weights, DomainTag.HALFLINE_GAUSSIAN)


def radial_extent(space: SpaceModel, t: float, lmax: int,
                  sigma_mult: float = DEFAULT_SIGMA_MULT) -> float:
    """Truncation radius for ``int |F|^2 p_t J dH`` with F of band ``lmax``.

    The integrand peaks near ``2t(lmax + rho + m_alpha)``; the radius adds
    *sigma_mult* Gaussian widths beyond that.
    """
    return 2 * t * (lmax + space.rho + space.mult_alpha + 1) + sigma_mult * math.sqrt(2 * t)


def radial_rule(space: SpaceModel, t: float, lmax: int, n: int,
                sigma_mult: float = DEFAULT_SIGMA_MULT) -> QuadratureRule:
    """Rule for the radial variable of X_C.

    The circle's chamber is the whole line; its rule joins two copies of the
    half-line rule so that nodes cluster at ``H = 0``, where small-time
    kernels concentrate.
    """
    R = radial_extent(space, t, lmax, sigma_mult)
    # beyond this radius the band-lmax basis itself overflows double precision
    R_safe = OVERFLOW_LOG / (lmax + 1)
    if R > R_safe:
        peak = 2 * t * (lmax + space.rho + space.mult_alpha)
        if R_safe < peak + 8 * math.sqrt(t):
            warnings.warn(f"radial cut-off {R_safe:.3g} truncates the Gaussian mass for lmax={lmax}, t={t}",
                          LowConfidenceWarning, stacklevel=2)
        R = R_safe
    if space.two_sided:
        half = gauss_legendre(max(1, n // 2), 0.0, R)
        nodes = np.concatenate([-half.nodes[::-1], half.nodes])
        weights = np.concatenate([half.weights[::-1], half.weights])
        return QuadratureRule(nodes, weights, DomainTag.HALFLINE_GAUSSIAN)
    rule = gauss_legendre(n, 0.0, R)
    return QuadratureRule(rule.nodes, rule.weights, DomainTag.HALFLINE_GAUSSIAN)


def u_grid(space: SpaceModel, n: int, n_beta: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Tensor grid on U with normalized Haar weights.

    Returns coordinates of shape ``(npts, dim_U_orbit_coords)`` and weights
    summing to one. SPHERE2 uses ZYZ Euler angles ``(alpha, beta, gamma)`` with
    ``n`` trapezoid nodes in each of ``alpha``, ``gamma`` and ``n_beta``
    (default ``n``) Gauss-Legendre nodes in ``cos beta``; SU2_ZONAL uses the
    disk coordinates ``(x0, x1)``, whose image of Haar measure on SU(2) is
    uniform on the disk.
    """
    if space.kind is SpaceKind.CIRCLE:
        tr = periodic_trapezoid(n)
        return tr.nodes[:, None], tr.weights / (2 * math.pi)
    if space.kind is SpaceKind.SPHERE2:
        tr = periodic_trapezoid(n)
        gl = gauss_legendre(n if n_beta is None else n_beta, -1.0, 1.0)
        a, c, g = np.meshgrid(tr.nodes, gl.nodes, tr.nodes, indexing="ij")
        w = np.einsum("i,j,k->ijk", tr.weights, gl.weights, tr.weights) / (8 * math.pi**2)
        coords = np.stack([a.ravel(), np.arccos(c.ravel()), g.ravel()], axis=1)
        return coords, w.ravel()
    gl = gauss_legendre(n, 0.0, 1.0)
    tr = periodic_trapezoid(2 * n)
    rad, ang = np.meshgrid(gl.nodes, tr.nodes, indexing="ij")
    w = np.outer(gl.weights * gl.nodes, tr.weights) / math.pi
    coords = np.stack([(rad * np.cos(ang)).ravel(), (rad * np.sin(ang)).ravel()], axis=1)
    return coords, w.ravel()


def integrate_U(space: SpaceModel, f: Callable, n: int = 24):
    """Normalized Haar integral of ``f(*u_coords)`` over U.

    *f* receives one array per coordinate (see :func:`u_grid`).
    """
    coords, w = u_grid(space, n)
    return np.dot(w, f(*coords.T))


def x_grid(space: SpaceModel, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid on X with normalized invariant measure.

    CIRCLE: ``theta``; SPHERE2: ``(theta, phi)`` polar angles; SU2_ZONAL: the
    geodesic angle ``theta`` only (class functions, Weyl integration formula).
    """
    if space.kind is SpaceKind.CIRCLE:
        tr = periodic_trapezoid(n)
        return tr.nodes[:, None], tr.weights / (2 * math.pi)
    if space.kind is SpaceKind.SPHERE2:
        gl = gauss_legendre(n, -1.0, 1.0)
        tr = periodic_trapezoid(2 * n)
        c, p = np.meshgrid(gl.nodes, tr.nodes, indexing="ij")
        w = np.outer(gl.weights, tr.weights) / (4 * math.pi)
        return np.stack([np.arccos(c.ravel()), p.ravel()], axis=1), w.ravel()
    gl = gauss_legendre(n, 0.0, math.pi)
    return gl.nodes[:, None], gl.weights * np.sin(gl.nodes) ** 2 * 2 / math.pi


def integrate_X(space: SpaceModel, f: Callable, n: int = 64):
    coords, w = x_grid(space, n)
    return np.dot(w, f(*coords.T))


def converge(fn: Callable[[int], "float | np.ndarray"], n0: int = 32, rtol: float = 1e-9,
             atol: float = 0.0, nmax: int | None = None, label: str = "quadrature"):
    """Double the node count until two successive values agree.

    Returns ``(value, n, converged)``. When the cap is reached a
    :class:`LowConfidenceWarning` is emitted and the last value is returned.
    """
    nmax = max_nodes() if nmax is None else nmax
    n = max(1, min(n0, nmax))
    prev = np.asarray(fn(n))
    while True:
        if 2 * n > nmax:
            warnings.warn(f"{label}: no convergence to rtol={rtol:g} by n={n}",
                          LowConfidenceWarning, stacklevel=2)
            return prev, n, False
        n *= 2
        cur = np.asarray(fn(n))
        scale = np.max(np.abs(cur)) if cur.size else 0.0
        if np.max(np.abs(cur - prev), initial=0.0) <= rtol * scale + atol:
            return cur, n, True
        prev = cur
