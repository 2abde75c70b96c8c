"""Fourier analysis on X, the heat kernel transform and holomorphic Fourier coefficients.

Functions on X_C are passed around as callables ``F(u, H)`` taking an array of
u-coordinates of shape ``(npts, dim_U_orbit_coords)`` and radial coordinates
of shape ``(npts,)``. :class:`BargmannImage` is one such callable.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .heat_kernels import TruncationInsufficient, compensated_dt
from .quadrature import LowConfidenceWarning, converge, max_nodes, radial_rule, u_grid, x_grid
from .space_model import (
    SpaceKind,
    SpaceModel,
    dimension,
    dual_volume,
    eigenvalue,
    jacobian_J,
    slot_count,
    slot_index,
)
from .special_functions import ComplexPoint, basis_values, radial_spherical, x_to_u

__all__ = [
    "SpectralCoeffs",
    "BargmannImage",
    "analyze",
    "synthesize",
    "bargmann_forward",
    "holo_eval",
    "holo_fourier_coeffs",
    "stenzel_constant",
    "default_u_nodes",
    "orbit_integrals",
]


@dataclass(frozen=True)
class SpectralCoeffs:
    """Coefficients ``c[lambda][j]`` stored flat in the order of :func:`slot_index`.

    Examples
    --------
    >>> from gutzmer.space_model import make_space
    >>> c = SpectralCoeffs.zeros(make_space("circle"), 2)
    >>> [len(block) for block in c.ragged()]
    [1, 2, 2]
    """

    space: SpaceModel
    lmax: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lmax < 0:
            raise ValueError("lmax must be nonnegative")
        data = np.array(self.data, dtype=complex).ravel()
        expected = slot_index(self.space, self.lmax)[0].size
        if data.size != expected:
            raise ValueError(f"{self.space.name} with lmax={self.lmax} has {expected} slots, got {data.size}")
        if not np.all(np.isfinite(data)):
            raise ValueError("coefficients must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, space: SpaceModel, lmax: int) -> "SpectralCoeffs":
        return cls(space, lmax, np.zeros(slot_index(space, lmax)[0].size, dtype=complex))

    @classmethod
    def from_ragged(cls, space: SpaceModel, blocks) -> "SpectralCoeffs":
        blocks = [np.atleast_1d(np.asarray(b, dtype=complex)) for b in blocks]
        if not blocks:
            raise ValueError("need at least one spectral block")
        for lam, b in enumerate(blocks):
            if b.size != slot_count(space, lam):
                raise ValueError(
                    f"block lambda={lam} has {b.size} entries, expected {slot_count(space, lam)}")
        return cls(space, len(blocks) - 1, np.concatenate(blocks))

    @classmethod
    def from_function(cls, space: SpaceModel, lmax: int, fn: Callable) -> "SpectralCoeffs":
        """Fill slot ``(lam, j)`` with ``fn(lam, j)`` (vectorized over flat arrays)."""
        lams, js = slot_index(space, lmax)
        return cls(space, lmax, np.broadcast_to(fn(lams, js), lams.shape))

    @classmethod
    def random(cls, space: SpaceModel, lmax: int, rng: np.random.Generator,
               decay: float = 0.0) -> "SpectralCoeffs":
        """Gaussian random coefficients scaled by ``(1 + a)^{-decay/2}``."""
        lams, _ = slot_index(space, lmax)
        z = rng.standard_normal(lams.size) + 1j * rng.standard_normal(lams.size)
        return cls(space, lmax, z * (1 + eigenvalue(space, lams)) ** (-decay / 2))

    @property
    def lams(self) -> np.ndarray:
        return slot_index(self.space, self.lmax)[0]

    @property
    def js(self) -> np.ndarray:
        return slot_index(self.space, self.lmax)[1]

    def ragged(self) -> list[np.ndarray]:
        splits = np.cumsum([slot_count(self.space, lam) for lam in range(self.lmax)])
        return np.split(self.data, splits)

    def slot(self, lam: int, j: int) -> complex:
        if not 0 <= lam <= self.lmax or not 1 <= j <= slot_count(self.space, lam):
            raise IndexError(f"no slot (lambda={lam}, j={j}) with lmax={self.lmax}")
        idx = np.flatnonzero((self.lams == lam) & (self.js == j))[0]
        return complex(self.data[idx])

    def block_norms_sq(self) -> np.ndarray:
        """``||A_lambda||^2 = sum_j |c_j(lambda)|^2`` for each label."""
        return np.bincount(self.lams, weights=np.abs(self.data) ** 2, minlength=self.lmax + 1)

    def with_data(self, data) -> "SpectralCoeffs":
        return SpectralCoeffs(self.space, self.lmax, data)

    def scaled(self, per_lambda) -> "SpectralCoeffs":
        """Multiply each slot by ``per_lambda[lam]``."""
        return self.with_data(self.data * np.asarray(per_lambda)[self.lams])

    def truncated(self, lmax: int) -> "SpectralCoeffs":
        lmax = min(lmax, self.lmax)
        return SpectralCoeffs(self.space, lmax, self.data[: slot_index(self.space, lmax)[0].size])

    def padded(self, lmax: int) -> "SpectralCoeffs":
        if lmax <= self.lmax:
            return self.truncated(lmax)
        data = np.zeros(slot_index(self.space, lmax)[0].size, dtype=complex)
        data[: self.data.size] = self.data
        return SpectralCoeffs(self.space, lmax, data)


def _weighted(coeffs: SpectralCoeffs) -> np.ndarray:
    return dimension(coeffs.space, coeffs.lams) * coeffs.data


@dataclass(frozen=True)
class BargmannImage:
    """Coefficients of ``F = f * gamma_t`` (the factor ``e^{-t a}`` already applied).

    ``preimage_log_tail``, when given, maps labels beyond ``lmax`` to
    ``log ||A_lambda(f)||`` of the preimage. Holomorphic evaluation then
    checks the neglected tail, and :meth:`diverges_at` can tell where the
    full series stops converging. Without it the image is bandlimited.
    """

    coeffs: SpectralCoeffs
    t: float
    preimage_log_tail: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")

    @property
    def space(self) -> SpaceModel:
        return self.coeffs.space

    @property
    def lmax(self) -> int:
        return self.coeffs.lmax

    def preimage(self) -> SpectralCoeffs:
        """The coefficients ``f_hat`` of the preimage."""
        return self.coeffs.scaled(np.exp(self.t * eigenvalue(self.space, np.arange(self.lmax + 1))))

    def _tail_logs(self, H: float, lam: np.ndarray) -> np.ndarray:
        slots = np.array([slot_count(self.space, l) for l in lam])
        return (np.log(dimension(self.space, lam) * np.sqrt(slots))
                + np.asarray(self.preimage_log_tail(lam), dtype=float)
                - self.t * eigenvalue(self.space, lam) + lam * abs(H))

    def tail_bound(self, H: float, count: int = 400) -> float:
        """Majorant of the terms with ``lambda > lmax`` at radius H (``inf`` if divergent)."""
        if self.preimage_log_tail is None:
            return 0.0
        if self.diverges_at(H):
            return math.inf
        logs = self._tail_logs(H, np.arange(self.lmax + 1, self.lmax + 1 + count))
        top = logs.max()
        return float(np.exp(top) * np.sum(np.exp(logs - top)))

    def diverges_at(self, H: float, far: int = 1000) -> bool:
        """True when the tail model's terms still grow ``far`` labels past ``lmax``."""
        if self.preimage_log_tail is None:
            return False
        lam = np.array([self.lmax + far, self.lmax + 2 * far])
        logs = self._tail_logs(H, lam)
        return bool(logs[1] >= logs[0])

    def majorant(self, H) -> np.ndarray:
        """Upper bound for ``|F(u exp H)|`` uniform in u.

        Uses ``|phi_j^lambda(u exp H)| <= phi_lambda(exp H)`` and Cauchy-Schwarz
        over the slots; on the circle ``phi_lambda`` is replaced by ``e^{n|H|}``.
        """
        H = np.atleast_1d(np.asarray(H, dtype=float))
        lam = np.arange(self.lmax + 1)
        slots = np.array([slot_count(self.space, l) for l in lam])
        amp = dimension(self.space, lam) * np.sqrt(self.coeffs.block_norms_sq() * slots)
        if self.space.kind is SpaceKind.CIRCLE:
            # each of e^{+-in z} alone reaches e^{n|H|}, twice cosh(nH) minus a little
            growth = np.exp(np.outer(np.abs(H), lam))
        else:
            growth = radial_spherical(self.space, lam[None, :], np.abs(H)[:, None])
        return growth @ amp

    def __call__(self, u, H, check_tail: bool = False, rtol: float = 1e-10) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        H = np.broadcast_to(np.asarray(H, dtype=float), (u.shape[0],))
        vals = basis_values(self.space, self.lmax, u, H) @ _weighted(self.coeffs)
        if check_tail and self.preimage_log_tail is not None:
            for h in np.unique(np.abs(H)):
                tail = self.tail_bound(h)
                if tail > rtol * float(self.majorant(h)[0]):
                    raise TruncationInsufficient(
                        f"series tail {tail:.3g} at |H|={h:g} too large for lmax={self.lmax}")
        return vals


def default_u_nodes(space: SpaceModel, band: int) -> int:
    """Grid size on U integrating products of two band-``band`` functions exactly."""
    if space.kind is SpaceKind.SU2_ZONAL:
        return band + 2
    return 2 * band + 2


def _x_nodes_cap(space: SpaceModel) -> int:
    cap = max_nodes()
    return min(cap, 256) if space.kind is SpaceKind.SPHERE2 else cap


def analyze(space: SpaceModel, f: Callable, lmax: int, n: int | None = None,
            rtol: float = 1e-12, return_defect: bool = False):
    """Fourier coefficients ``f_hat_j(lambda)`` for ``lambda <= lmax``.

    *f* receives one array per X coordinate (see :func:`gutzmer.quadrature.x_grid`).
    With *n* the grid size is fixed; otherwise it doubles from ``lmax + 2``
    until the coefficients and ``||f||^2`` settle to *rtol*.

    Returns the coefficients, and with ``return_defect`` also the Plancherel
    defect ``||f||^2 - sum d_lambda sum_j |f_hat_j|^2``.
    """
    lams, _ = slot_index(space, lmax)

    def compute(nn):
        coords, w = x_grid(space, nn)
        vals = np.asarray(f(*coords.T), dtype=complex)
        basis = basis_values(space, lmax, x_to_u(space, coords), 0.0)
        return np.concatenate([(w * vals) @ np.conj(basis), [np.dot(w, np.abs(vals) ** 2)]])

    if n is None:
        n0 = max(4, lmax + 2)
        out, _, _ = converge(compute, n0=n0, rtol=rtol, nmax=max(_x_nodes_cap(space), 2 * n0),
                             label="analyze")
    else:
        out = compute(n)
    coeffs = SpectralCoeffs(space, lmax, out[:-1])
    if not return_defect:
        return coeffs
    defect = float(out[-1].real - np.sum(dimension(space, lams) * np.abs(coeffs.data) ** 2))
    return coeffs, defect


def synthesize(coeffs: SpectralCoeffs, x) -> np.ndarray:
    """Finite Fourier series ``sum d_lambda sum_j c_j(lambda) phi_j^lambda(x)`` at real points."""
    u = x_to_u(coeffs.space, x)
    return basis_values(coeffs.space, coeffs.lmax, u, 0.0) @ _weighted(coeffs)


def bargmann_forward(coeffs: SpectralCoeffs, t: float, preimage_log_tail=None) -> BargmannImage:
    """Heat kernel transform: multiply label ``lambda`` by ``e^{-t |lambda + rho|^2}``."""
    if not t > 0:
        raise ValueError("t must be positive")
    decay = np.exp(-t * eigenvalue(coeffs.space, np.arange(coeffs.lmax + 1)))
    return BargmannImage(coeffs.scaled(decay), float(t), preimage_log_tail)


def holo_eval(image: BargmannImage, z, rtol: float = 1e-10):
    """Holomorphic extension ``F(z) = sum d_lambda sum_j c_j(lambda) phi_j^lambda(z)``.

    *z* is a :class:`ComplexPoint` or a pair ``(u, H)`` of arrays. Raises
    :class:`TruncationInsufficient` when the image carries a tail model and
    the neglected terms exceed ``rtol`` times the majorant of the partial sum.
    """
    if isinstance(z, ComplexPoint):
        z.validate(image.space)
        return complex(image([z.u_coords], z.H, check_tail=True, rtol=rtol)[0])
    u, H = z
    return image(u, H, check_tail=True, rtol=rtol)


def stenzel_constant(space: SpaceModel, t: float) -> float:
    """``c_t`` with ``int_{X_C} |f * gamma_t|^2 p_t dm = c_t ||f||^2``.

    ``dm = J(H) dg dH`` with normalized Haar measure and Lebesgue ``dH``;
    ``c_t = e^{-2 t rho^2} / (2 c1)`` where ``c1`` is the dual-space radial
    volume factor of the chamber (1 for the circle, whose chamber is the line).
    """
    c1 = 1.0 if space.two_sided else dual_volume(space)
    return math.exp(-2 * t * space.rho**2) / (2 * c1)


def orbit_integrals(space: SpaceModel, F: Callable, H: np.ndarray, n_u: int,
                    lmax: int | None = None, G: Callable | None = None, radial_weight=None):
    """Normalized U-averages on the orbits through ``exp(H_k) o``.

    Returns ``rw_k mean |F|^2`` per radius, or ``rw_k mean F conj(G)`` when
    *G* is given, and with *lmax* also the matrix ``rw_k mean F conj(phi_j^lambda)``
    of shape ``(len(H), nslots)``. The nonnegative ``radial_weight`` (default 1)
    is applied before squaring so that large values of ``|F|`` meeting small
    weights do not overflow. *F* may return one column per function, giving
    one output column each.

    On SPHERE2 the grid has ``n_u // 2 + 1`` nodes in ``cos beta``: the
    trapezoid rules in ``alpha`` and ``gamma`` leave only the zonal parts
    ``P_l(cos beta)``, ``l <= 2 band``, which that many Gauss nodes integrate
    exactly when ``n_u > 2 band``.
    """
    n_beta = n_u // 2 + 1 if space.kind is SpaceKind.SPHERE2 else None
    coords, w = u_grid(space, n_u, n_beta)
    H = np.atleast_1d(np.asarray(H, dtype=float))
    rw = np.ones(H.size) if radial_weight is None else np.asarray(radial_weight, dtype=float)
    quad = proj = None
    for k, h in enumerate(H):
        hs = np.full(len(coords), h)
        root = math.sqrt(rw[k])
        vals = root * np.asarray(F(coords, hs), dtype=complex)
        if quad is None:
            quad = np.zeros((H.size,) + vals.shape[1:], dtype=complex)
            if lmax is not None:
                proj = np.zeros((H.size, slot_index(space, lmax)[0].size) + vals.shape[1:], dtype=complex)
        if rw[k] == 0:
            continue
        other = vals if G is None else root * np.asarray(G(coords, hs), dtype=complex)
        quad[k] = w @ (vals * np.conj(other))
        if proj is not None:
            proj[k] = np.conj(basis_values(space, lmax, coords, h)).T @ (root * w.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals)
    if G is None:
        quad = quad.real
    return quad if proj is None else (quad, proj)


def holo_fourier_coeffs(space: SpaceModel, F: Callable, t: float, lmax: int,
                        band: int | None = None, n_u: int | None = None,
                        rtol: float = 1e-9, n0: int = 32) -> SpectralCoeffs:
    """Holomorphic Fourier coefficients ``F~_j(lambda) = int F conj(phi_j^lambda) p_t dm``.

    ``dm = J(H) dg dH`` with normalized Haar measure on U. *band* is the
    largest label present in *F* (defaults to *lmax*); it sets the radial
    truncation and, unless *n_u* is given, the U grid. Radial Gauss-Legendre
    nodes double from *n0* until the coefficients agree to *rtol*.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    band = lmax if band is None else band
    n_u = default_u_nodes(space, max(band, lmax)) if n_u is None else n_u

    def compute(n):
        rule = radial_rule(space, t, max(band, lmax), n)
        H = np.abs(rule.nodes)
        radial = rule.weights * compensated_dt(space, 2 * t, 2 * H, 0) * jacobian_J(space, H)
        _, proj = orbit_integrals(space, F, rule.nodes, n_u, lmax, radial_weight=radial)
        return proj.sum(axis=0)

    nmax = min(max_nodes(), 1024)
    with warnings.catch_warnings():
        warnings.simplefilter("always", LowConfidenceWarning)
        out, _, _ = converge(compute, n0=n0, rtol=rtol, nmax=nmax, label="holomorphic Fourier coefficients")
    return SpectralCoeffs(space, lmax, out)
