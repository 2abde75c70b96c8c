"""Spherical functions, matrix coefficients and their holomorphic extensions.

Points of X_C are written ``u . exp(H) . o`` (:class:`ComplexPoint`). Each space
embeds such a point into a concrete complex model:

* CIRCLE: ``z = theta + iH`` on the cylinder ``C / 2 pi Z``;
* SPHERE2: ``z = R(alpha, beta, gamma) (i sinh H, 0, cosh H)`` on the quadric
  ``z . z = 1`` in ``C^3``;
* SU2_ZONAL: ``w = x0 cosh H + i x1 sinh H``, half the trace of ``g exp(H)``
  in ``SL(2, C)``, which is all a class function can see.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import converge, gauss_legendre
from .space_model import SpaceKind, SpaceModel, slot_count, slot_index

__all__ = [
    "ComplexPoint",
    "origin",
    "x_to_u",
    "legendre_p",
    "gegenbauer_c",
    "chebyshev_u",
    "legendre_derivatives",
    "zonal_spherical",
    "radial_spherical",
    "euler_matrix",
    "embed",
    "basis_values",
    "matrix_coefficient",
    "dual_spherical",
]


@dataclass(frozen=True)
class ComplexPoint:
    """A point ``u exp(H) o`` of X_C.

    ``u_coords`` follows :func:`gutzmer.quadrature.u_grid`: ``(theta,)`` for the
    circle, ZYZ Euler angles for SPHERE2 and disk coordinates ``(x0, x1)`` with
    ``x0**2 + x1**2 <= 1`` for SU2_ZONAL. ``H`` is the radial coordinate; it
    must be nonnegative except on the circle, whose chamber is the whole line.
    """

    u_coords: tuple
    H: float = 0.0

    def validate(self, space: SpaceModel) -> None:
        if len(self.u_coords) != space.dim_U_orbit_coords:
            raise ValueError(
                f"{space.name} points need {space.dim_U_orbit_coords} u-coordinates"
            )
        if self.H < 0 and not space.two_sided:
            raise ValueError("H must lie in the closed positive chamber")
        if space.kind is SpaceKind.SU2_ZONAL and self.u_coords[0] ** 2 + self.u_coords[1] ** 2 > 1 + 1e-12:
            raise ValueError("SU2_ZONAL disk coordinates must satisfy x0^2 + x1^2 <= 1")


def origin(space: SpaceModel) -> np.ndarray:
    """u-coordinates of the identity of U, shape ``(1, dim_U_orbit_coords)``."""
    if space.kind is SpaceKind.SU2_ZONAL:
        return np.array([[1.0, 0.0]])
    return np.zeros((1, space.dim_U_orbit_coords))


def x_to_u(space: SpaceModel, x) -> np.ndarray:
    """u-coordinates of group elements carrying o to the real points *x* of X.

    *x* follows :func:`gutzmer.quadrature.x_grid`: ``theta`` (circle),
    ``(theta, phi)`` polar angles (SPHERE2), geodesic angle ``theta`` (SU2_ZONAL).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and space.kind is not SpaceKind.SPHERE2:
        x = x[:, None]
    x = np.atleast_2d(x)
    if space.kind is SpaceKind.CIRCLE:
        return x[:, :1]
    if space.kind is SpaceKind.SPHERE2:
        return np.stack([x[:, 1], x[:, 0], np.zeros(len(x))], axis=1)
    return np.stack([np.cos(x[:, 0]), np.sin(x[:, 0])], axis=1)


def legendre_p(l: int, z):
    """Legendre polynomial ``P_l(z)`` by the three-term recurrence (complex z allowed)."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    z = np.asarray(z)
    p_prev, p = np.ones_like(z, dtype=np.result_type(z, float)), z * 1.0
    if l == 0:
        return p_prev if p_prev.ndim else p_prev[()]
    for k in range(1, l):
        p_prev, p = p, ((2 * k + 1) * z * p - k * p_prev) / (k + 1)
    return p


def gegenbauer_c(n: int, alpha: float, z):
    """Gegenbauer polynomial ``C_n^{(alpha)}(z)`` by recurrence."""
    z = np.asarray(z)
    c_prev = np.ones_like(z, dtype=np.result_type(z, float))
    if n == 0:
        return c_prev
    c = 2 * alpha * z
    for k in range(2, n + 1):
        c_prev, c = c, (2 * z * (k + alpha - 1) * c - (k + 2 * alpha - 2) * c_prev) / k
    return c


def chebyshev_u(n: int, w):
    """Chebyshev polynomial of the second kind, ``U_n(cos x) = sin((n+1)x)/sin x``."""
    return gegenbauer_c(n, 1.0, w)


def legendre_derivatives(lmax: int, z) -> np.ndarray:
    """Table ``D[l, m] = d^m P_l / dz^m`` for ``0 <= m <= l <= lmax``.

    Uses ``P_l^{(m)} = (2m-1)!! C_{l-m}^{(m+1/2)}``; shape ``(lmax+1, lmax+1, *z.shape)``.
    """
    z = np.asarray(z)
    out = np.zeros((lmax + 1, lmax + 1) + z.shape, dtype=np.result_type(z, float))
    dfact = 1.0
    for m in range(lmax + 1):
        if m > 0:
            dfact *= 2 * m - 1
        alpha = m + 0.5
        c_prev = np.ones_like(out[0, 0])
        out[m, m] = dfact * c_prev
        if m == lmax:
            break
        c = 2 * alpha * z
        out[m + 1, m] = dfact * c
        for k in range(2, lmax - m + 1):
            c_prev, c = c, (2 * z * (k + alpha - 1) * c - (k + 2 * alpha - 2) * c_prev) / k
            out[m + k, m] = dfact * c
    return out


def zonal_spherical(space: SpaceModel, lam: int, theta_c):
    """Elementary spherical function at the complexified angle ``theta_c``.

    ``exp(H) . o`` corresponds to ``theta_c = iH``. CIRCLE gives ``cos(n theta_c)``
    (the two characters folded), SPHERE2 ``P_l(cos theta_c)`` and SU2_ZONAL
    ``sin((l+1) theta_c) / ((l+1) sin theta_c)``, evaluated as a polynomial in
    ``cos theta_c`` so ``theta_c = 0`` needs no special case.
    """
    theta_c = np.asarray(theta_c)
    if space.kind is SpaceKind.CIRCLE:
        return np.cos(lam * theta_c)
    w = np.cos(theta_c)
    if space.kind is SpaceKind.SPHERE2:
        return legendre_p(lam, w)
    return chebyshev_u(lam, w) / (lam + 1)


def radial_spherical(space: SpaceModel, lam, H):
    """``phi_lambda(exp(H) o)`` for real H; broadcasts over ``lam`` and ``H``."""
    lam = np.asarray(lam, dtype=float)
    H = np.asarray(H, dtype=float)
    if space.kind is SpaceKind.CIRCLE:
        return np.cosh(lam * H)
    if space.kind is SpaceKind.SU2_ZONAL:
        k = lam + 1
        small = np.abs(H) < 1e-6
        Hs = np.where(small, 1.0, H)
        val = np.sinh(k * Hs) / (k * np.sinh(Hs))
        return np.where(small, 1 + (k * k - 1) * H * H / 6, val)
    lam_i = np.broadcast_to(lam, np.broadcast(lam, H).shape).astype(int)
    Hb = np.broadcast_to(H, lam_i.shape)
    out = np.empty(lam_i.shape)
    for l in np.unique(lam_i):
        sel = lam_i == l
        out[sel] = legendre_p(int(l), np.cosh(Hb[sel]))
    return out


def euler_matrix(alpha, beta, gamma) -> np.ndarray:
    """ZYZ rotation matrices ``Rz(alpha) Ry(beta) Rz(gamma)``, shape ``(..., 3, 3)``."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    R = np.empty(np.broadcast(alpha, beta, gamma).shape + (3, 3))
    R[..., 0, 0] = ca * cb * cg - sa * sg
    R[..., 0, 1] = -ca * cb * sg - sa * cg
    R[..., 0, 2] = ca * sb
    R[..., 1, 0] = sa * cb * cg + ca * sg
    R[..., 1, 1] = -sa * cb * sg + ca * cg
    R[..., 1, 2] = sa * sb
    R[..., 2, 0] = -sb * cg
    R[..., 2, 1] = sb * sg
    R[..., 2, 2] = cb
    return R


def embed(space: SpaceModel, u, H) -> np.ndarray:
    """Complex model coordinates of the points ``u exp(H) o``.

    *u* has shape ``(npts, dim_U_orbit_coords)``; *H* is scalar or ``(npts,)``.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    H = np.broadcast_to(np.asarray(H, dtype=float), (u.shape[0],))
    if space.kind is SpaceKind.CIRCLE:
        return u[:, 0] + 1j * H
    if space.kind is SpaceKind.SU2_ZONAL:
        return u[:, 0] * np.cosh(H) + 1j * u[:, 1] * np.sinh(H)
    R = euler_matrix(u[:, 0], u[:, 1], u[:, 2])
    return 1j * np.sinh(H)[:, None] * R[:, :, 0] + np.cosh(H)[:, None] * R[:, :, 2]


def _sphere_norms(lmax: int) -> np.ndarray:
    """``N[l, m]`` so that ``N (x+iy)^m P_l^{(m)}(z)``-type harmonics have unit L2 norm."""
    N = np.zeros((lmax + 1, lmax + 1))
    for l in range(lmax + 1):
        N[l, 0] = 1.0
        ratio = 1.0
        for m in range(1, l + 1):
            ratio /= (l + m) * (l - m + 1)  # (l-m)!/(l+m)!
            N[l, m] = math.sqrt(2 * ratio)
    return N


def basis_values(space: SpaceModel, lmax: int, u, H) -> np.ndarray:
    """Values of every ``phi_j^lambda`` with ``lambda <= lmax`` at ``u exp(H) o``.

    Returns shape ``(npts, nslots)`` in the slot order of
    :func:`gutzmer.space_model.slot_index`. Normalization: ``phi_1^lambda(o) = 1``
    and ``||phi_j^lambda||^2 = 1 / d_lambda`` in ``L^2(X)``.
    """
    z = embed(space, u, H)
    npts = z.shape[0]
    lams, js = slot_index(space, lmax)
    out = np.empty((npts, lams.size), dtype=complex)
    if space.kind is SpaceKind.CIRCLE:
        sign = np.where(js == 1, 1.0, -1.0)
        out[:] = np.exp(1j * np.outer(z, lams * sign))
        return out
    if space.kind is SpaceKind.SU2_ZONAL:
        u_prev = np.ones(npts, dtype=complex)
        u_cur = 2 * z
        out[:, 0] = 1.0
        for l in range(1, lmax + 1):
            out[:, l] = u_cur / (l + 1)
            u_prev, u_cur = u_cur, 2 * z * u_cur - u_prev
        return out
    x, y, zz = z[:, 0], z[:, 1], z[:, 2]
    D = legendre_derivatives(lmax, zz)
    N = _sphere_norms(lmax)
    plus, minus = x + 1j * y, x - 1j * y
    pp = np.ones(npts, dtype=complex)
    pm = np.ones(npts, dtype=complex)
    cos_part = [np.ones(npts, dtype=complex)]
    sin_part = [np.zeros(npts, dtype=complex)]
    for _ in range(1, lmax + 1):
        pp, pm = pp * plus, pm * minus
        cos_part.append(0.5 * (pp + pm))
        sin_part.append(-0.5j * (pp - pm))
    col = 0
    for l in range(lmax + 1):
        out[:, col] = D[l, 0]
        col += 1
        for m in range(1, l + 1):
            out[:, col] = N[l, m] * cos_part[m] * D[l, m]
            out[:, col + 1] = N[l, m] * sin_part[m] * D[l, m]
            col += 2
    return out


def matrix_coefficient(space: SpaceModel, lam: int, j: int, z: ComplexPoint) -> complex:
    """Holomorphically extended ``phi_j^lambda`` at one point."""
    if lam < 0 or not 1 <= j <= slot_count(space, lam):
        raise IndexError(f"no slot (lambda={lam}, j={j}) on {space.name}")
    z.validate(space)
    vals = basis_values(space, lam, [z.u_coords], z.H)[0]
    lams, js = slot_index(space, lam)
    return complex(vals[np.flatnonzero((lams == lam) & (js == j))[0]])


def _laplace_legendre(nu, r, n):
    """``P_nu(cosh r) = (1/pi) int_0^pi (cosh r + sinh r cos t)^nu dt`` with n nodes."""
    gl = gauss_legendre(n, 0.0, math.pi)
    base = np.cosh(r)[..., None] + np.sinh(r)[..., None] * np.cos(gl.nodes)
    return np.exp(nu * np.log(base)) @ gl.weights / math.pi


def dual_spherical(space: SpaceModel, mu, r, rtol: float = 1e-12):
    """Spherical function ``psi_mu`` of the noncompact dual at radius ``r``.

    R: ``cos(mu r)``; H^3: ``sin(mu r) / (mu sinh r)``; H^2: the conical
    function ``P_{-1/2 + i mu}(cosh r)`` from Laplace's integral, with
    Gauss-Legendre nodes doubled from 64 until converged.
    """
    mu = complex(mu)
    r = np.asarray(r, dtype=float)
    if space.kind is SpaceKind.CIRCLE:
        return np.cos(mu * r)
    if space.kind is SpaceKind.SU2_ZONAL:
        small = np.abs(r) < 1e-8
        rs = np.where(small, 1.0, r)
        if abs(mu) < 1e-14:
            val = rs / np.sinh(rs)
        else:
            val = np.sin(mu * rs) / (mu * np.sinh(rs))
        return np.where(small, 1.0 + 0j, val)
    nu = -0.5 + 1j * mu
    val, _, _ = converge(lambda n: _laplace_legendre(nu, r, n), n0=64, rtol=rtol,
                         label="H2 spherical function")
    return val
