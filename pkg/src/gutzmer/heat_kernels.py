"""Heat kernels on X and on its noncompact dual, their time derivatives, and weights.

Time-derivative conventions
---------------------------
``dual_heat_kernel_dt`` is the literal derivative ``d^m/dtau^m gamma1_tau``.
The weight families use the *compensated* derivative

    D^k p_t(H) = e^{-2t rho^2} [d^k/dtau^k (e^{tau rho^2} gamma1_tau)]_{tau=2t}(2H),

taken in the kernel's own time ``tau = 2t``. Paired against
``phi_lambda(exp 2H) J(H)`` it multiplies the Stenzel constant by
``|lambda+rho|^{2k}`` exactly, which is what makes ``(1 + D)^m p_t`` reproduce
the weight ``(1 + |lambda+rho|^2)^m``. A derivative in ``t`` itself is ``2^k D^k``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .quadrature import converge, gauss_legendre
from .reports import VerificationReport
from .space_model import (
    SpaceKind,
    SpaceModel,
    dimension,
    eigenvalue,
    phi_factor,
    slot_index,
)
from .special_functions import ComplexPoint, basis_values, origin

__all__ = [
    "TruncationInsufficient",
    "DeltaNotFound",
    "WeightFamily",
    "WeightFunction",
    "compact_heat_kernel",
    "heat_kernel_tail_bound",
    "dual_heat_kernel",
    "dual_heat_kernel_dt",
    "compensated_dt",
    "weight_eval",
    "rl_integral",
    "rl_integral_quadrature",
    "find_delta_star",
    "ao_envelope_check",
]


class TruncationInsufficient(ArithmeticError):
    """The spectral tail bound exceeds the allowed fraction of the partial sum."""


class DeltaNotFound(ValueError):
    """No shift delta up to the search cap makes the weight nonnegative."""


class WeightFamily(enum.Enum):
    PT = "p_t"
    WM = "w_t^m"
    WM_DELTA = "w_{t,delta}^m"
    WM_BIG = "W_t^m"
    W_NEG = "w_t^{-s}"


@dataclass(frozen=True)
class WeightFunction:
    family: WeightFamily
    space: SpaceModel
    t: float
    m_or_s: float = 0
    delta: float = 0.0

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.family is WeightFamily.W_NEG:
            if self.m_or_s <= 0:
                raise ValueError("negative-order weights need s > 0")
        elif self.m_or_s < 0 or int(self.m_or_s) != self.m_or_s:
            raise ValueError("positive-order weights need an integer m >= 0")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @property
    def signed(self) -> bool:
        return self.family is WeightFamily.WM


# ---------------------------------------------------------------------------
# compact heat kernel


def _log_tail_terms(space: SpaceModel, t: float, lmax: int, H: float, count: int = 400):
    lam = np.arange(lmax + 1, lmax + 1 + count)
    mult = 2.0 if space.kind is SpaceKind.CIRCLE else 1.0
    return np.log(mult * dimension(space, lam)) - t * eigenvalue(space, lam) + lam * abs(H)


def heat_kernel_tail_bound(space: SpaceModel, t: float, lmax: int, H: float) -> float:
    """Majorant of the neglected terms, using ``|phi_j^lambda(u exp H)| <= e^{lambda |H|}``."""
    logs = _log_tail_terms(space, t, lmax, H)
    top = logs.max()
    return float(np.exp(top) * np.sum(np.exp(logs - top)))


def compact_heat_kernel(space: SpaceModel, t: float, z, lmax: int, rtol: float = 1e-10):
    """``gamma_t(z) = sum d_lambda e^{-t|lambda+rho|^2} phi_lambda(z)`` on X_C.

    *z* is a :class:`ComplexPoint` or a pair ``(u, H)`` of arrays. Raises
    :class:`TruncationInsufficient` if the tail majorant exceeds ``rtol`` times
    the partial sum.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(z, ComplexPoint):
        z.validate(space)
        u, H = [z.u_coords], np.array([z.H])
    else:
        u, H = z
        H = np.broadcast_to(np.asarray(H, dtype=float), (np.atleast_2d(u).shape[0],))
    lams, js = slot_index(space, lmax)
    at_origin = basis_values(space, lmax, origin(space), 0.0)[0]
    coeff = dimension(space, lams) * np.exp(-t * eigenvalue(space, lams)) * np.conj(at_origin)
    vals = basis_values(space, lmax, u, H) @ coeff
    tail = max(heat_kernel_tail_bound(space, t, lmax, h) for h in np.unique(np.abs(H)))
    if tail > rtol * np.min(np.abs(vals)):
        raise TruncationInsufficient(
            f"tail bound {tail:.3g} too large for lmax={lmax} at |H|<={np.abs(H).max():g}"
        )
    return complex(vals[0]) if isinstance(z, ComplexPoint) else vals


# ---------------------------------------------------------------------------
# dual heat kernel


def _gauss_time_derivs(p: float, c, tau: float, m: int):
    """``d^m/dtau^m [tau^{-p} exp(-c/tau)]`` for an array of ``c >= 0``."""
    c = np.asarray(c, dtype=float)
    coeffs = {0: np.ones_like(c)}
    for _ in range(m):
        new = {}
        for k, a in coeffs.items():
            new[k + 1] = new.get(k + 1, 0.0) - (p + k) * a
            new[k + 2] = new.get(k + 2, 0.0) + c * a
        coeffs = new
    base = np.exp(-c / tau)
    total = np.zeros_like(c)
    for k, a in coeffs.items():
        total = total + a * tau ** (-p - k)
    return total * base


def _h2_integral(tau: float, r: np.ndarray, m: int, n: int) -> np.ndarray:
    """``int_r^inf s d^m_tau[tau^{-3/2} e^{-s^2/4tau}] / sqrt(cosh s - cosh r) ds``.

    Substituting ``s = r + v^2`` removes the inverse square-root endpoint
    singularity; ``cosh s - cosh r = 2 sinh((s+r)/2) sinh(v^2/2)``.
    """
    S = np.sqrt(r * r + 4 * tau * (60 + 6 * m))
    V = np.sqrt(S - r)
    gl = gauss_legendre(n, 0.0, 1.0)
    v = V[:, None] * gl.nodes[None, :]
    s = r[:, None] + v * v
    half = 0.5 * v * v
    q = np.where(half < 1e-8, 0.5 + half * half / 12.0, np.sinh(half) / np.maximum(v * v, 1e-300))
    denom = np.sqrt(2.0 * np.sinh(0.5 * (s + r[:, None])) * q)
    f = 2.0 * s * _gauss_time_derivs(1.5, s * s / 4.0, tau, m) / denom
    return (f @ gl.weights) * V


def _dual_uncompensated_derivs(space: SpaceModel, tau: float, r, m: int, rtol: float):
    """``d^k/dtau^k [e^{tau rho^2} gamma1_tau(r)]`` for k = m (array over r)."""
    r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
    if space.kind is SpaceKind.CIRCLE:
        return (4 * math.pi) ** -0.5 * _gauss_time_derivs(0.5, r * r / 4, tau, m)
    if space.kind is SpaceKind.SU2_ZONAL:
        ratio = np.where(r < 1e-8, 1.0, r / np.sinh(np.maximum(r, 1e-300)))
        return (4 * math.pi) ** -1.5 * ratio * _gauss_time_derivs(1.5, r * r / 4, tau, m)
    val, _, _ = converge(lambda n: _h2_integral(tau, r, m, n), n0=64, rtol=rtol,
                         label="H2 heat kernel")
    return math.sqrt(2) * (4 * math.pi) ** -1.5 * val


def compensated_dt(space: SpaceModel, tau: float, r, m: int, rtol: float = 1e-11):
    """``e^{-tau rho^2} d^m/dtau^m [e^{tau rho^2} gamma1_tau(r)]``."""
    r_in = np.asarray(r, dtype=float)
    out = math.exp(-tau * space.rho**2) * _dual_uncompensated_derivs(space, tau, r_in, m, rtol)
    return float(out[0]) if r_in.ndim == 0 else out


def dual_heat_kernel(space: SpaceModel, t: float, r, rtol: float = 1e-11):
    """Heat kernel ``gamma1_t`` of the noncompact dual at geodesic radius ``r``.

    Normalized to unit mass for the Riemannian measure of R, H^2 or H^3
    (see :func:`gutzmer.space_model.dual_volume`).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    return compensated_dt(space, t, r, 0, rtol)


def dual_heat_kernel_dt(space: SpaceModel, t: float, r, m: int, rtol: float = 1e-11):
    """Literal ``m``-th time derivative ``d^m/dt^m gamma1_t(r)``.

    Closed forms are differentiated exactly; for H^2 the derivative is taken
    under the descent integral, whose time dependence is elementary.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    r_in = np.asarray(r, dtype=float)
    rho2 = space.rho**2
    total = 0.0
    for k in range(m + 1):
        total = total + math.comb(m, k) * (-rho2) ** (m - k) * _dual_uncompensated_derivs(
            space, t, r_in, k, rtol)
    out = math.exp(-t * rho2) * total
    return float(out[0]) if r_in.ndim == 0 else out


# ---------------------------------------------------------------------------
# weights


def rl_integral(s: float, t: float, b):
    """``(1/Gamma(s)) int_0^{2t} (2t-r)^{s-1} e^{rb} dr = e^{2tb} b^{-s} P(s, 2tb)``."""
    b = np.asarray(b, dtype=float)
    return np.exp(2 * t * b) * b ** (-s) * special.gammainc(s, 2 * t * b)


def rl_integral_quadrature(s: float, t: float, b, rtol: float = 1e-12):
    """Scaled Riemann-Liouville integral ``b^s e^{-2tb} (1/Gamma(s)) int ...`` by quadrature.

    Substituting ``v = b (2t - r)`` gives ``(1/Gamma(s)) int_0^{2tb} v^{s-1} e^{-v} dv``,
    computed with Gauss-Jacobi nodes carrying the ``v^{s-1}`` factor; the
    range is cut at ``v = 200`` where ``e^{-v}`` is negligible.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    V = np.minimum(2 * t * b, 200.0)
    V0 = np.minimum(V, 2.0)

    def value(n):
        x, w = special.roots_jacobi(n, 0.0, s - 1.0)
        # v = V0 (1 + x) / 2 ; v^{s-1} dv = (V0/2)^s (1+x)^{s-1} dx
        v = V0[:, None] * (1 + x[None, :]) / 2
        head = (V0 / 2) ** s * (np.exp(-v) @ w)
        # remainder on (2, V): Gauss-Legendre panels of width 2
        y, u = special.roots_legendre(n)
        left = np.arange(2.0, 200.0, 2.0)
        lo = np.clip(left[None, :], None, V[:, None])
        hi = np.clip(left[None, :] + 2.0, None, V[:, None])
        v = lo[..., None] + (hi - lo)[..., None] * (1 + y) / 2
        tail = np.sum((hi - lo) / 2 * ((v ** (s - 1) * np.exp(-v)) @ u), axis=1)
        return (head + tail) / special.gamma(s)

    out, _, _ = converge(value, n0=16, rtol=rtol, nmax=64, label="Riemann-Liouville integral")
    return out


def _gauss_jacobi_rl(s: float, t: float, n: int):
    """Nodes ``r`` on ``(0, 2t)`` and weights for ``(1/Gamma(s)) int_0^{2t} (2t-r)^{s-1} f(r) dr``."""
    x, w = special.roots_jacobi(n, s - 1.0, 0.0)
    r = t * (1 + x)
    return r, w * t**s / special.gamma(s)


def weight_eval(w: WeightFunction, H, rtol: float = 1e-10):
    """Pointwise value of a radial weight on ``i a_+``.

    ``W_NEG`` is infinite at ``H = 0`` (the dual kernels concentrate there as
    the time goes to zero) and finite for ``H > 0``.
    """
    space, t = w.space, w.t
    H_in = np.asarray(H, dtype=float)
    H = np.atleast_1d(H_in)
    r = 2 * np.abs(H)
    if w.family is WeightFamily.W_NEG:
        s = float(w.m_or_s)
        shift = 1 + space.rho**2

        def value(n):
            nodes, weights = _gauss_jacobi_rl(s, t, n)
            vals = np.stack([np.exp(tau * shift) * compensated_dt(space, tau, r, 0) for tau in nodes])
            return weights @ vals

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out, _, _ = converge(value, n0=16, rtol=rtol, nmax=1024, label="w_t^{-s}")
        out = np.where(H == 0, np.inf, out)
    else:
        m = int(w.m_or_s)
        tau = 2 * t
        if w.family is WeightFamily.PT:
            out = compensated_dt(space, tau, r, 0)
        elif w.family is WeightFamily.WM:
            out = sum(math.comb(m, k) * compensated_dt(space, tau, r, k) for k in range(m + 1))
        else:
            p = compensated_dt(space, tau, r, 0)
            out = w.delta * p + compensated_dt(space, tau, r, m)
            if w.family is WeightFamily.WM_BIG:
                out = out + p
    out = np.asarray(out, dtype=float)
    return float(out[0]) if H_in.ndim == 0 else out


def find_delta_star(space: SpaceModel, t: float, m: int, grid=None, cap: float = 1e6):
    """Smallest ``delta >= 0`` making ``(delta + D^m) p_t`` nonnegative on *grid*.

    Since ``p_t > 0`` this is ``max(0, sup_H -D^m p_t / p_t)``; the grid
    maximizer is refined by bounded scalar minimization. The default grid covers ``[0, 12 sqrt(2t) + 2]`` with 2001 points.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if grid is None:
        grid = np.linspace(0.0, 12 * math.sqrt(2 * t) + 2.0, 2001)
    grid = np.asarray(grid, dtype=float)
    r = 2 * grid
    p = compensated_dt(space, 2 * t, r, 0)
    dm = compensated_dt(space, 2 * t, r, m)
    ok = p > 0
    ratio = np.where(ok, -dm / np.where(ok, p, 1.0), -np.inf)
    i = int(np.argmax(ratio))
    best = float(ratio[i])
    if math.isfinite(best) and grid.size > 1:
        # the supremum usually falls between grid points; refine around the best one
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]

        def neg_ratio(h):
            return float(compensated_dt(space, 2 * t, 2 * h, m) / compensated_dt(space, 2 * t, 2 * h, 0))

        res = optimize.minimize_scalar(neg_ratio, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12 * max(1.0, hi)})
        best = max(best, -float(res.fun))
    delta = max(0.0, best)
    if delta > cap or not math.isfinite(delta):
        raise DeltaNotFound(f"no delta <= {cap:g} works for m={m}, t={t}")
    return delta


# ---------------------------------------------------------------------------
# envelope


def ao_envelope_check(space: SpaceModel, t: float, grid=None, spread_tol: float | None = None):
    """Compare ``gamma1_t(r)`` with ``Phi(r)^{1/2} e^{-t rho^2} e^{-r^2/4t}`` on a grid.

    Passes when the ratio stays finite and positive with ``max/min`` below
    *spread_tol* (1 + 1e-9 for the closed-form kernels, 4 for H^2).
    """
    if grid is None:
        grid = np.linspace(0.0, 10.0, 201)
    grid = np.asarray(grid, dtype=float)
    kernel = dual_heat_kernel(space, t, grid)
    envelope = np.sqrt(phi_factor(space, grid)) * math.exp(-t * space.rho**2) * np.exp(-grid**2 / (4 * t))
    ratio = kernel / envelope
    lo, hi = float(np.min(ratio)), float(np.max(ratio))
    if spread_tol is None:
        spread_tol = 4.0 if space.kind is SpaceKind.SPHERE2 else 1 + 1e-9
    spread = hi / lo if lo > 0 else math.inf
    report = VerificationReport.from_error(
        "ao_envelope", space.name, spread - 1.0, spread_tol - 1.0,
        params={"t": t, "r_min": float(grid[0]), "r_max": float(grid[-1]), "npts": grid.size},
        lhs=lo, rhs=hi,
        fitted_constants={"c1": lo, "c2": hi, "spread": spread},
        notes="rel_error is max/min - 1 of kernel / envelope",
    )
    return report
