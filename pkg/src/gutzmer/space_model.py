"""Descriptors for the three rank-one symmetric spaces handled by the package.

Every space is described by a radial coordinate ``r`` on the closed positive
chamber in which the single positive restricted root reads ``(alpha, H) = r``.
With this scale the shifted Laplacian has eigenvalue ``(l + rho)**2`` on the
degree-``l`` spherical functions:

========== ========= ===== ======= ==================== ==============
kind       X         rho   m_alpha d_l (norm weight)    coefficient slots
========== ========= ===== ======= ==================== ==============
CIRCLE     S^1       0     0       1                    2 (1 for l=0)
SPHERE2    S^2       1/2   1       2l+1                 2l+1
SU2_ZONAL  SU(2)=S^3 1     2       (l+1)^2              1 (class functions)
========== ========= ===== ======= ==================== ==============

The circle folds the characters ``e^{+inx}`` and ``e^{-inx}`` into one label
``n = |n|`` with two coefficient slots. ``SU2_ZONAL`` keeps only the
conjugation-invariant sector, so each label carries a single slot although the
Plancherel weight is the full ``(l+1)^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpaceKind",
    "SpaceModel",
    "SpectralIndex",
    "make_space",
    "eigenvalue",
    "dimension",
    "slot_count",
    "slot_index",
    "jacobian_J0",
    "jacobian_J",
    "jacobian_J1",
    "phi_factor",
    "root_product",
    "dual_volume",
]


class SpaceKind(enum.Enum):
    CIRCLE = "circle"
    SPHERE2 = "sphere2"
    SU2_ZONAL = "su2"

    @classmethod
    def parse(cls, value: "str | SpaceKind") -> "SpaceKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown space {value!r}; expected one of circle, sphere2, su2")


@dataclass(frozen=True)
class SpaceModel:
    """Immutable description of one concrete symmetric space.

    Attributes
    ----------
    kind : SpaceKind
    rho : float
        Norm of the half sum of positive restricted roots.
    mult_alpha : int
        Root multiplicity (0 for the circle, whose root system is empty).
    chamber_period : float
        Length of the compact chamber for real radial coordinate.
    dim_U_orbit_coords : int
        Number of coordinates used to parametrize U in orbit quadrature.
    dual_name : str
        The noncompact dual ``Y``.
    """

    kind: SpaceKind
    rho: float
    mult_alpha: int
    chamber_period: float
    dim_U_orbit_coords: int
    dual_name: str

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def two_sided(self) -> bool:
        """True when the radial variable ranges over the whole line (no Weyl group)."""
        return self.kind is SpaceKind.CIRCLE


_SPACES = {
    SpaceKind.CIRCLE: SpaceModel(SpaceKind.CIRCLE, 0.0, 0, 2 * math.pi, 1, "R"),
    SpaceKind.SPHERE2: SpaceModel(SpaceKind.SPHERE2, 0.5, 1, math.pi, 3, "H2"),
    # u_coords are the two quaternion components (x0, x1) of g in SU(2) that a
    # class function can see after the orbit reduction.
    SpaceKind.SU2_ZONAL: SpaceModel(SpaceKind.SU2_ZONAL, 1.0, 2, math.pi, 2, "H3"),
}


@dataclass(frozen=True)
class SpectralIndex:
    lam: int
    j: int

    def check(self, space: SpaceModel) -> None:
        if self.lam < 0:
            raise IndexError(f"negative spectral label {self.lam}")
        if not 1 <= self.j <= slot_count(space, self.lam):
            raise IndexError(
                f"slot j={self.j} out of range for lambda={self.lam} on {space.name}"
            )


def make_space(kind: "SpaceKind | str") -> SpaceModel:
    return _SPACES[SpaceKind.parse(kind)]


def eigenvalue(space: SpaceModel, lam):
    """Spectral value ``(lam + rho)**2`` of minus the shifted Laplacian."""
    lam = np.asarray(lam, dtype=float)
    out = (lam + space.rho) ** 2
    return float(out) if out.ndim == 0 else out


def dimension(space: SpaceModel, lam):
    """Plancherel weight ``d_lambda``."""
    lam = np.asarray(lam, dtype=int)
    if space.kind is SpaceKind.CIRCLE:
        out = np.ones_like(lam)
    elif space.kind is SpaceKind.SPHERE2:
        out = 2 * lam + 1
    else:
        out = (lam + 1) ** 2
    return int(out) if out.ndim == 0 else out


def slot_count(space: SpaceModel, lam: int) -> int:
    """Number of stored coefficients for label ``lam``."""
    if space.kind is SpaceKind.CIRCLE:
        return 1 if lam == 0 else 2
    if space.kind is SpaceKind.SPHERE2:
        return 2 * lam + 1
    return 1


def slot_index(space: SpaceModel, lmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened ``(lam, j)`` arrays enumerating all slots with ``lam <= lmax``."""
    lams, js = [], []
    for lam in range(lmax + 1):
        n = slot_count(space, lam)
        lams.extend([lam] * n)
        js.extend(range(1, n + 1))
    return np.array(lams, dtype=int), np.array(js, dtype=int)


def jacobian_J0(space: SpaceModel, H):
    """Radial density ``sin(r)**m_alpha`` of the invariant measure on X."""
    H = np.asarray(H, dtype=float)
    return np.sin(H) ** space.mult_alpha


def jacobian_J(space: SpaceModel, H):
    """Radial density ``sinh(2r)**m_alpha`` of the invariant measure on X_C."""
    H = np.asarray(H, dtype=float)
    return np.sinh(2 * H) ** space.mult_alpha


def jacobian_J1(space: SpaceModel, H):
    """Radial density ``sinh(r)**m_alpha`` on the dual Y, so that J1(2H) = J(H)."""
    H = np.asarray(H, dtype=float)
    return np.sinh(H) ** space.mult_alpha


def root_product(space: SpaceModel, H):
    """``prod (alpha, H)**m_alpha`` over the positive roots."""
    H = np.asarray(H, dtype=float)
    return np.abs(H) ** space.mult_alpha


def phi_factor(space: SpaceModel, H):
    """Density ``(r / sinh r)**m_alpha`` of the heat kernel envelope."""
    H = np.abs(np.asarray(H, dtype=float))
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        # for large r sinh overflows well after the ratio underflows
        ratio = np.where(H < 1e-8, 1.0 - H * H / 6.0, H / np.sinh(np.maximum(H, 1e-300)))
    return ratio ** space.mult_alpha


def dual_volume(space: SpaceModel) -> float:
    """Constant ``c1`` with ``int_Y f dm1 = c1 int_0^inf f(r) J1(r) dr`` for radial f.

    For the circle the dual is the real line and radial (even) functions give
    ``int_R f = 2 int_0^inf f``.
    """
    return {SpaceKind.CIRCLE: 2.0, SpaceKind.SPHERE2: 2 * math.pi, SpaceKind.SU2_ZONAL: 4 * math.pi}[
        space.kind
    ]
