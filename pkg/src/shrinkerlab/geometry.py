"""Rigid model shrinkers N^m x R^k with potential f(y) = |y|^2 / 4.

All public functions are parametrized by the potential level t; the
distance-like coordinate rho = 2 sqrt(t) is used only internally (and by
:func:`coarea_check`, which is naturally stated in rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .quadrature import unit_ball_volume
from .report import IdentityEntry


def sphere_area(m: int, radius: float = 1.0) -> float:
    """Riemannian volume of the round sphere S^m of the given radius."""
    return radius**m * 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def t_to_rho(t):
    return 2.0 * np.sqrt(t)


def rho_to_t(rho):
    return np.asarray(rho) ** 2 / 4.0


class SphereEigenfunctions:
    """Evaluation hook for the first nonconstant eigenfunction of S^m(a).

    The factor point theta is a unit vector in R^(m+1); eigenfunction j=1 is
    the (L^2-normalized) first coordinate.
    """

    def __init__(self, m: int, radius: float):
        self.m = m
        self.radius = radius
        self.volume = sphere_area(m, radius)
        self._scale = math.sqrt((m + 1) / self.volume)

    def _check(self, j: int):
        if j != 1:
            raise NotImplementedError(f"sphere hook only evaluates eigen_index 1, got {j}")

    def value(self, j: int, theta) -> np.ndarray:
        self._check(j)
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        return self._scale * theta[:, 0]

    def sup(self, j: int) -> float:
        self._check(j)
        return self._scale


@dataclass(frozen=True)
class EinsteinFactor:
    m: int
    volume: float
    eigenvalues: tuple = (0.0,)
    family: str = "point"
    hook: Optional[SphereEigenfunctions] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.m < 0 or self.m == 1:
            raise ValueError(f"Einstein factor dimension must be 0 or >= 2, got m={self.m}")
        if not self.volume > 0:
            raise ValueError("Einstein factor volume must be positive")
        ev = tuple(float(x) for x in self.eigenvalues)
        if not ev or ev[0] != 0.0:
            raise ValueError("eigenvalue list must start with 0")
        if any(b <= a for a, b in zip(ev, ev[1:])):
            raise ValueError("eigenvalues must be strictly increasing")
        object.__setattr__(self, "eigenvalues", ev)

    @classmethod
    def point(cls) -> "EinsteinFactor":
        return cls(0, 1.0, (0.0,), "point")

    @classmethod
    def sphere(cls, m: int, n_eigen: int = 8) -> "EinsteinFactor":
        """Round S^m scaled so that Ric = g/2, i.e. radius sqrt(2(m-1))."""
        if m < 2:
            raise ValueError(f"sphere factor needs m >= 2, got {m}")
        a2 = 2.0 * (m - 1)
        ev = tuple(l * (l + m - 1) / a2 for l in range(n_eigen + 1))
        radius = math.sqrt(a2)
        return cls(m, sphere_area(m, radius), ev, "sphere", SphereEigenfunctions(m, radius))

    @property
    def radius(self) -> Optional[float]:
        return math.sqrt(2.0 * (self.m - 1)) if self.family == "sphere" else None


@dataclass(frozen=True)
class RigidShrinker:
    factor: EinsteinFactor
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"euclidean rank must be positive, got k={self.k}")

    @classmethod
    def gaussian(cls, k: int) -> "RigidShrinker":
        return cls(EinsteinFactor.point(), k)

    @classmethod
    def cylinder(cls, m: int, k: int) -> "RigidShrinker":
        return cls(EinsteinFactor.sphere(m), k)

    @property
    def m(self) -> int:
        return self.factor.m

    @property
    def n(self) -> int:
        return self.factor.m + self.k

    @property
    def R(self) -> float:
        return self.factor.m / 2.0

    @property
    def R_exact(self) -> Fraction:
        return Fraction(self.factor.m, 2)

    @property
    def beta(self) -> float:
        """n/2 - R, which equals Delta f = k/2."""
        return self.k / 2.0

    @property
    def family(self) -> str:
        return "gaussian" if self.factor.m == 0 else "cylinder"

    @property
    def descriptor(self) -> str:
        if self.family == "gaussian":
            return f"gaussian:k={self.k}"
        return f"cylinder:m={self.m},k={self.k}"

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "m": self.m,
            "k": self.k,
            "n": self.n,
            "R": self.R,
            "V_N": self.factor.volume,
        }

    # -- potential ---------------------------------------------------------

    def _y(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} euclidean coordinates, got shape {y.shape}")
        return y

    def potential(self, y) -> float:
        y = self._y(y)
        return np.sum(y * y, axis=-1) / 4.0

    def grad_potential(self, y) -> np.ndarray:
        return self._y(y) / 2.0

    def laplacian_potential(self) -> float:
        return self.k / 2.0

    # -- sublevel sets -----------------------------------------------------

    @property
    def volume_constant(self) -> float:
        """c in Vol(D_t) = c t^(k/2)."""
        return self.factor.volume * unit_ball_volume(self.k) * 2.0**self.k

    def sublevel_volume(self, t: float) -> float:
        if not t > 0:
            raise ValueError(f"t must be positive, got {t!r}")
        return self.factor.volume * unit_ball_volume(self.k) * (2.0 * math.sqrt(t)) ** self.k

    def boundary_area(self, t: float) -> float:
        """Area of {f = t}; equals sqrt(t) * dVol(D_t)/dt by the co-area formula."""
        if not t > 0:
            raise ValueError(f"t must be positive, got {t!r}")
        k = self.k
        return self.factor.volume * k * unit_ball_volume(k) * (2.0 * math.sqrt(t)) ** (k - 1)

    def rho_volume(self, rho: float) -> float:
        """Vol(Omega(rho)) = Vol(D_{rho^2/4})."""
        return self.sublevel_volume(rho * rho / 4.0)


def richardson_derivative(fn, x: float, step: float) -> float:
    """Central difference with one Richardson extrapolation, O(step^4)."""
    d1 = (fn(x + step) - fn(x - step)) / (2.0 * step)
    h2 = step / 2.0
    d2 = (fn(x + h2) - fn(x - h2)) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("grid needs at least two points")
    if np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be positive and strictly increasing")
    return g


def coarea_check(model: RigidShrinker, t_grid, tol: float = 1e-6) -> IdentityEntry:
    """(n - 2R) V(rho) = rho V'(rho) on the rho-images of ``t_grid``."""
    t = _check_grid(t_grid)
    rho = t_to_rho(t)
    expo = model.n - 2 * model.R
    worst = 0.0
    for r in rho:
        v = model.rho_volume(r)
        dv = richardson_derivative(model.rho_volume, r, 1e-3 * r)
        worst = max(worst, abs(expo * v - r * dv) / (expo * v))
    slope = loglog_slope(rho, [model.rho_volume(r) for r in rho])
    return IdentityEntry(
        id="volume.coarea",
        params={"model": model.descriptor, "t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size)},
        residual=worst,
        tol=tol,
        engine="closed-form",
        details={"rho_slope": slope, "expected_slope": expo},
    )
