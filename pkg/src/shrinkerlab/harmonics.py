"""Separable harmonic functions on rigid shrinkers.

Polynomial modes are solid harmonics r^d Y(y/|y|) on the Euclidean factor,
with Y unit-normalized on S^(k-1). The angular basis index 0 is always the
zonal harmonic about the y_1 axis, so degree 1 / index 0 is proportional
to y_1 for every k. Exponential modes phi_j(theta) cosh(sqrt(mu_j) y) or
sinh(...) live on k = 1 cylinders.

Quadratic integrals of a combination are diagonal sums over its modes;
the per-mode radial densities are exposed by :func:`mass_terms`,
:func:`energy_terms` and the boundary helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy import optimize, special

from .geometry import RigidShrinker, sphere_area


class MissingEigenfunctionHook(ValueError):
    pass


class ZeroFunctionError(ValueError):
    pass


def sphere_measure(k: int) -> float:
    """|S^(k-1)|; for k = 1 this is the counting measure of {-1, +1}."""
    return sphere_area(k - 1)


def basis_size(k: int, d: int) -> int:
    """Number of constructed angular harmonics of degree d in k variables."""
    if d < 0:
        return 0
    if k == 1:
        return 1 if d <= 1 else 0
    if k == 2:
        return 1 if d == 0 else 2
    if k == 3:
        return 2 * d + 1
    return 1  # zonal only for k >= 4


def harmonic_dim(k: int, j: int) -> int:
    """Dimension of homogeneous harmonic polynomials of degree j in k variables."""
    if j < 0:
        return 0
    if j == 0:
        return 1
    if j == 1:
        return k
    return math.comb(k + j - 1, j) - math.comb(k + j - 3, j - 2)


def _zonal_norm(k: int, d: int) -> float:
    # int_{S^{k-1}} C_d^lam(x_1)^2 = |S^{k-2}| * Gegenbauer L2 norm on [-1, 1]
    lam = (k - 2) / 2.0
    g = math.pi * 2.0 ** (1 - 2 * lam) * math.gamma(d + 2 * lam) / (
        math.factorial(d) * (d + lam) * math.gamma(lam) ** 2
    )
    return math.sqrt(sphere_area(k - 2) * g)


def _tesseral_norm(d: int, j: int) -> float:
    return math.sqrt(2.0 * (2 * d + 1) / (4 * math.pi) * math.factorial(d - j) / math.factorial(d + j))


def _legendre(d: int, j: int, x):
    # drop the Condon-Shortley phase that lpmv includes
    return (-1) ** j * special.lpmv(j, d, x)


def angular(k: int, d: int, idx: int, x: np.ndarray) -> np.ndarray:
    """Unit-normalized angular harmonic evaluated on unit vectors x of shape (N, k)."""
    x = np.asarray(x, dtype=float)
    if not 0 <= idx < basis_size(k, d):
        raise ValueError(f"no angular harmonic with k={k}, d={d}, idx={idx}")
    x1 = x[:, 0]
    if k == 1:
        return (1.0 if d == 0 else np.sign(x1)) / math.sqrt(2.0) * np.ones_like(x1)
    if k == 2:
        if d == 0:
            return np.full_like(x1, 1.0 / math.sqrt(2 * math.pi))
        theta = np.arctan2(x[:, 1], x1)
        trig = np.cos if idx == 0 else np.sin
        return trig(d * theta) / math.sqrt(math.pi)
    if idx == 0:
        lam = (k - 2) / 2.0
        return special.eval_gegenbauer(d, lam, np.clip(x1, -1.0, 1.0)) / _zonal_norm(k, d)
    j = (idx + 1) // 2
    phi = np.arctan2(x[:, 2], x[:, 1])
    trig = np.cos if idx % 2 == 1 else np.sin
    return _tesseral_norm(d, j) * _legendre(d, j, np.clip(x1, -1.0, 1.0)) * trig(j * phi)


@lru_cache(maxsize=None)
def angular_sup(k: int, d: int, idx: int) -> float:
    """sup over S^(k-1) of |Y_{d,idx}|."""
    if k == 1:
        return 1.0 / math.sqrt(2.0)
    if k == 2:
        return 1.0 / math.sqrt(2 * math.pi) if d == 0 else 1.0 / math.sqrt(math.pi)
    if idx == 0:
        lam = (k - 2) / 2.0
        return float(special.eval_gegenbauer(d, lam, 1.0)) / _zonal_norm(k, d)
    j = (idx + 1) // 2
    xs = np.linspace(-1.0, 1.0, 4001)
    vals = np.abs(_legendre(d, j, xs))
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    res = optimize.minimize_scalar(lambda s: -abs(_legendre(d, j, s)), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    return _tesseral_norm(d, j) * max(float(vals[i]), -float(res.fun))


@dataclass(frozen=True)
class PolynomialMode:
    degree: int
    index: int = 0

    def __post_init__(self):
        if self.degree < 0 or self.index < 0:
            raise ValueError("degree and index must be nonnegative")

    def label(self) -> str:
        return f"poly:d={self.degree},idx={self.index}"


@dataclass(frozen=True)
class ExponentialMode:
    eigen_index: int
    parity: str = "even"

    def __post_init__(self):
        if self.eigen_index < 1:
            raise ValueError("exponential modes need eigen_index >= 1")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")

    def label(self) -> str:
        return f"exp:j={self.eigen_index},parity={self.parity}"


Mode = Union[PolynomialMode, ExponentialMode]


@dataclass(frozen=True)
class HarmonicCombination:
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((float(c), m) for c, m in self.terms)
        modes = [m for _, m in terms]
        if len(set(modes)) != len(modes):
            raise ValueError("modes in a combination must be pairwise distinct")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms) -> "HarmonicCombination":
        return cls(tuple(terms))

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c, _ in self.terms)

    @property
    def nonzero_terms(self) -> tuple:
        return tuple((c, m) for c, m in self.terms if c != 0.0)

    @property
    def is_polynomial(self) -> bool:
        return all(isinstance(m, PolynomialMode) for _, m in self.nonzero_terms)

    def scaled(self, factor: float) -> "HarmonicCombination":
        return HarmonicCombination(tuple((factor * c, m) for c, m in self.terms))

    def __add__(self, other: "HarmonicCombination") -> "HarmonicCombination":
        acc = dict((m, c) for c, m in self.terms)
        for c, m in other.terms:
            acc[m] = acc.get(m, 0.0) + c
        return HarmonicCombination(tuple((c, m) for m, c in acc.items()))

    def labels(self) -> list:
        return [f"{m.label()},c={c!r}" for c, m in self.terms]


def validate(u: HarmonicCombination, model: RigidShrinker) -> None:
    for _, mode in u.terms:
        if isinstance(mode, PolynomialMode):
            if mode.index >= basis_size(model.k, mode.degree):
                raise ValueError(f"{mode.label()} is not available for k={model.k}")
        else:
            if model.k != 1:
                raise ValueError("exponential modes require euclidean rank k = 1")
            if mode.eigen_index >= len(model.factor.eigenvalues):
                raise ValueError(f"{mode.label()}: factor has no eigenvalue with that index")


def constant(k: int, value: float = 1.0) -> HarmonicCombination:
    """The function u = value."""
    return HarmonicCombination.of((value * math.sqrt(sphere_measure(k)), PolynomialMode(0, 0)))


def coordinate(k: int, value: float = 1.0) -> HarmonicCombination:
    """The function u = value * y_1."""
    return HarmonicCombination.of((value * math.sqrt(sphere_measure(k) / k), PolynomialMode(1, 0)))


def _mu(model: RigidShrinker, mode: ExponentialMode) -> float:
    return model.factor.eigenvalues[mode.eigen_index]


def _profile_fn(mode: ExponentialMode):
    return np.cosh if mode.parity == "even" else np.sinh


def evaluate_array(u: HarmonicCombination, model: RigidShrinker, y, theta=None) -> np.ndarray:
    """Vectorized evaluation at euclidean points y (N, k) and factor points theta."""
    validate(u, model)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if y.shape[1] != model.k:
        raise ValueError(f"expected {model.k} euclidean coordinates, got {y.shape[1]}")
    r = np.linalg.norm(y, axis=1)
    safe = np.where(r > 0, r, 1.0)
    unit = y / safe[:, None]
    unit[r == 0] = np.eye(model.k)[0]
    out = np.zeros(y.shape[0])
    for c, mode in u.terms:
        if c == 0.0:
            continue
        if isinstance(mode, PolynomialMode):
            out += c * r**mode.degree * angular(model.k, mode.degree, mode.index, unit)
        else:
            hook = model.factor.hook
            if hook is None:
                raise MissingEigenfunctionHook(f"{mode.label()} needs a factor eigenfunction hook")
            if theta is None:
                raise ValueError(f"{mode.label()} needs a factor point theta")
            s = math.sqrt(_mu(model, mode))
            out += c * hook.value(mode.eigen_index, theta) * _profile_fn(mode)(s * y[:, 0])
    return out


def evaluate(u: HarmonicCombination, model: RigidShrinker, y, theta=None) -> float:
    th = None if theta is None else np.atleast_2d(theta)
    return float(evaluate_array(u, model, np.atleast_2d(y), th)[0])


def max_degree(u: HarmonicCombination) -> int:
    degs = [m.degree for _, m in u.nonzero_terms if isinstance(m, PolynomialMode)]
    return max(degs) if degs else 0


def min_degree(u: HarmonicCombination) -> int:
    degs = [m.degree for _, m in u.nonzero_terms if isinstance(m, PolynomialMode)]
    return min(degs) if degs else 0


def degree_to_growth(degree: float) -> float:
    """Polynomial degree in |y| to growth order in t (sup_{D_t}|u| ~ t^order)."""
    return degree / 2.0


def growth_order(u: HarmonicCombination) -> float:
    if u.is_zero:
        raise ZeroFunctionError("growth order of the zero function is undefined")
    if not u.is_polynomial:
        return math.inf
    return degree_to_growth(max_degree(u))


def dim_poly_space(model: RigidShrinker, degree_cap: int) -> int:
    if degree_cap < 0:
        raise ValueError("degree cap must be nonnegative")
    return sum(harmonic_dim(model.k, j) for j in range(degree_cap + 1))


def envelope_bounds(u: HarmonicCombination, model: RigidShrinker, t: float) -> tuple:
    """(lo, hi) with lo <= u <= hi on D_t, from the constant part +/- the mode envelope."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    validate(u, model)
    rho = 2.0 * math.sqrt(t)
    const, rest = 0.0, 0.0
    for c, mode in u.nonzero_terms:
        if isinstance(mode, PolynomialMode):
            if mode.degree == 0:
                const += c * float(angular(model.k, 0, 0, np.eye(model.k)[:1])[0])
            else:
                rest += abs(c) * angular_sup(model.k, mode.degree, mode.index) * rho**mode.degree
        else:
            hook = model.factor.hook
            if hook is None:
                raise MissingEigenfunctionHook(f"{mode.label()} needs a factor eigenfunction hook")
            s = math.sqrt(_mu(model, mode))
            rest += abs(c) * hook.sup(mode.eigen_index) * abs(float(_profile_fn(mode)(s * rho)))
    return const - rest, const + rest


def sup_on_sublevel(u: HarmonicCombination, model: RigidShrinker, t: float) -> float:
    """sup of |u| over D_t (exact for a single mode, an upper bound for mixtures)."""
    lo, hi = envelope_bounds(u, model, t)
    return max(abs(lo), abs(hi))


# -- radial densities --------------------------------------------------------


@dataclass(frozen=True)
class RadialTerm:
    """coef * r**power * profile(r): a quadratic density integrated over N x S_r."""

    coef: float
    power: float
    profile: Optional[Callable] = None


def mass_terms(u: HarmonicCombination, model: RigidShrinker) -> list:
    """Radial densities of u^2 (one per mode)."""
    validate(u, model)
    vn, k = model.factor.volume, model.k
    out = []
    for c, mode in u.nonzero_terms:
        if isinstance(mode, PolynomialMode):
            out.append(RadialTerm(vn * c * c, 2 * mode.degree + k - 1))
        else:
            s = math.sqrt(_mu(model, mode))
            g = _profile_fn(mode)
            out.append(RadialTerm(2.0 * c * c, 0, lambda r, g=g, s=s: g(s * r) ** 2))
    return out


def energy_terms(u: HarmonicCombination, model: RigidShrinker) -> list:
    """Radial densities of |grad u|^2; constant modes contribute nothing."""
    validate(u, model)
    vn, k = model.factor.volume, model.k
    out = []
    for c, mode in u.nonzero_terms:
        if isinstance(mode, PolynomialMode):
            d = mode.degree
            if d == 0:
                continue
            # radial d^2 plus angular eigenvalue d(d+k-2)
            out.append(RadialTerm(vn * c * c * d * (2 * d + k - 2), 2 * d + k - 3))
        else:
            mu = _mu(model, mode)
            s = math.sqrt(mu)
            # g'^2 + mu g^2 = mu cosh(2 s y) for both parities
            out.append(RadialTerm(2.0 * c * c * mu, 0, lambda r, s=s: np.cosh(2 * s * r)))
    return out


def _eval_terms(terms, rho: float) -> float:
    total = 0.0
    for term in terms:
        v = term.coef * rho**term.power
        if term.profile is not None:
            v *= float(term.profile(np.asarray(rho)))
        total += v
    return total


def boundary_mass(u: HarmonicCombination, model: RigidShrinker, t: float) -> float:
    """int over {f = t} of u^2 d(sigma)."""
    return _eval_terms(mass_terms(u, model), 2.0 * math.sqrt(t))


def boundary_energy(u: HarmonicCombination, model: RigidShrinker, t: float) -> float:
    """int over {f = t} of |grad u|^2 d(sigma)."""
    return _eval_terms(energy_terms(u, model), 2.0 * math.sqrt(t))


def boundary_flux(u: HarmonicCombination, model: RigidShrinker, t: float) -> float:
    """int over {f = t} of u * du/dnu d(sigma), outward normal."""
    validate(u, model)
    rho = 2.0 * math.sqrt(t)
    vn, k = model.factor.volume, model.k
    total = 0.0
    for c, mode in u.nonzero_terms:
        if isinstance(mode, PolynomialMode):
            total += vn * c * c * mode.degree * rho ** (2 * mode.degree + k - 2)
        else:
            s = math.sqrt(_mu(model, mode))
            total += c * c * s * math.sinh(2 * s * rho)
    return total


def axis_mass(u: HarmonicCombination, model: RigidShrinker) -> float:
    """int over N x {y = 0} of u^2, i.e. the L^2 mass of u on the factor at the origin."""
    validate(u, model)
    total = 0.0
    for c, mode in u.nonzero_terms:
        if isinstance(mode, PolynomialMode):
            if mode.degree == 0:
                total += model.factor.volume * c * c / sphere_measure(model.k)
        elif mode.parity == "even":
            total += c * c
    return total


def available_modes(k: int, max_deg: int) -> list:
    return [PolynomialMode(d, i) for d in range(max_deg + 1) for i in range(basis_size(k, d))]


def random_polynomial_combination(rng: np.random.Generator, k: int, max_deg: int,
                                  n_terms: int, with_constant: Optional[bool] = None) -> HarmonicCombination:
    """Random combination of distinct polynomial modes with standard normal coefficients."""
    pool = available_modes(k, max_deg)
    nonconst = [m for m in pool if m.degree > 0]
    n_terms = max(1, min(n_terms, len(pool)))
    if with_constant is None:
        picks = [pool[i] for i in rng.choice(len(pool), size=n_terms, replace=False)]
    else:
        n_var = min(n_terms - 1 if with_constant else n_terms, len(nonconst))
        picks = [nonconst[i] for i in rng.choice(len(nonconst), size=max(n_var, 1), replace=False)]
        if with_constant:
            picks = [PolynomialMode(0, 0)] + picks
    coefs = rng.standard_normal(len(picks))
    coefs = np.where(np.abs(coefs) < 0.05, 0.05, coefs)
    return HarmonicCombination(tuple((float(c), m) for c, m in zip(coefs, picks)))
