"""Numerical oracle: log-Gamma/Beta, adaptive Gauss-Kronrod on [0, 2*sqrt(t)],
and seeded Monte Carlo over sublevel sets.

Everything here is independent of the closed-form Beta reduction used by
:mod:`shrinkerlab.frequency`; the two routes are compared against each other
in the test suite.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

DEFAULT_TOL_REL = 1e-10
DEFAULT_TOL_ABS = 1e-14
DEFAULT_PANEL_BUDGET = 10_000

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"log_gamma requires a positive finite argument, got {x!r}")
    if x < 0.5:
        # Gamma(x) Gamma(1 - x) = pi / sin(pi x), both factors positive here
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    tt = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(tt) - tt + math.log(acc)


def log_beta(a: float, b: float) -> float:
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"beta requires positive arguments, got ({a!r}, {b!r})")
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return math.exp(log_beta(a, b))


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss weights live on the odd-indexed Kronrod nodes (1, 3, 5, 7 from the end)
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


class QuadratureBudgetError(RuntimeError):
    """Adaptive refinement hit the panel budget before meeting the tolerance."""

    def __init__(self, result: QuadratureResult, target: float):
        super().__init__(
            f"panel budget exhausted: value={result.value!r}, "
            f"error estimate {result.error_estimate:.3e} > target {target:.3e}"
        )
        self.result = result
        self.target = target


def _gk15(fn, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(fn(mid + half * _NODES), dtype=float)
    kron = half * float(np.dot(_KRONROD_W, fx))
    gauss = half * float(np.dot(_GAUSS_W, fx))
    resabs = abs(half) * float(np.dot(_KRONROD_W, np.abs(fx)))
    err = max(abs(kron - gauss), 50.0 * _EPS * resabs)
    return kron, err


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol_rel: float = DEFAULT_TOL_REL,
    tol_abs: float = DEFAULT_TOL_ABS,
    max_panels: int = DEFAULT_PANEL_BUDGET,
) -> QuadratureResult:
    """Adaptive bisection with a G7/K15 pair per panel.

    ``fn`` must accept and return numpy arrays. The panel with the largest
    error estimate is split until the summed estimate drops below
    ``max(tol_rel * |I|, tol_abs)``.
    """
    if not (tol_rel > 0 and tol_abs > 0):
        raise ValueError("tolerances must be positive")
    if b < a:
        raise ValueError("integration limits must satisfy a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    value, err = _gk15(fn, a, b)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    panels, evaluations = 1, 15
    while total_err > max(tol_rel * abs(total), tol_abs):
        if panels >= max_panels:
            raise QuadratureBudgetError(
                QuadratureResult(total, total_err, evaluations),
                max(tol_rel * abs(total), tol_abs),
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        left, left_err = _gk15(fn, lo, mid)
        right, right_err = _gk15(fn, mid, hi)
        evaluations += 30
        panels += 1
        heapq.heappush(heap, (-left_err, lo, mid, left))
        heapq.heappush(heap, (-right_err, mid, hi, right))
        # resum instead of updating in place to keep roundoff from drifting
        total = math.fsum(p[3] for p in heap)
        total_err = math.fsum(-p[0] for p in heap)
    return QuadratureResult(total, total_err, evaluations)


@dataclass(frozen=True)
class RadialIntegrand:
    """coef * r**power * (t - r**2/4)**weight * profile(r) on [0, 2*sqrt(t)]."""

    power: float
    weight: float
    t: float
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = None
    coef: float = 1.0

    def __post_init__(self):
        if self.power < 0 or self.weight < 0:
            raise ValueError("radial power and weight exponent must be nonnegative")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t!r}")

    @property
    def upper(self) -> float:
        return 2.0 * math.sqrt(self.t)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        base = self.coef * r**self.power * np.clip(self.t - r * r / 4.0, 0.0, None) ** self.weight
        if self.profile is not None:
            base = base * self.profile(r)
        return base


def integrate_radial(
    g: RadialIntegrand,
    tol_rel: float = DEFAULT_TOL_REL,
    tol_abs: float = DEFAULT_TOL_ABS,
    max_panels: int = DEFAULT_PANEL_BUDGET,
) -> QuadratureResult:
    """Integrate ``g`` over [0, 2 sqrt(t)] after substituting r = 2 sqrt(t) s.

    The weight becomes t**a (1 - s**2)**a on [0, 1]; a non-integer ``a``
    leaves a weak endpoint singularity at s = 1 that adaptive bisection
    resolves.
    """
    if g.coef == 0.0:
        return QuadratureResult(0.0, 0.0, 0)
    rho = g.upper
    scale = g.coef * rho ** (g.power + 1.0) * g.t**g.weight
    p, a, profile = g.power, g.weight, g.profile

    def integrand(s):
        val = s**p * np.clip(1.0 - s * s, 0.0, None) ** a
        if profile is not None:
            val = val * profile(rho * s)
        return val

    res = integrate(integrand, 0.0, 1.0, tol_rel, max(tol_abs / abs(scale), 1e-300), max_panels)
    return QuadratureResult(scale * res.value, abs(scale) * res.error_estimate, res.evaluations)


def radial_beta_value(power: float, weight: float, t: float) -> float:
    """Closed form of the unit-coefficient radial integral without profile.

    int_0^{2 sqrt t} r^p (t - r^2/4)^a dr = 2^p t^{(p+1)/2 + a} B((p+1)/2, a+1).
    """
    return 2.0**power * t ** ((power + 1.0) / 2.0 + weight) * beta((power + 1.0) / 2.0, weight + 1.0)


def unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def sample_ball(rng: np.random.Generator, k: int, radius: float, n: int) -> np.ndarray:
    """Uniform samples in the k-ball of the given radius, shape (n, k)."""
    g = rng.standard_normal((n, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / k)
    return g * r[:, None]


def sample_sphere(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    """Uniform unit vectors on S^dim in R^(dim+1), shape (n, dim+1)."""
    g = rng.standard_normal((n, dim + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_monte_carlo(u, model, t: float, alpha: float = 0.0, samples: int = 100_000,
                     seed: int = 0, quantity: str = "mass") -> QuadratureResult:
    """Plain Monte Carlo estimate of a weighted integral over D_t.

    quantity="mass" estimates int u^2 (t-f)^alpha dv; quantity="energy"
    estimates int |grad_y u|^2 (t-f)^alpha dv for factor-independent u
    (gradient by central differences in y).
    """
    from .harmonics import ExponentialMode, evaluate_array

    k = model.k
    if k > 3:
        raise ValueError(f"Monte Carlo oracle supports k <= 3, got k={k}")
    if samples < 10_000:
        raise ValueError("Monte Carlo oracle needs at least 10^4 samples")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    if u.is_zero:
        return QuadratureResult(0.0, 0.0, samples)
    needs_factor = any(isinstance(m, ExponentialMode) for _, m in u.terms)
    if quantity == "energy" and needs_factor:
        raise ValueError("energy Monte Carlo supports factor-independent modes only")
    rng = np.random.default_rng(seed)
    rho = 2.0 * math.sqrt(t)
    y = sample_ball(rng, k, rho, samples)
    theta = None
    if needs_factor:
        theta = sample_sphere(rng, model.factor.m, samples)
    weight = np.clip(t - np.sum(y * y, axis=1) / 4.0, 0.0, None) ** alpha
    if quantity == "mass":
        vals = evaluate_array(u, model, y, theta) ** 2 * weight
    elif quantity == "energy":
        h = 1e-5 * max(rho, 1.0)
        grad_sq = np.zeros(samples)
        for i in range(k):
            e = np.zeros(k)
            e[i] = h
            d = (evaluate_array(u, model, y + e) - evaluate_array(u, model, y - e)) / (2 * h)
            grad_sq += d * d
        vals = grad_sq * weight
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    vol = model.sublevel_volume(t)
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1)) / math.sqrt(samples)
    return QuadratureResult(vol * mean, vol * se, samples)
