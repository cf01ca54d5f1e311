"""Weighted sublevel integrals H, J, h and the frequency N = J / H.

Two independent engines:

* ``closed-form``: per-mode Beta-function reduction (polynomial modes only),
  giving each mode's H and J as exact power laws in t;
* ``quadrature``: adaptive Gauss-Kronrod on the radial densities from
  :mod:`shrinkerlab.harmonics` (any combination, including exponential modes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as quad
from .geometry import RigidShrinker, richardson_derivative
from .harmonics import (
    HarmonicCombination,
    PolynomialMode,
    ZeroFunctionError,
    energy_terms,
    mass_terms,
    validate,
)
from .report import IdentityEntry

ENGINES = ("closed-form", "quadrature")
DERIV_REL_STEP = 1e-3


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class ModeIntegral:
    """H_i(t) = h_coef t^exponent and J_i(t) = j_coef t^exponent for one mode."""

    mode: PolynomialMode
    h_coef: float
    j_coef: float
    exponent: float


def mode_integral_table(model: RigidShrinker, u: HarmonicCombination, alpha: float) -> list:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    validate(u, model)
    if not u.is_polynomial:
        raise EngineError("closed-form engine only handles polynomial modes")
    k, vn = model.k, model.factor.volume
    rows = []
    for c, mode in u.nonzero_terms:
        d = mode.degree
        h_coef = vn * c * c * 2.0 ** (2 * d + k - 1) * quad.beta(d + k / 2.0, alpha + 1.0)
        if d == 0:
            j_coef = 0.0
        else:
            j_coef = (vn * c * c * d * (2 * d + k - 2) * 2.0 ** (2 * d + k - 3)
                      * quad.beta(d + (k - 2) / 2.0, alpha + 2.0))
        rows.append(ModeIntegral(mode, h_coef, j_coef, d + k / 2.0 + alpha))
    return rows


def resolve_engine(u: HarmonicCombination, engine: str) -> str:
    if engine == "auto":
        return "closed-form" if u.is_polynomial else "quadrature"
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def _check_t(t: float) -> None:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")


def _radial_sum(terms, weight: float, t: float, tol_rel: float, tol_abs: float) -> float:
    total = 0.0
    for term in terms:
        g = quad.RadialIntegrand(term.power, weight, t, term.profile, term.coef)
        total += quad.integrate_radial(g, tol_rel, tol_abs).value
    return total


def H_of_t(model: RigidShrinker, u: HarmonicCombination, alpha: float, t: float,
           engine: str = "auto", tol_rel: float = 1e-12, tol_abs: float = 1e-300) -> float:
    """int over D_t of u^2 (t - f)^alpha."""
    _check_t(t)
    engine = resolve_engine(u, engine)
    if engine == "closed-form":
        return sum(r.h_coef * t**r.exponent for r in mode_integral_table(model, u, alpha))
    return _radial_sum(mass_terms(u, model), alpha, t, tol_rel, tol_abs)


def J_of_t(model: RigidShrinker, u: HarmonicCombination, alpha: float, t: float,
           engine: str = "auto", tol_rel: float = 1e-12, tol_abs: float = 1e-300) -> float:
    """int over D_t of |grad u|^2 (t - f)^(alpha + 1)."""
    _check_t(t)
    engine = resolve_engine(u, engine)
    if engine == "closed-form":
        return sum(r.j_coef * t**r.exponent for r in mode_integral_table(model, u, alpha))
    return _radial_sum(energy_terms(u, model), alpha + 1.0, t, tol_rel, tol_abs)


def h_of_t(model, u, t, engine="auto", **kw) -> float:
    return H_of_t(model, u, 0.0, t, engine, **kw)


def N_of_t(model: RigidShrinker, u: HarmonicCombination, alpha: float, t: float,
           engine: str = "auto", **kw) -> float:
    """Frequency J/H; at alpha = 0 the denominator is h, which coincides with H."""
    if u.is_zero:
        raise ZeroFunctionError("frequency of the zero function is undefined")
    denom = h_of_t(model, u, t, engine, **kw) if alpha == 0 else H_of_t(model, u, alpha, t, engine, **kw)
    return J_of_t(model, u, alpha, t, engine, **kw) / denom


def dH_dt(model, u, alpha, t, engine="auto", **kw) -> float:
    """H'(t): analytic for closed-form, Richardson central differences otherwise."""
    engine = resolve_engine(u, engine)
    if engine == "closed-form":
        return sum(r.h_coef * r.exponent * t ** (r.exponent - 1.0)
                   for r in mode_integral_table(model, u, alpha))
    return richardson_derivative(lambda s: H_of_t(model, u, alpha, s, engine, **kw), t, DERIV_REL_STEP * t)


@dataclass
class FrequencyProfile:
    model: RigidShrinker
    u: HarmonicCombination
    alpha: float
    t_grid: np.ndarray
    H: np.ndarray
    J: np.ndarray
    h: np.ndarray
    N: np.ndarray
    engine: str
    extra: dict = field(default_factory=dict)


def frequency_profile(model, u, alpha, t_grid, engine="auto", **kw) -> FrequencyProfile:
    if u.is_zero:
        raise ZeroFunctionError("frequency of the zero function is undefined")
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t grid must be positive and strictly increasing")
    if engine == "both":
        a = frequency_profile(model, u, alpha, t, "quadrature", **kw)
        if not u.is_polynomial:
            return a
        b = frequency_profile(model, u, alpha, t, "closed-form", **kw)
        disagreement = max(_rel_gap(a.H, b.H), _rel_gap(a.J, b.J), _rel_gap(a.h, b.h))
        b.engine = "both"
        b.extra["engine_disagreement"] = disagreement
        return b
    eng = resolve_engine(u, engine)
    H = np.array([H_of_t(model, u, alpha, s, eng, **kw) for s in t])
    J = np.array([J_of_t(model, u, alpha, s, eng, **kw) for s in t])
    h = H.copy() if alpha == 0 else np.array([h_of_t(model, u, s, eng, **kw) for s in t])
    return FrequencyProfile(model, u, alpha, t, H, J, h, J / (h if alpha == 0 else H), eng)


def _rel_gap(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.maximum(np.abs(a), np.abs(b))
    gap = np.where(scale > 0, np.abs(a - b) / np.where(scale > 0, scale, 1.0), 0.0)
    return float(np.max(gap)) if gap.size else 0.0


def log_grid(t_min: float = 1e-2, t_max: float = 1e2, ppd: int = 40) -> np.ndarray:
    """Log-spaced grid with ``ppd`` points per decade (endpoint excluded)."""
    decades = math.log10(t_max / t_min)
    n = max(int(round(decades * ppd)), 2)
    return t_min * 10.0 ** (np.arange(n) * decades / n)


def _params(model, u, alpha, t) -> dict:
    t = np.asarray(t, float)
    return {
        "model": model.descriptor,
        "u": ";".join(u.labels()),
        "alpha": float(alpha),
        "t_min": float(t.min()),
        "t_max": float(t.max()),
        "points": int(t.size),
    }


# -- differential identities ---------------------------------------------------


def ode_residuals(model, u, alpha, t_grid, engine="auto", **kw) -> np.ndarray:
    """|H' - (alpha+n/2-R) H/t - 2 J/((alpha+1) t)| / |H'| on the grid."""
    out = []
    for t in np.asarray(t_grid, float):
        H = H_of_t(model, u, alpha, t, engine, **kw)
        J = J_of_t(model, u, alpha, t, engine, **kw)
        dH = dH_dt(model, u, alpha, t, engine, **kw)
        rhs = (alpha + model.n / 2.0 - model.R) / t * H + 2.0 / ((alpha + 1.0) * t) * J
        out.append(abs(dH - rhs) / abs(dH))
    return np.array(out)


def check_H_ode(model, u, alpha, t_grid, engine="auto", tol=1e-6, **kw) -> IdentityEntry:
    if alpha < 2:
        raise ValueError("the H' identity is checked for alpha >= 2")
    eng = resolve_engine(u, engine)
    res = ode_residuals(model, u, alpha, t_grid, eng, **kw)
    return IdentityEntry("frequency.H_ode", _params(model, u, alpha, t_grid), float(res.max()), tol, eng)


def check_log_derivative(model, u, alpha, t_grid, engine="auto", tol=1e-6, **kw) -> IdentityEntry:
    """d/dt ln H = (alpha + n/2 - R)/t + 2 N / ((alpha + 1) t)."""
    eng = resolve_engine(u, engine)
    worst = 0.0
    for t in np.asarray(t_grid, float):
        H = H_of_t(model, u, alpha, t, eng, **kw)
        lhs = dH_dt(model, u, alpha, t, eng, **kw) / H
        N = J_of_t(model, u, alpha, t, eng, **kw) / H
        rhs = (alpha + model.n / 2.0 - model.R) / t + 2.0 * N / ((alpha + 1.0) * t)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return IdentityEntry("frequency.log_derivative", _params(model, u, alpha, t_grid), worst, tol, eng)


def check_general_hj(model, u, alpha, t_grid, engine="auto", tol=1e-6, **kw) -> IdentityEntry:
    """H' identity in the shifted normalization f0 = f + R (|grad f0|^2 = f0 - R).

    With H0(t) = H(t - R), the identity keeps the two curvature integrals:
    H0' = (alpha + n/2) H0/t + alpha R H0_{alpha-1}/t + 2 J0/(t(alpha+1)) - R H0/t.
    """
    if alpha < 2:
        raise ValueError("the general H' identity is checked for alpha >= 2")
    eng = resolve_engine(u, engine)
    R, n = model.R, model.n
    worst = 0.0
    for t in np.asarray(t_grid, float):
        s = t - R
        if s <= 0:
            continue
        H0 = H_of_t(model, u, alpha, s, eng, **kw)
        H0m = H_of_t(model, u, alpha - 1.0, s, eng, **kw)
        J0 = J_of_t(model, u, alpha, s, eng, **kw)
        dH0 = dH_dt(model, u, alpha, s, eng, **kw)
        rhs = (alpha + n / 2.0) * H0 / t + alpha * R * H0m / t + 2.0 * J0 / (t * (alpha + 1.0)) - R * H0 / t
        worst = max(worst, abs(dH0 - rhs) / abs(dH0))
    return IdentityEntry("frequency.H_ode_shifted", _params(model, u, alpha, t_grid), worst, tol, eng)


def check_pure_mode_law(model, mode: PolynomialMode, alpha, t_grid, engine="closed-form",
                        tol=None, **kw) -> IdentityEntry:
    """N = degree * (alpha + 1) / 2 for a single polynomial mode."""
    eng = resolve_engine(HarmonicCombination.of((1.0, mode)), engine)
    if tol is None:
        tol = 1e-10 if eng == "closed-form" else 1e-7
    u = HarmonicCombination.of((1.0, mode))
    expected = mode.degree * (alpha + 1.0) / 2.0
    worst = max(abs(N_of_t(model, u, alpha, t, eng, **kw) - expected) / max(1.0, expected)
                for t in np.asarray(t_grid, float))
    return IdentityEntry("frequency.pure_mode_law", _params(model, u, alpha, t_grid), worst, tol, eng,
                         details={"expected_N": expected})


def check_bounds(model, u, alpha, t_grid, engine="auto", **kw) -> IdentityEntry:
    """H(t) <= t^alpha h(t) and h(t) <= H(s)/(s-t)^alpha for grid pairs t < s."""
    prof = frequency_profile(model, u, alpha, t_grid, engine, **kw)
    t, H, h = prof.t_grid, prof.H, prof.h
    worst = float(np.max((H - t**alpha * h) / (t**alpha * h)))
    for i in range(t.size):
        for j in range(i + 1, t.size):
            bound = H[j] / (t[j] - t[i]) ** alpha
            worst = max(worst, (h[i] - bound) / bound)
    # a negative worst means strict inequality everywhere
    return IdentityEntry("frequency.mass_bounds", _params(model, u, alpha, t_grid), max(worst, 0.0), 1e-12,
                         prof.engine)


def check_engine_agreement(model, u, alpha, t_grid, tol=1e-8, **kw) -> IdentityEntry:
    a = frequency_profile(model, u, alpha, t_grid, "closed-form")
    b = frequency_profile(model, u, alpha, t_grid, "quadrature", **kw)
    gap = max(_rel_gap(a.H, b.H), _rel_gap(a.J, b.J), _rel_gap(a.h, b.h))
    return IdentityEntry("frequency.engine_agreement", _params(model, u, alpha, t_grid), gap, tol, "both")


def check_P1(model, u, alpha, window, engine="auto", refine=200, **kw) -> IdentityEntry:
    """t^(-2m/(alpha+1)) H(t) strictly increasing on the window, m = inf N there."""
    t1, t2 = map(float, window)
    if not (0 < t1 < t2):
        raise ValueError("window must satisfy 0 < t1 < t2")
    grid = np.geomspace(t1, t2, refine)
    params = _params(model, u, alpha, grid)
    prof = frequency_profile(model, u, alpha, grid, engine, **kw)
    m = float(prof.N.min())
    if not m > 0:
        return IdentityEntry.skip("frequency.P1", params, f"inf N over the window is {m!r}, need > 0",
                                  engine=prof.engine)
    F = grid ** (-2.0 * m / (alpha + 1.0)) * prof.H
    steps = np.diff(F)
    bad = int(np.sum(steps <= 0))
    return IdentityEntry("frequency.P1", params, float(bad), 0.0, prof.engine,
                         details={"m": m, "min_relative_increase": float(np.min(steps / F[:-1]))})


def check_monotone_frequency(model, u, alpha, t_grid, engine="auto", slack=1e-10, **kw) -> IdentityEntry:
    """t^(sqrt(n) - 1) N(t) nondecreasing along the grid.

    Any decrease beyond the slack is recorded verbatim as a counterexample.
    """
    if alpha < 2:
        raise ValueError("monotonicity of t^(sqrt n - 1) N is scanned for alpha >= 2")
    prof = frequency_profile(model, u, alpha, t_grid, engine, **kw)
    G = prof.t_grid ** (math.sqrt(model.n) - 1.0) * prof.N
    scale = max(float(np.max(np.abs(G))), 1e-300)
    drops = (G[:-1] - G[1:]) / scale
    worst = max(float(np.max(drops)), 0.0) if drops.size else 0.0
    counterexamples = [
        {"t": float(prof.t_grid[i]), "t_next": float(prof.t_grid[i + 1]), "G": float(G[i]), "G_next": float(G[i + 1])}
        for i in np.nonzero(drops > slack)[0]
    ]
    details = {"counterexamples": counterexamples} if counterexamples else {}
    return IdentityEntry("frequency.monotone_tN", _params(model, u, alpha, t_grid), worst, slack,
                         prof.engine, details=details)


def check_nlim_identity(model, u, t_grid, engine="auto", tol=1e-6, **kw) -> IdentityEntry:
    """At alpha = 0: N = -(n/2 - R)/2 + t h'(t) / (2 h(t)), h' by Richardson differences."""
    eng = resolve_engine(u, engine)
    beta = model.n / 2.0 - model.R
    worst = 0.0
    for t in np.asarray(t_grid, float):
        fn = lambda s: h_of_t(model, u, s, eng, **kw)  # noqa: E731
        h = fn(t)
        dh = richardson_derivative(fn, t, DERIV_REL_STEP * t)
        N = J_of_t(model, u, 0.0, t, eng, **kw) / h
        rhs = -0.5 * beta + 0.5 * t * dh / h
        worst = max(worst, abs(N - rhs) / max(1.0, abs(N)))
    return IdentityEntry("frequency.nlim_identity", _params(model, u, 0.0, t_grid), worst, tol, eng)
