"""Quantitative checks of the Liouville chain and the doubling / dimension bounds
on rigid model shrinkers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import quadrature as quad
from .frequency import H_of_t, N_of_t, _params, frequency_profile, h_of_t, resolve_engine
from .geometry import RigidShrinker
from .harmonics import (
    HarmonicCombination,
    PolynomialMode,
    axis_mass,
    boundary_energy,
    boundary_flux,
    boundary_mass,
    dim_poly_space,
    energy_terms,
    envelope_bounds,
    growth_order,
    max_degree,
    min_degree,
    validate,
)
from .report import IdentityEntry


def _grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0 or np.any(t <= 0):
        raise ValueError("t grid must be nonempty and positive")
    return t


def dirichlet_energy(model: RigidShrinker, u: HarmonicCombination, t: float,
                     tol_rel: float = 1e-12, power_shift: float = 0.0, scale: float = 1.0) -> float:
    """int over D_t of |grad u|^2 * r^power_shift * scale, by radial quadrature."""
    total = 0.0
    for term in energy_terms(u, model):
        g = quad.RadialIntegrand(term.power + power_shift, 0.0, t, term.profile, term.coef * scale)
        total += quad.integrate_radial(g, tol_rel, 1e-300).value
    return total


# -- band sandwich ----------------------------------------------------------------


def band_sandwich_check(model, u, delta, t_grid, engine="auto") -> IdentityEntry:
    """delta^2 Vol(D_t) <= h(t) <= 9 delta^2 Vol(D_t) when delta < u < 3 delta on D_t."""
    t = _grid(t_grid)
    params = {**_params(model, u, 0.0, t), "delta": float(delta)}
    eng = resolve_engine(u, engine)
    for s in t:
        lo, hi = envelope_bounds(u, model, s)
        if not (lo > delta and hi < 3 * delta):
            return IdentityEntry.skip("liouville.band_sandwich", params,
                                      f"band hypothesis fails at t={s!r} (u in [{lo!r}, {hi!r}])", engine=eng)
    worst = 0.0
    for s in t:
        vol = model.sublevel_volume(s)
        h = h_of_t(model, u, s, eng)
        lower, upper = delta**2 * vol, 9 * delta**2 * vol
        worst = max(worst, (lower - h) / lower, (h - upper) / upper)
    return IdentityEntry("liouville.band_sandwich", params, max(worst, 0.0), 1e-12, eng)


# -- case I -----------------------------------------------------------------------


def case1_terms(model, u, t) -> dict:
    K = dirichlet_energy(model, u, t)
    flux = boundary_flux(u, model, t)
    bm = boundary_mass(u, model, t)
    be = boundary_energy(u, model, t)
    bound = t**0.25 * math.sqrt(bm) * math.sqrt(be / math.sqrt(t))
    return {"K": K, "flux": flux, "boundary_mass": bm, "boundary_energy": be, "cs_bound": bound}


def case1_chain_check(model, u, t_grid, tol=1e-6) -> list:
    """Divergence identity K(t) = int_{f=t} u du/dnu and the Cauchy-Schwarz bound on K."""
    t = _grid(t_grid)
    params = _params(model, u, 0.0, t)
    div_worst, cs_worst = 0.0, 0.0
    trivial = u.is_polynomial and max_degree(u) == 0
    for s in t:
        c = case1_terms(model, u, s)
        if c["K"] == 0.0 and c["flux"] == 0.0:
            continue
        div_worst = max(div_worst, abs(c["K"] - c["flux"]) / abs(c["K"]))
        cs_worst = max(cs_worst, (c["K"] - c["cs_bound"]) / c["K"])
    details = {"trivial": True} if trivial else {}
    return [
        IdentityEntry("liouville.case1_divergence", params, div_worst, tol, "quadrature", details=details),
        IdentityEntry("liouville.case1_cauchy_schwarz", params, max(cs_worst, 0.0), 1e-12, "quadrature",
                      details=details),
    ]


# -- case II ----------------------------------------------------------------------


def case2_terms(model, u, t) -> dict:
    """All pieces of the weighted integration-by-parts identity at level t.

    lhs = int_{D_t} |grad u|^2 f^(1-beta), beta = n/2 - R = k/2, and
    rhs = t^(1-beta) K(t) + (beta-1)/2 * (t^(1/2-beta) int_{f=t} u^2 - axis),
    where axis = k w_k 2^(k-1) int_N u(theta, 0)^2 is the flux of the
    divergence-free field f^(-beta) grad f through a small sphere around y = 0.
    """
    k = model.k
    beta = k / 2.0
    # |grad u|^2 density times (r^2/4)^(1-beta): shift the power by 2 - k
    lhs = dirichlet_energy(model, u, t, power_shift=2.0 - k, scale=4.0 ** (beta - 1.0))
    K = dirichlet_energy(model, u, t)
    bm = boundary_mass(u, model, t)
    axis = k * quad.unit_ball_volume(k) * 2.0 ** (k - 1) * axis_mass(u, model)
    interior = t ** (1.0 - beta) * K
    boundary = (beta - 1.0) / 2.0 * t ** (0.5 - beta) * bm
    axis_term = (beta - 1.0) / 2.0 * axis
    rhs = interior + boundary - axis_term
    alt_rhs = (beta + 1.0) * t ** (0.5 - beta) * bm + interior
    return {"lhs": lhs, "rhs": rhs, "interior": interior, "boundary": boundary,
            "axis": axis_term, "alt_rhs": alt_rhs}


def case2_identity_check(model, u, t_grid, tol=1e-6) -> list:
    t = _grid(t_grid)
    params = _params(model, u, 0.0, t)
    worst = 0.0
    alt_ratios = []
    for s in t:
        c = case2_terms(model, u, s)
        scale = max(abs(c["lhs"]), abs(c["interior"]), abs(c["boundary"]), abs(c["axis"]), 1e-300)
        worst = max(worst, abs(c["lhs"] - c["rhs"]) / scale)
        if c["lhs"] != 0.0:
            alt_ratios.append(c["alt_rhs"] / c["lhs"])
    main = IdentityEntry("liouville.case2_identity", params, worst, tol, "quadrature")
    info = IdentityEntry.skip(
        "liouville.case2_alt_coefficient", params,
        "informational: coefficient (beta+1) on the boundary term instead of (beta-1)/2",
        engine="quadrature",
        details={"alt_rhs_over_lhs": alt_ratios[:1] + alt_ratios[-1:]} if alt_ratios else {},
    )
    return [main, info]


# -- limits of N ------------------------------------------------------------------


def constant_part(u: HarmonicCombination) -> float:
    return sum(c for c, m in u.nonzero_terms if isinstance(m, PolynomialMode) and m.degree == 0)


def n_limit_scan(model, u, decades: float = 4.0, engine="auto", tol=1e-3, t_max=None) -> IdentityEntry:
    """N at alpha = 0 at both ends of a log grid [10^-decades, 10^decades].

    Asserts N -> 0 at the small end when u has a nonzero constant part and
    N -> max_degree / 2 at the large end for polynomial u. Exponential
    inputs are scanned on [10^-decades, 16] and must outgrow every
    polynomial frequency available on the model.
    """
    eng = resolve_engine(u, engine)
    lo = 10.0 ** (-decades)
    hi = t_max if t_max is not None else (10.0 ** decades if u.is_polynomial else 16.0)
    grid = np.geomspace(lo, hi, int(8 * (math.log10(hi / lo))) + 1)
    prof = frequency_profile(model, u, 0.0, grid, eng)
    N = prof.N
    params = {**_params(model, u, 0.0, grid)}
    details = {"N_small": float(N[0]), "N_large": float(N[-1])}
    residual = 0.0
    if constant_part(u) != 0.0:
        residual = max(residual, abs(float(N[0])))
    else:
        details["N_small_expected"] = min_degree(u) / 2.0
    if u.is_polynomial:
        target = max_degree(u) / 2.0
        details["N_large_expected"] = target
        residual = max(residual, abs(float(N[-1]) - target))
    else:
        n_one = N_of_t(model, u, 0.0, 1.0, eng)
        poly_cap = max((m.degree for m in _all_poly_modes(model, 6)), default=0) / 2.0
        details.update({"N_at_1": n_one, "max_polynomial_N": poly_cap})
        # failure if N does not outgrow both references
        residual = max(residual, float(n_one >= N[-1]), float(poly_cap >= N[-1]))
    return IdentityEntry("liouville.n_limits", params, residual, tol, eng, details=details)


def _all_poly_modes(model, cap):
    from .harmonics import available_modes

    return available_modes(model.k, cap)


# -- doubling ---------------------------------------------------------------------


def a_priori_exponent(alpha, n, R, growth, eps, lam, T) -> float:
    """alpha + n/2 - R + 2 lam^(sqrt n - 1) T^(sqrt n - 1) (growth + eps + (n/2 - R + alpha)/2)."""
    p = math.sqrt(n) - 1.0
    beta = n / 2.0 - R
    return alpha + beta + 2.0 * lam**p * T**p * (growth + eps + (beta + alpha) / 2.0)


def minimal_lambda(L_target, alpha, n, R, growth, eps, T) -> float:
    """Smallest lam with a_priori_exponent(...) >= L_target."""
    p = math.sqrt(n) - 1.0
    beta = n / 2.0 - R
    q = 2.0 * T**p * (growth + eps + (beta + alpha) / 2.0)
    need = L_target - alpha - beta
    if need <= 0:
        return 0.0
    if p == 0.0:
        return 0.0 if q >= need else math.inf
    return (need / q) ** (1.0 / p)


@dataclass
class DoublingRecord:
    t: float
    ratio: float
    L_emp: float
    L_tight: float
    L_apriori: float
    lambda_min: float
    verdict: str

    def to_json(self) -> dict:
        return asdict(self)


def sup_frequency(model, u, alpha, t_lo, t_hi, engine="auto", points=400) -> float:
    grid = np.geomspace(t_lo, t_hi, points)
    return float(frequency_profile(model, u, alpha, grid, engine).N.max())


def doubling_check(model, u, alpha, T, eps=0.1, lam=1.0, points=20, engine="auto") -> list:
    """Empirical log2(H(2t)/H(t)) against the ODE-tight and a-priori exponents."""
    validate(u, model)
    if not u.is_polynomial:
        raise ValueError("doubling check needs a polynomial-growth combination")
    if u.is_zero:
        raise ValueError("doubling check needs a nonzero combination")
    if not T > 2:
        raise ValueError(f"window (1, T) needs T > 2, got {T!r}")
    if alpha < 2:
        raise ValueError("doubling exponents are checked for alpha >= 2")
    if lam < 1 or eps <= 0:
        raise ValueError("need lam >= 1 and eps > 0")
    eng = resolve_engine(u, engine)
    growth = growth_order(u)
    beta = model.n / 2.0 - model.R
    L_tight = alpha + beta + 2.0 * sup_frequency(model, u, alpha, 1.0, T, eng) / (alpha + 1.0)
    L_apriori = a_priori_exponent(alpha, model.n, model.R, growth, eps, lam, T)
    ts = np.geomspace(1.0, T / 2.0, points + 2)[1:-1]
    records = []
    for t in ts:
        ratio = H_of_t(model, u, alpha, 2 * t, eng) / H_of_t(model, u, alpha, t, eng)
        L_emp = math.log2(ratio)
        ok = L_emp <= L_tight + 1e-9 and L_tight <= L_apriori
        records.append(DoublingRecord(
            float(t), ratio, L_emp, L_tight, L_apriori,
            minimal_lambda(L_emp, alpha, model.n, model.R, growth, eps, T),
            "pass" if ok else "fail",
        ))
    return records


def doubling_entry(model, u, alpha, T, eps, lam, records) -> IdentityEntry:
    params = {**_params(model, u, alpha, [r.t for r in records]), "T": float(T), "eps": float(eps),
              "lambda": float(lam)}
    worst = max(max(r.L_emp - r.L_tight, r.L_tight - r.L_apriori) for r in records)
    return IdentityEntry("doubling.exponent_order", params, max(worst, 0.0), 1e-9,
                         details={"L_tight": records[0].L_tight, "L_apriori": records[0].L_apriori,
                                  "L_emp_max": max(r.L_emp for r in records),
                                  "lambda_min": max(r.lambda_min for r in records)})


def pure_mode_doubling_entry(model, mode: PolynomialMode, alpha, T=16.0) -> IdentityEntry:
    u = HarmonicCombination.of((1.0, mode))
    recs = doubling_check(model, u, alpha, T)
    expected = mode.degree + model.k / 2.0 + alpha
    worst = max(abs(r.L_emp - expected) for r in recs)
    return IdentityEntry("doubling.pure_mode_exponent", _params(model, u, alpha, [r.t for r in recs]),
                         worst, 1e-10, details={"expected": expected})


def ball_doubling_check(model, u, t, engine="auto") -> IdentityEntry:
    """h(5t) <= 5^L h(t) with L = n/2 - R + 2 sup_{[t,5t]} N at alpha = 0."""
    validate(u, model)
    if not u.is_polynomial:
        raise ValueError("ball doubling check needs a polynomial-growth combination")
    eng = resolve_engine(u, engine)
    beta = model.n / 2.0 - model.R
    ratio = h_of_t(model, u, 5 * t, eng) / h_of_t(model, u, t, eng)
    L = beta + 2.0 * sup_frequency(model, u, 0.0, t, 5 * t, eng)
    bound = 5.0**L
    pure = [5.0 ** (m.degree + beta) for _, m in u.nonzero_terms]
    lo, hi = min(pure), max(pure)
    worst = max(ratio / bound - 1.0, lo / ratio - 1.0, ratio / hi - 1.0)
    params = {**_params(model, u, 0.0, [t, 5 * t])}
    return IdentityEntry("doubling.ball_5t", params, max(worst, 0.0), 1e-9, eng,
                         details={"ratio": ratio, "C_L": bound, "L": L, "pure_min": lo, "pure_max": hi})


# -- dimension --------------------------------------------------------------------


def _comb(a, b):
    return math.comb(a, b) if a >= 0 and b >= 0 else 0


def classical_harmonic_count(k: int, d: int) -> int:
    """dim of harmonic polynomials of degree <= d in k variables, closed form."""
    if d == 0:
        return 1
    return _comb(d + k - 1, k - 1) + _comb(d + k - 2, k - 1)


def dimension_table(model: RigidShrinker, d_max: int) -> list:
    """(d, dim) for growth order d (in distance) = degree cap d, d = 0..d_max."""
    return [(d, dim_poly_space(model, d)) for d in range(d_max + 1)]


def dimension_entry(model: RigidShrinker, d_max: int) -> IdentityEntry:
    table = dimension_table(model, d_max)
    mismatch = sum(1 for d, dim in table if dim != classical_harmonic_count(model.k, d) or not math.isfinite(dim))
    label = "harmonic" if model.family == "gaussian" else "constructed-family"
    return IdentityEntry("dimension.table", {"model": model.descriptor, "d_max": d_max}, float(mismatch), 0.0,
                         details={"table": [list(r) for r in table], "kind": label})
