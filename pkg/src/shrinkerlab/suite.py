"""The full verification matrix for one model, as run by ``shrinkerlab verify``."""

from __future__ import annotations

import logging
import math

import numpy as np

from . import frequency as fr
from . import harmonics as hm
from . import theorems as th
from .geometry import RigidShrinker, coarea_check, loglog_slope, richardson_derivative
from .parsing import combination_to_json
from .quadrature import DEFAULT_TOL_ABS, DEFAULT_TOL_REL, ball_monte_carlo
from .report import IdentityEntry, IdentityReport

log = logging.getLogger(__name__)

ALPHAS = (0.0, 2.0, 2.5, 3.0)


def volume_entries(model: RigidShrinker, t_grid) -> list:
    t = np.asarray(t_grid, float)
    params = {"model": model.descriptor, "t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size)}
    slope = loglog_slope(t, [model.sublevel_volume(s) for s in t])
    area_gap = max(
        abs(model.boundary_area(s) - math.sqrt(s) * richardson_derivative(model.sublevel_volume, s, 1e-3 * s))
        / model.boundary_area(s)
        for s in t
    )
    return [
        coarea_check(model, t),
        IdentityEntry("volume.loglog_slope", params, abs(slope - model.beta), 1e-9,
                      details={"slope": slope, "expected": model.beta}),
        IdentityEntry("volume.boundary_area_coarea", params, area_gap, 1e-6),
    ]


def _pure_degrees(model: RigidShrinker) -> list:
    return [0, 1] if model.k == 1 else list(range(0, 7))


def _band_input(model: RigidShrinker, delta: float, t_hi: float) -> hm.HarmonicCombination:
    """u = 2 delta + eps y_1 with eps small enough to stay in (delta, 3 delta) on D_{t_hi}."""
    eps = 0.5 * delta / (2.0 * math.sqrt(t_hi))
    return hm.constant(model.k, 2 * delta) + hm.coordinate(model.k, eps)


def run_verification(model: RigidShrinker, modes=None, seed: int = 0, tol_rel: float = DEFAULT_TOL_REL,
                     tol_abs: float = DEFAULT_TOL_ABS, mc_samples: int = 100_000,
                     n_random: int = 6) -> IdentityReport:
    rng = np.random.default_rng(seed)
    # Every identity below is a relative comparison, and at t = 1e-2 the
    # weighted masses of high modes sit far below any fixed absolute floor,
    # so the quadrature runs on the relative criterion alone here.
    qkw = {"tol_rel": min(tol_rel, 1e-10), "tol_abs": min(tol_abs, 1e-300)}
    report = IdentityReport(seed=seed, meta={
        "model": model.to_json(),
        "settings": {"tol_rel": tol_rel, "tol_abs": tol_abs, "mc_samples": mc_samples, "n_random": n_random},
    })
    t10 = np.geomspace(1e-2, 1e2, 10)
    t_mono = fr.log_grid(1e-2, 1e2, 40)
    t_small = np.geomspace(0.1, 10.0, 6)

    report.extend(volume_entries(model, t10))
    report.add(th.dimension_entry(model, 6))

    # single modes: frequency law on both engines and the doubling exponent
    for d in _pure_degrees(model):
        mode = hm.PolynomialMode(d, 0)
        for alpha in ALPHAS:
            report.add(fr.check_pure_mode_law(model, mode, alpha, t10, "closed-form"))
            report.add(fr.check_pure_mode_law(model, mode, alpha, t10, "quadrature", **qkw))
        report.add(th.pure_mode_doubling_entry(model, mode, 2.0))
        report.add(th.ball_doubling_check(model, hm.HarmonicCombination.of((1.0, mode)), 1.5))

    # mixed polynomial combinations
    if modes is not None:
        combos = [modes]
    else:
        max_deg = 1 if model.k == 1 else 4
        combos = [hm.random_polynomial_combination(rng, model.k, max_deg, 3, with_constant=(i % 2 == 0))
                  for i in range(n_random)]
    report.meta["combinations"] = [combination_to_json(u) for u in combos]
    for u in combos:
        hm.validate(u, model)
        poly = u.is_polynomial
        for alpha in ALPHAS:
            if poly:
                report.add(fr.check_engine_agreement(model, u, alpha, t10, tol=1e-8, **qkw))
            report.add(fr.check_bounds(model, u, alpha, t_small, **qkw))
            report.add(fr.check_log_derivative(model, u, alpha, t_small, "quadrature", **qkw))
        report.add(fr.check_H_ode(model, u, 2.0, t_small, "quadrature", **qkw))
        report.add(fr.check_H_ode(model, u, 2.0, t_small, "auto", **qkw))
        report.add(fr.check_general_hj(model, u, 2.0, t_small + 2.0 * model.R, "auto", **qkw))
        for alpha in (2.0, 3.0):
            report.add(fr.check_monotone_frequency(model, u, alpha, t_mono, **qkw))
            report.add(fr.check_P1(model, u, alpha, (1.0, 4.0), **qkw))
        report.add(fr.check_nlim_identity(model, u, t_small, "quadrature", **qkw))
        report.extend(th.case1_chain_check(model, u, t_small))
        report.extend(th.case2_identity_check(model, u, t_small))
        if poly:
            for lam in (1.0, 2.0, 5.0):
                for T in (4.0, 16.0):
                    recs = th.doubling_check(model, u, 2.0, T, eps=0.1, lam=lam)
                    report.add(th.doubling_entry(model, u, 2.0, T, 0.1, lam, recs))
            report.add(th.ball_doubling_check(model, u, 1.5))

    # Liouville mechanics on bounded-type and band inputs
    one = hm.constant(model.k)
    one_plus = one + hm.coordinate(model.k)
    report.add(th.n_limit_scan(model, one))
    report.add(th.n_limit_scan(model, one_plus))
    report.add(th.band_sandwich_check(model, one.scaled(2.0), 1.0, t_small))
    report.add(th.band_sandwich_check(model, _band_input(model, 1.0, 10.0), 1.0, t_small))
    report.add(th.band_sandwich_check(model, hm.coordinate(model.k), 1.0, t_small))
    report.extend(th.case1_chain_check(model, one, t_small))
    report.extend(th.case2_identity_check(model, one, t_small))

    # exponential modes on k = 1 cylinders
    if model.k == 1 and model.factor.hook is not None:
        for parity in ("even", "odd"):
            ex = hm.HarmonicCombination.of((1.0, hm.ExponentialMode(1, parity)))
            for alpha in (2.0, 3.0):
                report.add(fr.check_monotone_frequency(model, ex, alpha, t_mono, **qkw))
            report.add(fr.check_H_ode(model, ex, 2.0, t_small, **qkw))
            report.add(fr.check_nlim_identity(model, ex, t_small, **qkw))
            report.extend(th.case1_chain_check(model, ex, t_small))
            report.extend(th.case2_identity_check(model, ex, t_small))
            report.add(th.n_limit_scan(model, ex))
        mixed = one_plus + hm.HarmonicCombination.of((0.3, hm.ExponentialMode(1, "even")))
        report.add(fr.check_monotone_frequency(model, mixed, 2.0, t_mono, **qkw))

    if model.k <= 3 and mc_samples > 0:
        report.extend(monte_carlo_entries(model, one_plus, seed, mc_samples))
    log.info("verification finished: %d entries, %d failures", len(report.entries), len(report.failures))
    return report


def monte_carlo_entries(model, u, seed, samples) -> list:
    """Closed form vs Monte Carlo, as a z-score against the reported standard error."""
    out = []
    for quantity, alpha in (("mass", 0.0), ("mass", 2.0), ("energy", 2.0)):
        t = 1.0
        mc = ball_monte_carlo(u, model, t, alpha=alpha if quantity == "mass" else alpha + 1.0,
                              samples=samples, seed=seed, quantity=quantity)
        exact = fr.H_of_t(model, u, alpha, t) if quantity == "mass" else fr.J_of_t(model, u, alpha, t)
        z = abs(mc.value - exact) / mc.error_estimate
        params = {"model": model.descriptor, "u": ";".join(u.labels()), "alpha": alpha, "quantity": quantity,
                  "samples": samples, "t": t}
        out.append(IdentityEntry("oracle.monte_carlo", params, z, 4.0, "monte-carlo", seed=seed,
                                 details={"estimate": mc.value, "stderr": mc.error_estimate, "exact": exact}))
    return out
