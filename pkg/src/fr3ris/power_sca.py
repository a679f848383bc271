"""Transmit power allocation by successive convex approximation.

The sum rate splits into concave-minus-concave parts; linearizing the
subtracted part at the current iterate gives a concave surrogate whose
maximizer never decreases the true sum rate. The surrogate is solved by
projected gradient ascent over {p >= 0, sum(p) <= P_max}.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericError
from .rate import _check_power, sum_rate

ARMIJO_BETA = 0.5
ARMIJO_C = 1e-4
_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class ScaTrace:
    """True sum rate at the initial point and after each outer step."""

    objective_per_iteration: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def surrogate_gradient(gm, p_t, variant="derivative"):
    """Linearization weights rho[k, i] of the interference log at p_t.

    "derivative" uses d/dp_i log2(I_k) = g_{k,i} / (I_k ln 2); the
    "log-denominator" variant divides by log2(I_k) instead and is kept
    only for comparison (it is not the derivative and voids the bound).
    Diagonal entries are zero in both variants.
    """
    p_t = _check_power(gm, p_t)
    diag = np.diag(gm.g)
    interf = gm.g @ p_t - diag * p_t + gm.noise_power
    if np.any(interf <= 0.0):
        raise NumericError("interference-plus-noise must be positive")
    if variant == "derivative":
        denom = interf * _LN2
    elif variant == "log-denominator":
        denom = _LN2 * np.log2(interf)
    else:
        raise ValueError(f"unknown rho variant {variant!r}")
    rho = gm.g / denom[:, None]
    np.fill_diagonal(rho, 0.0)
    if not np.all(np.isfinite(rho)):
        raise NumericError("non-finite surrogate gradient")
    return rho


def surrogate_objective(gm, p, rho):
    """sum_k log2(sum_i p_i g_{k,i} + sigma_k^2) - sum_{k,i} rho[k,i] p_i.

    Constant terms of the surrogate (values fixed by the expansion point)
    are dropped, so this is comparable only across p for fixed rho.
    """
    p = _check_power(gm, p)
    return float(_kernels.surrogate_value(
        np.ascontiguousarray(gm.g), gm.noise_power,
        np.ascontiguousarray(rho.sum(axis=0)), p))


def surrogate_rate_bound(gm, p, p_t, variant="derivative"):
    """Per-IU minorant rates at p, expanded at p_t (the dropped constants
    restored): log2(D_k(p)) - log2(I_k(p_t)) - sum_i rho[k,i] (p_i - p_t_i)."""
    p = _check_power(gm, p)
    p_t = _check_power(gm, p_t)
    rho = surrogate_gradient(gm, p_t, variant)
    diag = np.diag(gm.g)
    d_full = gm.g @ p + gm.noise_power
    interf_t = gm.g @ p_t - diag * p_t + gm.noise_power
    return np.log2(d_full) - np.log2(interf_t) - rho @ (p - p_t)


def solve_inner(gm, p_t, p_max, tol=1e-8, max_iter=500, variant="derivative"):
    """Maximize the surrogate expanded at p_t over the power set.

    Projected gradient ascent with Armijo backtracking; stops when the
    unit-step gradient mapping norm falls below tol.
    """
    p_t = _check_power(gm, p_t)
    p_max = float(p_max)
    if not np.isfinite(p_max) or p_max <= 0.0:
        raise NumericError(f"p_max must be positive and finite, got {p_max}")
    rho = surrogate_gradient(gm, p_t, variant)
    rho_col = np.ascontiguousarray(rho.sum(axis=0))
    g = np.ascontiguousarray(gm.g)
    p, _, _ = _kernels.solve_inner(g, gm.noise_power, rho_col, p_t, p_max,
                                   tol, int(max_iter), ARMIJO_C, ARMIJO_BETA)
    return p


def sca_power(gm, p_max, init=None, outer_tol=1e-6, outer_max=50,
              inner_tol=1e-8, inner_max=500, variant="derivative"):
    """Run the outer SCA loop from a feasible start (default: uniform split).

    Returns the final allocation and a trace of true sum rates, one entry
    per visited iterate; the trace is non-decreasing for the "derivative"
    variant by the minorant argument.
    """
    k = gm.num_ius
    p_max = float(p_max)
    if init is None:
        init = np.full(k, p_max / k)
    p = _check_power(gm, init)
    if p.sum() > p_max * (1 + 1e-12):
        raise NumericError(
            f"initial allocation spends {p.sum()} of budget {p_max}")
    objective = [sum_rate(gm, p).sum_rate]
    converged = False
    iterations = 0
    for _ in range(int(outer_max)):
        iterations += 1
        p = solve_inner(gm, p, p_max, tol=inner_tol, max_iter=inner_max,
                        variant=variant)
        objective.append(sum_rate(gm, p).sum_rate)
        if abs(objective[-1] - objective[-2]) < outer_tol:
            converged = True
            break
    return p, ScaTrace(objective_per_iteration=objective,
                       iterations=iterations, converged=converged)


def sca_power_for_config(gm, cfg, init=None):
    """sca_power with tolerances, caps, and variant taken from the config."""
    return sca_power(gm, cfg.p_max_w, init=init, outer_tol=cfg.outer_tol,
                     outer_max=cfg.outer_max_iter, inner_tol=cfg.inner_tol,
                     inner_max=cfg.inner_max_iter, variant=cfg.rho_variant)
