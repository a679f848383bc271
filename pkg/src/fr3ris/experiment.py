"""Monte Carlo harness: per-realization pipeline, sweeps, CSV emission.

Pipeline per realization (power_rounds solves total):
  1. drop IUs, synthesize channels;
  2. greedy-seed an association at uniform power, SCA-solve the power;
  3. associate via the requested scheme at the solved power;
  4. remaining rounds alternate SCA refinement (warm start) with
     re-association, ending on a power solve;
  5. report the coupled sum rate of the final pair.

Reproducibility: realization i uses seed master_seed XOR i. The shared
pipeline prefix draws from one stream; each scheme's own draws come from a
per-scheme substream, so a scheme's result never depends on which other
schemes ran alongside it. Sweep aggregation reduces in realization-index
order, making CSV output bitwise stable under any FR3_THREADS setting.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .association import (exhaustive_association, greedy_association,
                          match_deferred_acceptance, random_association,
                          utility_matrix)
from .channel import gains_for_association, synthesize_channels
from .config import SCHEME_NAMES, dbm_to_watt
from .errors import ConfigError
from .power_sca import sca_power_for_config
from .rate import sum_rate
from .topology import sample_topology

_SCHEME_STREAM = {name: i + 1 for i, name in enumerate(SCHEME_NAMES)}

CSV_HEADER = "sweep_var,sweep_value,scheme,mean_sum_rate_bps_hz,stderr,realizations"


@dataclass(frozen=True)
class SweepResult:
    sweep_var: str       # "power" or "elements"
    values: tuple        # sweep points as configured (dBm / element counts)
    schemes: tuple
    mean: np.ndarray     # (num values, num schemes) bits/s/Hz
    stderr: np.ndarray   # same shape; sample stdev / sqrt(n)
    realizations: int


def _realization_seed(cfg, index):
    return cfg.master_seed ^ index


def _associate(scheme, channels, u, p, cfg, rng):
    if scheme == "matching":
        return match_deferred_acceptance(u)
    if scheme == "greedy":
        return greedy_association(u, rng, multi_round=cfg.greedy_multi_round)
    if scheme == "random":
        return random_association(channels.num_ius, channels.num_riss, rng)
    if scheme == "exhaustive":
        assoc, _ = exhaustive_association(channels, p, cfg.noise_power_w,
                                          cap=cfg.exhaustive_cap)
        return assoc
    raise ConfigError(f"unknown scheme {scheme!r}")


def _run_schemes(cfg, index, schemes):
    """One realization, all requested schemes; shares the scheme-independent
    prefix (topology, channels, seed association, first power solve)."""
    seed = _realization_seed(cfg, index)
    rng = np.random.default_rng(seed)
    topo = sample_topology(cfg, rng)
    channels = synthesize_channels(topo, cfg)
    noise = cfg.noise_power_w
    k = cfg.num_ius
    uniform = np.full(k, cfg.p_max_w / k)

    u0 = utility_matrix(channels, uniform, noise)
    seed_assoc = greedy_association(u0, rng, multi_round=cfg.greedy_multi_round)
    gm0 = gains_for_association(channels, seed_assoc, noise)
    p_star, _ = sca_power_for_config(gm0, cfg, init=uniform)
    u_star = utility_matrix(channels, p_star, noise)

    out = {}
    for scheme in schemes:
        scheme_rng = np.random.default_rng([seed, _SCHEME_STREAM[scheme]])
        p = p_star
        u = u_star
        assoc = _associate(scheme, channels, u, p, cfg, scheme_rng)
        for round_idx in range(2, cfg.power_rounds + 1):
            gm = gains_for_association(channels, assoc, noise)
            p, _ = sca_power_for_config(gm, cfg, init=p)
            if round_idx < cfg.power_rounds:
                u = utility_matrix(channels, p, noise)
                assoc = _associate(scheme, channels, u, p, cfg, scheme_rng)
        gm = gains_for_association(channels, assoc, noise)
        out[scheme] = sum_rate(gm, p).sum_rate
    return out


def run_realization(cfg, scheme, index):
    """Final coupled sum rate of one scheme on realization `index`."""
    if scheme not in SCHEME_NAMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    return _run_schemes(cfg, index, (scheme,))[scheme]


def _worker(args):
    cfg, index, schemes = args
    return _run_schemes(cfg, index, schemes)


def resolve_workers():
    """Worker count from FR3_THREADS: unset/empty = 1, 0 = all cores."""
    raw = os.environ.get("FR3_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"FR3_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"FR3_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _config_for_point(cfg, variable, value):
    if variable == "power":
        return cfg.with_updates(p_max_w=dbm_to_watt(value))
    if variable == "elements":
        side = math.isqrt(int(value))
        if side * side != int(value):
            raise ConfigError(
                f"element sweep value {value} is not a perfect square "
                "(the reflector grid is y = z)")
        return cfg.with_updates(ris_elements_y=side, ris_elements_z=side)
    raise ConfigError(f"unknown sweep variable {variable!r}")


def sweep(cfg, variable, values=None):
    """Monte Carlo sweep over AP power (dBm values) or RIS elements
    (total counts). Returns per-scheme means and standard errors."""
    if values is None:
        values = cfg.power_sweep_dbm if variable == "power" else cfg.element_sweep
    values = tuple(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep values must be strictly increasing")
    point_cfgs = [_config_for_point(cfg, variable, v) for v in values]

    n = cfg.realizations
    schemes = cfg.schemes
    workers = resolve_workers()
    mean = np.empty((len(values), len(schemes)))
    stderr = np.empty_like(mean)
    for vi, pcfg in enumerate(point_cfgs):
        tasks = [(pcfg, index, schemes) for index in range(n)]
        if workers == 1:
            results = [_worker(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                # map() preserves task order, so the reduction below is
                # always in realization-index order
                results = list(pool.map(_worker, tasks, chunksize=1))
        for si, scheme in enumerate(schemes):
            rates = np.array([r[scheme] for r in results])
            mean[vi, si] = rates.mean()
            stderr[vi, si] = (rates.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SweepResult(sweep_var=variable, values=values, schemes=schemes,
                       mean=mean, stderr=stderr, realizations=n)


def format_csv(result):
    lines = [CSV_HEADER]
    for vi, value in enumerate(result.values):
        for si, scheme in enumerate(result.schemes):
            lines.append(",".join([
                result.sweep_var,
                f"{value:.17g}" if isinstance(value, float) else str(value),
                scheme,
                f"{result.mean[vi, si]:.17g}",
                f"{result.stderr[vi, si]:.17g}",
                str(result.realizations),
            ]))
    return "\n".join(lines) + "\n"


def emit_csv(result, path):
    """Write the sweep as UTF-8, LF-only CSV; 17 significant digits."""
    text = format_csv(result)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
