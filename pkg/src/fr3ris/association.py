"""IU-RIS association: stable matching plus greedy, random, and exhaustive
baselines.

Preference lists come from a static utility matrix u[k, l]: IU k's rate when
it alone uses RIS l (everyone else on direct links) under the fixed power
allocation. Freezing utilities this way keeps deferred acceptance in the
textbook setting; full interference-coupled rates are still what the
experiment reports for the chosen association.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, SizeError
from .rate import association_sum_rate, sum_rate
from .channel import gains_for_association


@dataclass(frozen=True)
class Association:
    """Binary K x L matrix; at most one RIS per IU and one IU per RIS."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma)
        if g.ndim != 2:
            raise DimensionError(f"gamma must be 2-d, got shape {g.shape}")
        vals = np.unique(g)
        if not np.all(np.isin(vals, (0, 1))):
            raise NumericError("gamma entries must be 0 or 1")
        g = g.astype(np.int64)
        if np.any(g.sum(axis=1) > 1):
            raise NumericError("some IU is associated with multiple RISs")
        if g.shape[1] and np.any(g.sum(axis=0) > 1):
            raise NumericError("some RIS serves multiple IUs")
        object.__setattr__(self, "gamma", g)
        g.setflags(write=False)

    @classmethod
    def empty(cls, num_ius, num_riss):
        return cls(gamma=np.zeros((num_ius, num_riss), dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs, num_ius, num_riss):
        g = np.zeros((num_ius, num_riss), dtype=np.int64)
        for k, l in pairs:
            g[k, l] = 1
        return cls(gamma=g)

    @property
    def num_ius(self):
        return self.gamma.shape[0]

    @property
    def num_riss(self):
        return self.gamma.shape[1]

    def served_ris(self, k):
        """Index of the RIS serving IU k, or -1."""
        hits = np.flatnonzero(self.gamma[k])
        return int(hits[0]) if hits.size else -1

    def pairs(self):
        return [(int(k), int(l)) for k, l in zip(*np.nonzero(self.gamma))]


def utility_matrix(channels, p_star, noise_power_w):
    """u[k, l]: IU k's own rate if RIS l serves it and nobody else uses a RIS."""
    k_count, l_count = channels.num_ius, channels.num_riss
    u = np.zeros((k_count, l_count))
    for k in range(k_count):
        for l in range(l_count):
            assoc = Association.from_pairs([(k, l)], k_count, l_count)
            gm = gains_for_association(channels, assoc, noise_power_w)
            u[k, l] = sum_rate(gm, p_star).per_iu_rate[k]
    return u


def _check_utilities(u):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2:
        raise DimensionError(f"utility matrix must be 2-d, got {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NumericError("utilities must be finite")
    return u


def match_deferred_acceptance(u):
    """IU-proposing deferred acceptance on static utilities.

    IUs walk their preference lists in descending utility (ties to the
    lower RIS index) and only propose where u > 0; a RIS holds the best
    proposal seen so far (ties to the lower IU index). The result has no
    blocking pair under u.
    """
    u = _check_utilities(u)
    k_count, l_count = u.shape
    prefs = [sorted((l for l in range(l_count) if u[k, l] > 0.0),
                    key=lambda l: (-u[k, l], l))
             for k in range(k_count)]
    next_choice = [0] * k_count
    holder = [-1] * l_count
    free = list(range(k_count))
    while free:
        k = free.pop(0)
        while next_choice[k] < len(prefs[k]):
            l = prefs[k][next_choice[k]]
            next_choice[k] += 1
            cur = holder[l]
            if cur < 0:
                holder[l] = k
                break
            if (u[k, l], -k) > (u[cur, l], -cur):
                holder[l] = k
                free.append(cur)
                break
        # list exhausted: IU stays on its direct link
    pairs = [(k, l) for l, k in enumerate(holder) if k >= 0]
    return Association.from_pairs(pairs, k_count, l_count)


def find_blocking_pair(u, assoc):
    """First (k, l) that would defect together under u, or None if stable."""
    u = _check_utilities(u)
    k_count, l_count = u.shape
    matched_u = np.zeros(k_count)
    holder = [-1] * l_count
    for k, l in assoc.pairs():
        matched_u[k] = u[k, l]
        holder[l] = k
    for k in range(k_count):
        for l in range(l_count):
            if u[k, l] <= 0.0 or assoc.gamma[k, l]:
                continue
            if u[k, l] <= matched_u[k]:
                continue
            cur = holder[l]
            if cur < 0 or u[k, l] > u[cur, l]:
                return (k, l)
    return None


def greedy_association(u, rng, multi_round=False):
    """One-shot proposal round: every IU bids for its best RIS, contested
    RISs keep a uniformly random proposer, losers fall back to the direct
    link. multi_round=True lets losers rebid on still-free RISs instead."""
    u = _check_utilities(u)
    k_count, l_count = u.shape
    taken = np.zeros(l_count, dtype=bool)
    matched = np.zeros(k_count, dtype=bool)
    pairs = []
    active = list(range(k_count))
    while active:
        bids = {}
        for k in active:
            best_l, best_val = -1, 0.0
            for l in range(l_count):
                if not taken[l] and u[k, l] > best_val:
                    best_l, best_val = l, u[k, l]
            if best_l >= 0:
                bids.setdefault(best_l, []).append(k)
        if not bids:
            break
        for l in sorted(bids):
            proposers = bids[l]
            if len(proposers) == 1:
                winner = proposers[0]
            else:
                winner = proposers[int(rng.integers(len(proposers)))]
            pairs.append((winner, l))
            taken[l] = True
            matched[winner] = True
        if not multi_round:
            break
        active = [k for k in active if not matched[k]]
    return Association.from_pairs(pairs, k_count, l_count)


def random_association(num_ius, num_riss, rng):
    """Uniform partial assignment: random IU order, each picks among the
    still-free RISs or no RIS at all."""
    free = list(range(num_riss))
    pairs = []
    for k in rng.permutation(num_ius):
        pick = int(rng.integers(len(free) + 1))
        if pick < len(free):
            pairs.append((int(k), free.pop(pick)))
    return Association.from_pairs(pairs, num_ius, num_riss)


def count_feasible_associations(num_ius, num_riss):
    """Number of partial one-to-one IU->RIS maps."""
    return sum(math.comb(num_ius, j) * math.comb(num_riss, j)
               * math.factorial(j)
               for j in range(min(num_ius, num_riss) + 1))


def exhaustive_association(channels, p_star, noise_power_w, cap=100_000):
    """Enumerate every feasible association, scoring each by the full
    coupled sum rate at p_star. Returns (best association, its sum rate)."""
    k_count, l_count = channels.num_ius, channels.num_riss
    total = count_feasible_associations(k_count, l_count)
    if total > cap:
        raise SizeError(
            f"{total} feasible associations exceed the cap of {cap}")
    best_assoc, best_rate = None, -np.inf
    for j in range(min(k_count, l_count) + 1):
        for ius in itertools.combinations(range(k_count), j):
            for riss in itertools.permutations(range(l_count), j):
                assoc = Association.from_pairs(
                    list(zip(ius, riss)), k_count, l_count)
                rate = association_sum_rate(channels, assoc, p_star,
                                            noise_power_w)
                if rate > best_rate:
                    best_assoc, best_rate = assoc, rate
    return best_assoc, float(best_rate)
