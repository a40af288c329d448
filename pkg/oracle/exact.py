import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.errors import OracleLimitError
from core.set_system import CoverRequirement, SetSystem
from core.vacc import VaccInstance

logger = logging.getLogger(__name__)

MAX_EXACT_SETS = 24
MAX_EXACT_COMBINATIONS = 10 ** 6


@dataclass(frozen=True)
class OracleResult:
    """
    Optimum of a small instance found by exhaustive search.

    Attributes:
        opt_value: Minimum number of sets (Partial Set Cover) or optimal radius
            R* in normalized units (client cover).
        witness (tuple): Set ids / facility ids achieving `opt_value`.
        nodes_explored (int): Search nodes or candidate families visited.
    """

    opt_value: float
    witness: tuple
    nodes_explored: int = 0


def exact_partial_cover(system: SetSystem, rho) -> OracleResult:
    """
    Minimum-cardinality family covering at least ⌈ρn⌉ elements.

    Algorithm:
    ==========
    For c = 0, 1, ..., m: depth-first search over c-subsets in lexicographic
    order. A node with coverage `cov` and r picks left is pruned when
        cov + (sum of the r largest marginal gains among the sets still allowed)
    stays below the target. The first c with a feasible family is the optimum
    and the first family found is the lexicographically smallest witness.

    Raises:
        OracleLimitError: m > 24.
        ValueError: the union of all sets misses the target.
    """
    if system.m > MAX_EXACT_SETS:
        raise OracleLimitError(f"exact_partial_cover handles m <= {MAX_EXACT_SETS}, got m = {system.m}")
    target = CoverRequirement.coerce(rho).target(system.n)
    if target == 0:
        return OracleResult(0, (), 1)
    if system.union_mask().bit_count() < target:
        raise ValueError(f"no family covers the {target} elements required")

    masks = system.masks
    m = system.m
    nodes = 0

    def search(start, covered, picked, left):
        nonlocal nodes
        nodes += 1
        count = covered.bit_count()
        if left == 0:
            return picked if count >= target else None
        if count >= target:
            # fewer picks already suffice; the outer loop would have found them
            return None
        gains = sorted(((masks[s] & ~covered).bit_count() for s in range(start, m)), reverse=True)
        if count + sum(gains[:left]) < target:
            return None
        for s in range(start, m - left + 1):
            found = search(s + 1, covered | masks[s], picked + (s,), left - 1)
            if found is not None:
                return found
        return None

    for size in range(1, m + 1):
        witness = search(0, 0, (), size)
        if witness is not None:
            logger.debug("exact partial cover: opt=%d witness=%s nodes=%d", size, witness, nodes)
            return OracleResult(size, witness, nodes)
    raise AssertionError("unreachable: the full family covers the target")


def exact_client_cover(instance: VaccInstance, k: int = None, rho=None) -> OracleResult:
    """
    Optimal radius R* over all k-subsets of locations.

    Every C(L, k) facility set is scored by its ⌈ρn⌉-th smallest service cost;
    ties keep the lexicographically smallest facility set. k >= L opens every
    location.

    Raises:
        OracleLimitError: C(L, k) > 10**6.
    """
    k = instance.k if k is None else k
    rho = instance.rho if rho is None else CoverRequirement.coerce(rho)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if instance.n_people == 0:
        raise ValueError("the instance has no people")
    n_locations = instance.n_locations
    k = min(k, n_locations)
    total = math.comb(n_locations, k)
    if total > MAX_EXACT_COMBINATIONS:
        raise OracleLimitError(
            f"exact_client_cover enumerates C({n_locations}, {k}) = {total} > {MAX_EXACT_COMBINATIONS} sets"
        )
    costs = instance.service_costs
    target = max(1, rho.target(instance.n_people))
    best_value, best_witness = math.inf, None
    for facilities in itertools.combinations(range(n_locations), k):
        served = costs[:, list(facilities)].min(axis=1)
        value = float(np.partition(served, target - 1)[target - 1])
        if value < best_value:
            best_value, best_witness = value, facilities
    logger.debug("exact client cover: R*=%.6f witness=%s families=%d", best_value, best_witness, total)
    return OracleResult(best_value, tuple(best_witness), total)
