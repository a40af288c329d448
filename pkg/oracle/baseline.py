import logging

from core.errors import ValidationError
from core.set_system import CoverRequirement, SetSystem
from core.vacc import FacilitySolution, VaccInstance
from cover.common import PartialCoverSolver
from facility.client_cover import ClientCoverParams, radius_binary_search, select_round
from privacy.budget import PrivacyBudget

logger = logging.getLogger(__name__)


def greedy_partial_cover(system: SetSystem, rho) -> list:
    """
    Classical greedy Partial Set Cover.

    Repeatedly takes the set covering the most still-uncovered elements, smallest
    set id on ties, until at least ⌈ρn⌉ elements are covered.

    Raises:
        ValidationError: the union of all sets covers fewer than ⌈ρn⌉ elements.
    """
    target = CoverRequirement.coerce(rho).target(system.n)
    if system.union_mask().bit_count() < target:
        raise ValidationError(f"the sets cover fewer than the {target} elements required")
    chosen, _ = _greedy_until(system, rho)
    logger.debug("greedy baseline: n=%d m=%d target=%d chosen=%d", system.n, system.m, target, len(chosen))
    return chosen


def _greedy_until(system: SetSystem, rho):
    """Greedy on a radius system that may not reach the target; stops when no set gains."""
    target = CoverRequirement.coerce(rho).target(system.n)
    masks = system.masks
    uncovered = system.universe_mask
    covered = 0
    chosen = []
    while covered < target:
        gains = [(mask & uncovered).bit_count() for mask in masks]
        best = max(range(len(masks)), key=lambda s: (gains[s], -s))
        if gains[best] == 0:
            return chosen, True
        chosen.append(best)
        uncovered &= ~masks[best]
        covered += gains[best]
    return chosen, False


def nonprivate_client_cover(instance: VaccInstance, gamma: float) -> FacilitySolution:
    """
    Non-private baseline of the client cover.

    Same additive-γ radius binary search as the private solver, with the classical
    greedy partial cover at every radius and acceptance |F_R| <= k. A radius at
    which the greedy cannot reach ⌈ρn⌉ people is rejected.

    Raises:
        InfeasibleError: no tried radius was accepted.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must be in (0, 1)")
    if instance.n_people == 0:
        raise ValidationError("the instance has no people")
    rounds = ClientCoverParams(gamma, PrivacyBudget(1.0)).rounds

    def cover(system):
        return _greedy_until(system, instance.rho)

    traces = radius_binary_search(instance, rounds, cover, instance.k, reject_exhausted=True)
    return select_round(instance, traces, 1.0)


class GreedyBaseline(PartialCoverSolver):
    """
    Non-private greedy Partial Set Cover, the reference the private solvers are
    measured against.

    Attributes:
        solution_ (list): Set ids chosen by the last `solve`.
    """

    def __init__(self):
        self.solution_ = None

    def solve(self, system, rho, noise=None):
        self.solution_ = greedy_partial_cover(system, rho)
        return self.solution_
