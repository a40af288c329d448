import logging
import math
from dataclasses import dataclass

from core.errors import InfeasibleError, ValidationError
from core.set_system import CoverRequirement
from core.vacc import FacilitySolution, RoundTrace, VaccInstance, build_radius_sets, objective_percentile
from cover.greedy import partial_set_cover_greedy
from privacy.budget import PrivacyBudget, PrivacyLedger
from privacy.noise import NoiseSource

logger = logging.getLogger(__name__)

THEORETICAL = "theoretical"
HEURISTIC = "heuristic"
ALPHA_MODES = (THEORETICAL, HEURISTIC)

# Frozen from `python -m harness calibrate --trials 30 --eps 2 --rho 0.6` (seed 0,
# n = 60, m = 12): largest ratio 0.0375, median 0.0234.
DEFAULT_ALPHA_CONSTANT = 0.04


def alpha_bound(epsilon_prime, delta_prime, m, rho, mode=THEORETICAL, constant=DEFAULT_ALPHA_CONSTANT) -> float:
    """
    Budget multiplier α(ε′, δ′) of the acceptance test |F_R| <= α·k.

    Theoretical mode: B·ln(m)²·ln(1/δ′) / (ε′·(1 - ρ)), the greedy solver's
    approximation factor with its implicit constant exposed as B.
    Heuristic mode: 1.
    """
    if mode == HEURISTIC:
        return 1.0
    if mode != THEORETICAL:
        raise ValueError(f"alpha mode must be one of {ALPHA_MODES}")
    if not epsilon_prime > 0:
        raise ValueError("epsilon_prime must be positive")
    if not 0 < delta_prime < 1:
        raise ValueError("delta_prime must be in (0, 1)")
    if m < 2:
        raise ValueError("alpha_bound needs m >= 2")
    rho = CoverRequirement.coerce(rho).rho
    return constant * math.log(m) ** 2 * math.log(1 / delta_prime) / (epsilon_prime * (1 - rho))


@dataclass(frozen=True)
class ClientCoverParams:
    """
    Parameters of the private client cover.

    rounds = ⌈log₂(1/γ)⌉ binary-search rounds share the budget evenly:
    (ε′, δ′) = (ε/rounds, δ/rounds) per greedy call, each spending (2ε′, δ′).
    """

    gamma: float
    budget: PrivacyBudget
    alpha_mode: str = HEURISTIC
    alpha_constant: float = DEFAULT_ALPHA_CONSTANT

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must be in (0, 1)")
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"alpha mode must be one of {ALPHA_MODES}")
        if not self.alpha_constant > 0:
            raise ValueError("alpha constant must be positive")

    @property
    def rounds(self) -> int:
        return max(1, math.ceil(math.log2(1 / self.gamma) - 1e-12))

    @property
    def round_budget(self) -> PrivacyBudget:
        return self.budget.scaled(1.0 / self.rounds)

    def multiplier(self, m: int, rho) -> float:
        share = self.round_budget
        if self.alpha_mode == THEORETICAL and m < 2:
            return 1.0
        return alpha_bound(share.epsilon, share.delta, m, rho, self.alpha_mode, self.alpha_constant)


def radius_binary_search(instance: VaccInstance, rounds: int, cover, limit: float, reject_exhausted: bool = False):
    """
    Additive binary search on the radius shared by the private and baseline solvers.

    `cover(system)` returns (facilities, exhausted) for the radius-R set system;
    a round is accepted when |F_R| <= limit (and, with `reject_exhausted`, the
    cover reached the target). Returns the RoundTrace list.
    """
    low, high = 0.0, 1.0
    traces = []
    for _ in range(rounds):
        radius = (low + high) / 2
        facilities, exhausted = cover(build_radius_sets(instance, radius))
        accepted = len(facilities) <= limit and not (reject_exhausted and exhausted)
        traces.append(RoundTrace(radius, tuple(facilities), accepted, exhausted))
        logger.debug("client cover round: R=%.6f |F_R|=%d limit=%.3f accepted=%s",
                     radius, len(facilities), limit, accepted)
        if accepted:
            high = radius
        else:
            low = radius
    return traces


def select_round(instance: VaccInstance, traces, multiplier: float, ledger=None) -> FacilitySolution:
    """Post-processing: F_R of the smallest accepted radius, or InfeasibleError."""
    accepted = [t for t in traces if t.accepted]
    if not accepted:
        best = min(traces, key=lambda t: (len(t.facilities), t.radius))
        raise InfeasibleError(
            f"no radius guess produced at most {multiplier:g}·k facilities "
            f"(smallest |F_R| = {len(best.facilities)} at R = {best.radius:.6f})",
            diagnostics=best,
        )
    chosen = min(accepted, key=lambda t: t.radius)
    return FacilitySolution(
        facilities=chosen.facilities,
        achieved_radius=objective_percentile(instance, chosen.facilities),
        budget_multiplier_used=multiplier,
        radius=chosen.radius,
        rounds=tuple(traces),
        ledger=ledger,
    )


def dp_client_cover(instance: VaccInstance, params: ClientCoverParams, noise: NoiseSource) -> FacilitySolution:
    """
    Private bicriteria solver for MobileVaccClinic with outliers.

    Algorithm:
    ==========
    low = 0, high = 1; for ⌈log₂(1/γ)⌉ rounds:
        R = (low + high)/2
        S_R = {S_j(R)}: location j covers the people within R of it
        F_R = private greedy Partial Set Cover on (people, S_R, ρ) at (ε′, δ′)
        |F_R| > α·k  =>  low = R, else high = R
    Output F_R for the smallest tried R with |F_R| <= α·k.

    Every round's (R, F_R) is kept; choosing among them is post-processing of
    private outputs. The ledger totals (2ε, δ).

    Raises:
        InfeasibleError: no round satisfied |F_R| <= α·k; diagnostics hold the
            round with the fewest facilities.
    """
    if instance.n_people == 0:
        raise ValidationError("the instance has no people")
    share = params.round_budget
    multiplier = params.multiplier(instance.n_locations, instance.rho)
    limit = multiplier * instance.k
    ledger = PrivacyLedger()

    def cover(system):
        solution = partial_set_cover_greedy(system, instance.rho, share, noise, require_coverable=False)
        ledger.extend(solution.ledger)
        return solution.chosen, solution.exhausted

    traces = radius_binary_search(instance, params.rounds, cover, limit)
    return select_round(instance, traces, multiplier, ledger)


class DPClientCover:
    """
    Private client cover (k-supplier with outliers) via radius binary search.

    Args:
        gamma (float): Additive radius error γ ∈ (0, 1). Default 2**-10.
        epsilon (float): Privacy parameter ε > 0. Default 1.0.
        delta (float): Privacy parameter δ. Default 1e-6.
        alpha_mode (str): "heuristic" (α = 1, default) or "theoretical".
        alpha_constant (float): Constant B of the theoretical multiplier.

    Attributes:
        solution_ (FacilitySolution): Output of the last `solve`.
        ledger_ (PrivacyLedger): Charges of the last run, total (2ε, δ).
        rounds_ (tuple of RoundTrace): Binary-search trace of the last run.

    Examples:
        solver = DPClientCover(gamma=1 / 64, epsilon=1.0, delta=1e-6)
        solution = solver.solve(instance, NoiseSource(seed=3))
        print(solution.facilities, solution.achieved_radius)
    """

    def __init__(self, gamma=2 ** -10, epsilon=1.0, delta=1e-6, alpha_mode=HEURISTIC,
                 alpha_constant=DEFAULT_ALPHA_CONSTANT):
        self.params = ClientCoverParams(gamma, PrivacyBudget(epsilon, delta), alpha_mode, alpha_constant)
        self.solution_ = None
        self.ledger_ = None
        self.rounds_ = ()

    def solve(self, instance, noise=None):
        noise = noise if noise is not None else NoiseSource()
        try:
            self.solution_ = dp_client_cover(instance, self.params, noise)
        except InfeasibleError:
            self.solution_ = None
            raise
        self.ledger_ = self.solution_.ledger
        self.rounds_ = self.solution_.rounds
        return self.solution_
