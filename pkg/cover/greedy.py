import logging
import math
from dataclasses import dataclass

from core.errors import ValidationError
from core.set_system import CoverRequirement, PartialCoverSolution, SetSystem, prefix_coverage
from cover.common import PartialCoverSolver
from privacy.budget import PrivacyBudget, PrivacyLedger
from privacy.mechanisms import above_threshold_offline, epsilon_prime, exponential_choice
from privacy.noise import NoiseSource

logger = logging.getLogger(__name__)

THRESHOLD_SLACK = 12.0


@dataclass(frozen=True)
class GreedyParams:
    """
    Parameters of the private greedy solver for a privacy budget (ε, δ).

    ε′ = ε / (2·ln(e/δ)) weights each exponential pick; the threshold stage
    targets T = ρn + 12·ln(m)/ε with the full ε. The stated approximation
    guarantee needs ε ∈ (0, 1); larger ε is allowed and reported as a warning.
    """

    epsilon: float
    delta: float
    slack_constant: float = THRESHOLD_SLACK

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta < 1 / math.e:
            raise ValueError("delta must be in (0, 1/e)")

    @property
    def budget(self) -> PrivacyBudget:
        return PrivacyBudget(self.epsilon, self.delta)

    @property
    def epsilon_prime(self) -> float:
        return epsilon_prime(self.epsilon, self.delta)

    def threshold_slack(self, m: int) -> float:
        return self.slack_constant * math.log(m) / self.epsilon if m > 1 else 0.0

    def threshold(self, n: int, m: int, rho) -> float:
        return CoverRequirement.coerce(rho).rho * n + self.threshold_slack(m)

    def window(self, n: int, m: int, rho):
        """Coverage interval [ρn, ρn + 24·ln(m)/ε] the threshold lands in w.h.p."""
        low = CoverRequirement.coerce(rho).rho * n
        return low, low + 2 * self.threshold_slack(m)

    def guarantee_warnings(self, n: int, m: int, rho) -> list:
        out = []
        if self.epsilon >= 1:
            out.append(f"epsilon = {self.epsilon} >= 1: the approximation guarantee is stated for epsilon < 1")
        low, high = self.window(n, m, rho)
        if high > n:
            out.append(f"coverage window [{low:.1f}, {high:.1f}] exceeds n = {n}; the threshold may never fire")
        return out


def private_greedy_permutation(system: SetSystem, epsilon_prime: float, noise: NoiseSource) -> list:
    """
    Order all m sets by repeated exponential choice on marginal gains.

    Iteration i picks S ∈ S_i with probability ∝ exp(ε′·|S ∩ U_i|), then removes
    S from the candidates and its elements from U_i. Candidates stay in
    ascending id order, so zero-noise ties go to the smallest set id.

    Raises:
        ValidationError: empty set system.
    """
    if system.m < 1:
        raise ValidationError("the set system must contain at least one set")
    masks = system.masks
    uncovered = system.universe_mask
    remaining = list(range(system.m))
    order = []
    while remaining:
        gains = [(masks[s] & uncovered).bit_count() for s in remaining]
        pick = remaining.pop(exponential_choice(gains, epsilon_prime, noise))
        order.append(pick)
        uncovered &= ~masks[pick]
    return order


def partial_set_cover_greedy(
    system: SetSystem,
    rho,
    budget: PrivacyBudget,
    noise: NoiseSource,
    require_coverable: bool = True,
    slack_constant: float = THRESHOLD_SLACK,
) -> PartialCoverSolution:
    """
    Private Partial Set Cover by greedy permutation and offline AboveThreshold.

    Algorithm:
    ==========
    1. π = private_greedy_permutation(system, ε′), ε′ = ε / (2·ln(e/δ))
    2. f_i = |π_1 ∪ ... ∪ π_i|
    3. T = ρn + 12·ln(m)/ε;  k = first i with f_i + Lap(4/ε) >= T + Lap(2/ε)
    4. Output (π, k)

    Step 1 is (ε, δ)-DP, step 3 is ε-DP; the run is charged (2ε, δ). When the
    threshold never fires, k = m and the solution is flagged `exhausted`.

    Args:
        system (SetSystem): Private set system.
        rho (float or CoverRequirement): Covering requirement.
        budget (PrivacyBudget): (ε, δ) with 0 < δ < 1/e.
        noise (NoiseSource): Randomness.
        require_coverable (bool): Reject systems with elements in no set. The
            radius-guessing client cover turns this off, since small radii leave
            people uncovered by construction.

    Raises:
        ValidationError: empty system, or an uncoverable one when required.
    """
    rho = CoverRequirement.coerce(rho)
    params = GreedyParams(budget.epsilon, budget.delta, slack_constant)
    if system.m < 1:
        raise ValidationError("the set system must contain at least one set")
    if require_coverable and not system.is_coverable():
        raise ValidationError("every element must be covered by some set")

    permutation = private_greedy_permutation(system, params.epsilon_prime, noise)
    coverage = prefix_coverage(system, permutation)
    threshold = params.threshold(system.n, system.m, rho)
    k = above_threshold_offline(coverage, threshold, params.epsilon, noise)

    ledger = PrivacyLedger()
    ledger.charge("greedy-permutation", PrivacyBudget(params.epsilon, params.delta))
    ledger.charge("above-threshold", PrivacyBudget(params.epsilon, 0.0))

    exhausted = k is None
    if exhausted:
        k = system.m
    logger.debug("greedy: n=%d m=%d T=%.2f k=%d coverage=%d exhausted=%s",
                 system.n, system.m, threshold, k, coverage[k - 1], exhausted)
    return PartialCoverSolution(
        permutation=tuple(permutation),
        k=k,
        coverage=coverage[k - 1],
        exhausted=exhausted,
        prefix_coverage=tuple(coverage),
        warnings=tuple(params.guarantee_warnings(system.n, system.m, rho)),
        ledger=ledger,
    )


class PrivateGreedyCover(PartialCoverSolver):
    """
    Private greedy Partial Set Cover solver.

    Args:
        epsilon (float): Privacy parameter ε > 0. Default 1.0.
        delta (float): Privacy parameter δ ∈ (0, 1/e). Default 1e-6.

    Attributes:
        solution_ (PartialCoverSolution): Output of the last `solve` call.
        ledger_ (PrivacyLedger): Charges of the last run, total (2ε, δ).

    Examples:
        solver = PrivateGreedyCover(epsilon=0.5, delta=1e-6)
        chosen = solver.solve(system, 0.8, NoiseSource(seed=7))
    """

    def __init__(self, epsilon=1.0, delta=1e-6, slack_constant=THRESHOLD_SLACK):
        self.params = GreedyParams(epsilon, delta, slack_constant)
        self.solution_ = None

    def solve(self, system, rho, noise=None):
        noise = noise if noise is not None else NoiseSource()
        self.solution_ = partial_set_cover_greedy(
            system, rho, self.params.budget, noise, slack_constant=self.params.slack_constant
        )
        self.ledger_ = self.solution_.ledger
        return self.solution_.chosen
