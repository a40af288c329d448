import logging
import math
from dataclasses import dataclass

from core.errors import InfeasibleError, RegimeError, ValidationError
from core.set_system import CoverRequirement, SetSystem
from cover.common import PartialCoverSolver
from privacy.budget import PrivacyBudget, PrivacyLedger
from privacy.mechanisms import epsilon_prime, exponential_choice, laplace
from privacy.noise import NoiseSource

logger = logging.getLogger(__name__)

AMPLIFICATION_ALPHA = 0.5
AMPLIFIED_RATIO = 0.15


def amplification_constant(alpha: float = AMPLIFICATION_ALPHA) -> float:
    """C = (1 - 1/e - α)·ln(1 + α)/2."""
    if not 0 < alpha < 1 - 1 / math.e:
        raise ValueError("alpha must be in (0, 1 - 1/e)")
    return (1 - 1 / math.e - alpha) * math.log(1 + alpha) / 2


def amplification_repeats(n: int, alpha: float = AMPLIFICATION_ALPHA) -> int:
    """T = ⌈ln(n)/ln(1 + α)⌉, at least 1."""
    if n < 2:
        return 1
    return max(1, math.ceil(math.log(n) / math.log(1 + alpha) - 1e-12))


@dataclass(frozen=True)
class MaxCovParams:
    """
    Parameters of the private max-coverage routines.

    Mathematical Foundation:
    ========================

    1. Expectation variant (budget (ε, δ), k picks):
       ε₀ = ε / (2·ln(e/δ)),  per-pick weight ε₀ / k
       E[cov] >= (1 - 1/e)·OPT_k - 2k·ln(n)/ε₀

    2. Amplified variant:
       α = 0.5,  C = (1 - 1/e - α)·ln(1 + α)/2,  T = ⌈ln(n)/ln(1 + α)⌉
       T independent expectation runs at (ε/T, δ/T) each, then one exponential
       choice on coverage with weight ε/2 (sensitivity 1). Total (2ε, δ); a
       0.15-approximation with probability 1 - O(1/n) in the stated regime.

    The per-repeat share ε/T equals ε·ln(1 + α)/ln(n) whenever ln(n)/ln(1 + α)
    is an integer, and keeps the composed spend at exactly ε otherwise.
    """

    k: int
    epsilon: float
    delta: float
    alpha: float = AMPLIFICATION_ALPHA

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if not 0 < self.alpha < 1 - 1 / math.e:
            raise ValueError("alpha must be in (0, 1 - 1/e)")

    @property
    def epsilon0(self) -> float:
        return epsilon_prime(self.epsilon, self.delta)

    @property
    def constant(self) -> float:
        return amplification_constant(self.alpha)

    def repeats(self, n: int) -> int:
        return amplification_repeats(n, self.alpha)

    def repeat_budget(self, n: int) -> PrivacyBudget:
        t = self.repeats(n)
        return PrivacyBudget(self.epsilon / t, self.delta / t)


def _greedy_max_cover(masks, candidates, uncovered: int, k: int, weight: float, noise: NoiseSource):
    """k exponential picks on marginal gains restricted to `uncovered`; returns (picks, covered)."""
    candidates = list(candidates)
    picks = []
    covered = 0
    for _ in range(min(k, len(candidates))):
        gains = [(masks[s] & uncovered & ~covered).bit_count() for s in candidates]
        pick = candidates.pop(exponential_choice(gains, weight, noise))
        picks.append(pick)
        covered |= masks[pick] & uncovered
    return picks, covered


def _check_budget_k(system: SetSystem, k: int):
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > system.m:
        raise ValidationError(f"k = {k} exceeds the number of sets m = {system.m}")


def dp_max_cover_expected(
    system: SetSystem,
    k: int,
    budget: PrivacyBudget,
    noise: NoiseSource,
    candidates=None,
    uncovered: int = None,
    ledger: PrivacyLedger = None,
) -> list:
    """
    Private greedy max coverage with an even ε₀/k split over the k picks.

    `candidates` and `uncovered` restrict the run to a residual instance
    (remaining set ids, still-uncovered elements); both default to the whole
    system. k = 0 returns []. Charges (ε, δ) to `ledger` when given.

    Raises:
        ValidationError: k > m.
    """
    _check_budget_k(system, k)
    if k == 0:
        return []
    params = MaxCovParams(k, budget.epsilon, budget.delta)
    candidates = range(system.m) if candidates is None else candidates
    uncovered = system.universe_mask if uncovered is None else uncovered
    picks, _ = _greedy_max_cover(system.masks, candidates, uncovered, k, params.epsilon0 / k, noise)
    if ledger is not None:
        ledger.charge("maxcov-expected", budget)
    return picks


def dp_max_cover_amplified(
    system: SetSystem,
    k: int,
    budget: PrivacyBudget,
    noise: NoiseSource,
    candidates=None,
    uncovered: int = None,
    ledger: PrivacyLedger = None,
    alpha: float = AMPLIFICATION_ALPHA,
) -> list:
    """
    High-probability private max coverage: best of T expectation runs.

    Each repeat draws from its own child source (`noise.spawn(i)`), so repeats
    are independent and could run in parallel. The winner is picked by the
    exponential mechanism on coverage with weight ε/2. Charges (2ε, δ).

    Raises:
        ValidationError: k > m.
    """
    _check_budget_k(system, k)
    if k == 0:
        return []
    params = MaxCovParams(k, budget.epsilon, budget.delta, alpha)
    candidates = list(range(system.m) if candidates is None else candidates)
    uncovered = system.universe_mask if uncovered is None else uncovered
    repeats = params.repeats(system.n)
    share = params.repeat_budget(system.n)
    families, coverages = [], []
    for i in range(repeats):
        child = noise.spawn(i)
        picks, covered = _greedy_max_cover(
            system.masks, candidates, uncovered, k, epsilon_prime(share.epsilon, share.delta) / k, child
        )
        families.append(picks)
        coverages.append(covered.bit_count())
        if ledger is not None:
            ledger.charge("maxcov-repeat", share)
    winner = exponential_choice(coverages, budget.epsilon / 2.0, noise)
    if ledger is not None:
        ledger.charge("maxcov-select", PrivacyBudget(budget.epsilon, 0.0))
    logger.debug("amplified maxcov: k=%d repeats=%d coverages=%s winner=%d", k, repeats, coverages, winner)
    return families[winner]


def search_schedule(n: int, rho):
    """
    Fixed quantities of the max-coverage search.

    Returns:
        tuple: (rho_prime, passes t, guess slots log2(n)) with ρ′ = (ρ + 1)/2 and
            t = ⌈log_{0.85}(1 - ρ′)⌉.
    """
    rho = CoverRequirement.coerce(rho).rho
    rho_prime = (rho + 1) / 2
    passes = math.ceil(math.log(1 - rho_prime) / math.log(1 - AMPLIFIED_RATIO) - 1e-12)
    return rho_prime, max(1, passes), math.log2(n)


def search_call_budget(budget: PrivacyBudget, passes: int, slots: float) -> PrivacyBudget:
    """
    Per-call (ε′, δ′) of the max-coverage search.

    A guess runs `passes` amplified calls, each spending (2ε′, δ′), and one
    Laplace release of the coverage spending (ε′, 0). With
        ε′ = 2ε / (slots·(2·passes + 1)),  δ′ = δ / (slots·passes)
    every guess costs (2ε, δ)/slots, and `slots` guesses cost (2ε, δ).
    """
    return PrivacyBudget(
        2 * budget.epsilon / (slots * (2 * passes + 1)),
        budget.delta / (slots * passes),
    )


def regime_upper(n: int, rho, budget: PrivacyBudget, alpha: float = AMPLIFICATION_ALPHA) -> int:
    """upper = ⌊C·(1 - ρ/2)·n·ε₀ / ln³(n)⌋, the largest guess the guarantee admits."""
    rho = CoverRequirement.coerce(rho).rho
    eps0 = epsilon_prime(budget.epsilon, budget.delta)
    return math.floor(amplification_constant(alpha) * (1 - rho / 2) * n * eps0 / math.log(n) ** 3)


@dataclass(frozen=True)
class GuessTrace:
    guess: int
    chosen: tuple
    coverage: int
    noisy_coverage: float
    accepted: bool


def partial_cover_via_maxcov(
    system: SetSystem,
    rho,
    budget: PrivacyBudget,
    noise: NoiseSource,
    upper: int = None,
    ledger: PrivacyLedger = None,
    traces: list = None,
) -> list:
    """
    Pseudo-approximate private Partial Set Cover by binary search on OPT.

    Algorithm:
    ==========
    Binary search over guesses OPT′ ∈ {1, ..., upper}. For a guess:
        1. (ε′, δ′) from search_call_budget with log₂(n) guess slots
        2. t passes of amplified MaxCover with budget OPT′ on the residual
           instance; the picks accumulate in SOL
        3. γ = |∪ SOL|,  γ̂ = γ + ln(n)/ε′ + Lap(1/ε′), charged as "maxcov-laplace"
        4. γ̂ >= ρn accepts the guess and the search moves down, otherwise up
    Output SOL of the minimum accepted guess.

    The budget is committed for log₂(n) guesses up front. Whatever the run did
    not spend (guesses never needed, passes cut short by an exhausted family)
    is recorded as "maxcov-unused-reserve", computed from the actual charges,
    so the ledger closes at (2ε, δ).

    Args:
        upper (int, optional): Largest guess. Defaults to the regime bound
            ⌊C·(1 - ρ/2)·n·ε₀/ln³n⌋; an explicit value is the caller's assertion
            that OPT lies in the regime.
        traces (list, optional): Receives one GuessTrace per guess.

    Raises:
        ValidationError: n < 2, uncoverable system, or an `upper` needing more
            than log₂(n) guesses.
        RegimeError: upper < 1 (n too small for the parameter regime).
        InfeasibleError: no guess up to `upper` was accepted; diagnostics hold the
            SOL of the largest guess tried.
    """
    rho = CoverRequirement.coerce(rho)
    n = system.n
    if n < 2:
        raise ValidationError("the max-coverage search needs n >= 2")
    if not system.is_coverable():
        raise ValidationError("every element must be covered by some set")
    if upper is None:
        upper = regime_upper(n, rho, budget)
        if upper < 1:
            raise RegimeError(
                f"n = {n} is below the max-coverage regime (upper bound {upper} < 1); "
                "use the greedy solver or pass an explicit upper bound"
            )
    if upper < 1:
        raise ValidationError("upper must be at least 1")
    upper = min(upper, system.m)
    _, passes, slots = search_schedule(n, rho)
    if math.floor(math.log2(upper)) + 1 > slots:
        raise ValidationError(f"upper = {upper} needs more than log2(n) = {slots:.2f} guesses")

    per_call = search_call_budget(budget, passes, slots)
    target = rho.rho * n
    lo, hi = 1, upper
    best = None
    last = None
    guesses = 0
    run_ledger = PrivacyLedger()
    while lo <= hi:
        guess = (lo + hi) // 2
        guesses += 1
        child = noise.spawn(guesses - 1)
        chosen = []
        uncovered = system.universe_mask
        candidates = list(range(system.m))
        for p in range(passes):
            if not candidates:
                break
            picks = dp_max_cover_amplified(
                system, min(guess, len(candidates)), per_call, child.spawn(p),
                candidates=candidates, uncovered=uncovered, ledger=run_ledger,
            )
            chosen.extend(picks)
            for s in picks:
                candidates.remove(s)
                uncovered &= ~system.masks[s]
        coverage = (system.universe_mask & ~uncovered).bit_count()
        noisy = coverage + math.log(n) / per_call.epsilon + laplace(1.0 / per_call.epsilon, child)
        run_ledger.charge("maxcov-laplace", PrivacyBudget(per_call.epsilon, 0.0))
        accepted = noisy >= target
        logger.debug("maxcov search: guess=%d |SOL|=%d coverage=%d noisy=%.2f accepted=%s",
                     guess, len(chosen), coverage, noisy, accepted)
        if traces is not None:
            traces.append(GuessTrace(guess, tuple(chosen), coverage, noisy, accepted))
        last = chosen
        if accepted:
            best = chosen
            hi = guess - 1
        else:
            lo = guess + 1

    spent = run_ledger.total()
    reserve_eps = 2 * budget.epsilon - spent.epsilon
    reserve_delta = budget.delta - spent.delta
    if reserve_eps < -1e-9 or reserve_delta < -1e-15:
        raise RuntimeError(f"max-coverage search overspent its budget: ({spent.epsilon}, {spent.delta})")
    if reserve_eps > 1e-12:
        run_ledger.charge("maxcov-unused-reserve", PrivacyBudget(reserve_eps, max(0.0, reserve_delta)))
    if ledger is not None:
        ledger.extend(run_ledger)
    if best is None:
        raise InfeasibleError(f"no guess up to {upper} reached the covering requirement", diagnostics=last)
    return best


class MaxCoverageCover(PartialCoverSolver):
    """
    Private Partial Set Cover through repeated private max coverage.

    Gives a pseudo-approximation: at most O(log(1/(1-ρ)))·OPT sets, compared
    with the optimal full set cover, provided OPT lies in the regime below
    `upper`.

    Args:
        epsilon (float): Privacy parameter ε > 0. Default 1.0.
        delta (float): Privacy parameter δ ∈ (0, 1). Default 1e-6.
        upper (int, optional): Largest OPT guess; the regime bound by default.

    Attributes:
        ledger_ (PrivacyLedger): Charges of the last run, total (2ε, δ).
        traces_ (list of GuessTrace): The binary-search guesses of the last run.
    """

    def __init__(self, epsilon=1.0, delta=1e-6, upper=None):
        self.budget = PrivacyBudget(epsilon, delta)
        if upper is not None and upper < 1:
            raise ValueError("upper must be at least 1")
        self.upper = upper
        self.traces_ = []

    def solve(self, system, rho, noise=None):
        noise = noise if noise is not None else NoiseSource()
        self.ledger_ = PrivacyLedger()
        self.traces_ = []
        return partial_cover_via_maxcov(
            system, rho, self.budget, noise, upper=self.upper, ledger=self.ledger_, traces=self.traces_
        )
