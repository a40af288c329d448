from dataclasses import dataclass


@dataclass(frozen=True)
class PrivacyBudget:
    """(ε, δ) pair; ε > 0 and 0 <= δ < 1. Addition is basic composition."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must be in [0, 1)")

    def __add__(self, other):
        if not isinstance(other, PrivacyBudget):
            return NotImplemented
        return PrivacyBudget(self.epsilon + other.epsilon, self.delta + other.delta)

    def scaled(self, factor: float):
        """(factor·ε, factor·δ), e.g. the per-round share of a split budget."""
        return PrivacyBudget(self.epsilon * factor, self.delta * factor)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return abs(self.epsilon - other.epsilon) <= tol and abs(self.delta - other.delta) <= tol


def compose(budgets) -> PrivacyBudget:
    """
    Basic composition: component-wise sum of (ε_i, δ_i).

    Raises:
        ValueError: empty list.
    """
    budgets = list(budgets)
    if not budgets:
        raise ValueError("compose needs at least one budget")
    epsilon = sum(b.epsilon for b in budgets)
    delta = sum(b.delta for b in budgets)
    return PrivacyBudget(epsilon, delta)


class PrivacyLedger:
    """
    Ordered record of the mechanism invocations of one run.

    Every private solver charges the budget of each mechanism it runs under a
    short label; `total()` is the composed spend reported by the harness.
    """

    def __init__(self):
        self.entries = []

    def charge(self, label: str, budget: PrivacyBudget) -> None:
        self.entries.append((label, budget))

    def extend(self, other) -> None:
        self.entries.extend(other.entries)

    def total(self) -> PrivacyBudget:
        return compose(budget for _, budget in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        if not self.entries:
            return "PrivacyLedger(empty)"
        total = self.total()
        return f"PrivacyLedger({len(self.entries)} charges, total=({total.epsilon:.6g}, {total.delta:.3g}))"
