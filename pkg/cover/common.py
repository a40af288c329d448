from abc import ABC, abstractmethod

from core.set_system import coverage_count


class PartialCoverSolver(ABC):
    """
    Common interface of the Partial Set Cover solvers.

    `solve` returns the chosen set ids; private solvers also leave their
    privacy ledger in `ledger_` (None for non-private ones).
    """

    ledger_ = None

    @abstractmethod
    def solve(self, system, rho, noise=None):
        pass

    def coverage(self, system, chosen):
        return coverage_count(system, chosen)
