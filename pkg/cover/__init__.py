"""
Private Partial Set Cover solvers.

This module contains:
- PrivateGreedyCover: greedy permutation plus offline AboveThreshold
- MaxCoverageCover: binary search on OPT over private max coverage
"""

from .greedy import PrivateGreedyCover
from .maxcov import MaxCoverageCover

__all__ = ['PrivateGreedyCover', 'MaxCoverageCover']
