"""
Non-private baselines, exact oracles and instance generators.

This module contains:
- GreedyBaseline: classical greedy partial cover
- exact_partial_cover / exact_client_cover: exhaustive small-instance oracles
"""

from .baseline import GreedyBaseline
from .exact import OracleResult, exact_partial_cover, exact_client_cover

__all__ = ['GreedyBaseline', 'OracleResult', 'exact_partial_cover', 'exact_client_cover']
