"""
Differential-privacy building blocks.

- NoiseSource: seedable randomness with a zero-noise test mode
- laplace / exponential_choice / above_threshold_offline: mechanisms
- PrivacyBudget / compose / PrivacyLedger: budget accounting
"""

from .noise import NoiseSource
from .budget import PrivacyBudget, PrivacyLedger, compose

__all__ = ['NoiseSource', 'PrivacyBudget', 'PrivacyLedger', 'compose']
