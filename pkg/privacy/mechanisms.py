"""
Differential-privacy primitives.

All noise scales are in natural-log units. Every function takes the
NoiseSource explicitly; in zero-noise mode the mechanisms reduce to their
deterministic counterparts (no noise, argmax, first crossing).
"""

import math

import numpy as np

from privacy.noise import NoiseSource


def _inverse_laplace_cdf(u, scale):
    """Map U[0, 1) draws to Lap(scale): x = -b·sign(v)·ln(1 - 2|v|), v = u - 1/2."""
    v = np.asarray(u, dtype=float) - 0.5
    # u == 0 exactly would give -inf
    tail = np.maximum(1.0 - 2.0 * np.abs(v), np.finfo(float).tiny)
    return -scale * np.sign(v) * np.log(tail)


def laplace(scale: float, noise: NoiseSource) -> float:
    """
    One draw from Lap(b), density ∝ exp(-|x|/b), by inverse CDF on a uniform.

    Raises:
        ValueError: scale <= 0.
    """
    if not scale > 0:
        raise ValueError("Laplace scale must be positive")
    if noise.is_zero_noise:
        return 0.0
    return float(_inverse_laplace_cdf(noise.uniform(), scale))


def laplace_array(scale: float, size: int, noise: NoiseSource):
    """`size` independent Lap(b) draws; same stream as `size` calls to `laplace`."""
    if not scale > 0:
        raise ValueError("Laplace scale must be positive")
    if noise.is_zero_noise:
        return np.zeros(size)
    return _inverse_laplace_cdf(noise.uniform_array(size), scale)


def exponential_choice(scores, weight: float, noise: NoiseSource) -> int:
    """
    Exponential mechanism: index i with probability ∝ exp(weight · scores[i]).

    The generic mechanism uses weight = ε / (2Δu); callers fold the constant
    themselves. Scores are shifted by their maximum before exponentiating, so
    the distribution is invariant under adding a constant to all scores.
    Zero-noise mode returns the smallest argmax index.

    Raises:
        ValueError: empty scores, non-finite score, or weight <= 0.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("exponential_choice needs at least one candidate")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    if not weight > 0:
        raise ValueError("weight must be positive")
    if noise.is_zero_noise or scores.size == 1:
        return int(np.argmax(scores))
    weights = np.exp(weight * (scores - scores.max()))
    cumulative = np.cumsum(weights)
    u = noise.uniform() * cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    return min(index, scores.size - 1)


def above_threshold_offline(values, threshold: float, epsilon: float, noise: NoiseSource):
    """
    Offline AboveThreshold on a nondecreasing sequence f_1..f_m.

    Draws T̂ = T + Lap(2/ε) once and γ_i = f_i + Lap(4/ε) independently for
    every index, then returns the first 1-based i with γ_i >= T̂, or None when
    no index qualifies. Zero-noise mode returns the first i with f_i >= T.

    Raises:
        ValueError: epsilon <= 0 or values decreasing somewhere.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    values = np.asarray(values, dtype=float)
    if values.size > 1 and np.any(np.diff(values) < 0):
        raise ValueError("above_threshold_offline expects nondecreasing values")
    if values.size == 0:
        return None
    noisy_threshold = threshold + laplace(2.0 / epsilon, noise)
    noisy_values = values + laplace_array(4.0 / epsilon, values.size, noise)
    hits = np.flatnonzero(noisy_values >= noisy_threshold)
    return int(hits[0]) + 1 if hits.size else None


def epsilon_prime(epsilon: float, delta: float) -> float:
    """ε / (2·ln(e/δ)): per-step weight that composes m adaptive picks to (ε, δ)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1) to split epsilon over adaptive steps")
    return epsilon / (2.0 * math.log(math.e / delta))
