"""Random-set sampling: include each n independently with probability n^(alpha-1).

Streams are counter-based (Philox keyed by (seed, trial)), so every trial is
reproducible independently of evaluation order, trials can run in parallel,
and the draw for a window N is a prefix of the draw for any larger window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import IntegerSet, Params, ValidationError


@dataclass(frozen=True)
class SampleSpec:
    """Sampling rule: inclusion probability min(1, n^(alpha-1)) per integer n."""

    params: Params

    def inclusion_probabilities(self, up_to: int) -> np.ndarray:
        """Vector of min(1, n^(alpha-1)) for n = 1..up_to (index 0 unused).

        alpha is exact rational; the float exponentiation error is far below
        Monte Carlo noise.
        """
        exp = float(self.params.alpha) - 1.0
        n = np.arange(up_to + 1, dtype=np.float64)
        with np.errstate(divide="ignore"):
            p = np.minimum(1.0, n**exp)
        p[0] = 0.0
        return p

    def inclusion_probability(self, n: int) -> float:
        if n < 1:
            raise ValidationError(f"n must be >= 1, got {n}")
        return min(1.0, float(n) ** (float(self.params.alpha) - 1.0))


def _stream(seed: int, trial: int) -> np.random.Generator:
    key = np.array([seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_set(spec: SampleSpec, trial: int = 0) -> IntegerSet:
    """Draw one random set on [1, N]: n is kept iff its uniform falls below n^(alpha-1).

    Deterministic given (seed, trial, alpha, N); the same (seed, trial) with a
    larger N extends the set without changing the prefix.
    """
    params = spec.params
    u = _stream(params.seed, trial).random(params.N)
    p = spec.inclusion_probabilities(params.N)
    kept = np.flatnonzero(u < p[1:]) + 1
    return IntegerSet(kept.astype(np.int64), params.N)


def sample_many(spec: SampleSpec, trials: int, first_trial: int = 0) -> list[IntegerSet]:
    return [sample_set(spec, trial=t) for t in range(first_trial, first_trial + trials)]


def expected_count(spec: SampleSpec, up_to: int | None = None) -> float:
    """Exact partial sum of inclusion probabilities: E|A intersect [1, up_to]|."""
    if up_to is None:
        up_to = spec.params.N
    if up_to > spec.params.N:
        raise ValidationError(f"up_to {up_to} exceeds window {spec.params.N}")
    return float(spec.inclusion_probabilities(up_to)[1:].sum())
