"""
.. module:: binary_channel

Module binary_channel models the non-stationary binary channel that
independently substitutes or erases each position, its noise statistics,
the error budget derived from them and the concentration bounds on the
number of substitutions and erasures.

Expected counts and the error budget are computed with
:py:class:`fractions.Fraction` over the shortest decimal form of every
probability, so that e.g. a uniform substitution profile gives
``p_eff == 2 * p_f`` exactly.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BINARY, DimensionError, DomainError, ERASURE, ReceivedWord


logger = logging.getLogger(__name__)

CLEAN = 0
SUBSTITUTE = 1
ERASE = 2

_SEED_MASK = 2 ** 64 - 1


def trial_generator(seed, index):
    """Independent generator for Monte Carlo stream ``(seed, index)``.

    Args:
        seed (int): 64-bit experiment seed (negative values are wrapped)
        index (int): trial index

    Returns:
        numpy.random.Generator: generator seeded from the pair
    """

    return np.random.default_rng([seed & _SEED_MASK, index])


def _exact(value):
    return Fraction(str(float(value)))


@dataclass(frozen=True, eq=False)
class NoiseProfile:
    """Per-position substitution and erasure probabilities."""

    p_f: np.ndarray
    p_e: np.ndarray

    def __post_init__(self):
        p_f = np.asarray(self.p_f, dtype=float)
        p_e = np.asarray(self.p_e, dtype=float)
        if p_f.ndim != 1 or p_f.shape != p_e.shape or p_f.size == 0:
            raise DimensionError("p_f and p_e must be non-empty vectors of "
                                 "equal length")
        if np.any(p_f < 0) or np.any(p_e < 0):
            raise DomainError("noise probabilities must be nonnegative")
        bad = np.flatnonzero(p_f + p_e > 1.0 + 1e-12)
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"position {i + 1}: p_f + p_e = "
                              f"{p_f[i] + p_e[i]!r} exceeds 1")
        p_f.setflags(write=False)
        p_e.setflags(write=False)
        object.__setattr__(self, "p_f", p_f)
        object.__setattr__(self, "p_e", p_e)

    @classmethod
    def uniform(cls, n, p_f=0.0, p_e=0.0):
        """Stationary profile with the same probabilities at every position."""
        if n < 1:
            raise DomainError(f"profile length must be positive, got {n}")
        return cls(np.full(n, float(p_f)), np.full(n, float(p_e)))

    @property
    def n(self):
        return self.p_f.size


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    """One draw W of the noise: CLEAN, SUBSTITUTE or ERASE per position."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.int8)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("a noise realization is a non-empty vector")
        if np.any((w < CLEAN) | (w > ERASE)):
            raise DomainError("noise entries must be CLEAN, SUBSTITUTE or "
                              "ERASE")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self):
        return self.w.size

    @property
    def substitutions(self):
        """int: T_f, the number of substituted positions."""
        return int(np.count_nonzero(self.w == SUBSTITUTE))

    @property
    def erasures(self):
        """int: T_e, the number of erased positions."""
        return int(np.count_nonzero(self.w == ERASE))

    @property
    def substituted_positions(self):
        return frozenset(int(i) + 1 for i in np.flatnonzero(self.w == SUBSTITUTE))

    @property
    def erased_positions(self):
        return frozenset(int(i) + 1 for i in np.flatnonzero(self.w == ERASE))


@dataclass(frozen=True)
class ChannelStats:
    """Expected noise counts and the error budget t of a profile.

    Attributes:
        n (int): word length
        mu_f (float): expected number of substitutions
        mu_e (float): expected number of erasures
        p_eff (float): (2 mu_f + mu_e) / n
        t (int): floor(n p_eff (1 + 2 eps))
        epsilon (float): slack
    """

    n: int
    mu_f: float
    mu_e: float
    p_eff: float
    t: int
    epsilon: float


def sample_noise(profile, rng):
    """Draw one noise realization, independently per position.

    Args:
        profile (NoiseProfile): the channel profile
        rng (numpy.random.Generator): generator owned by the caller

    Returns:
        NoiseRealization: the sampled noise
    """

    u = rng.random(profile.n)
    w = np.where(u < profile.p_f, SUBSTITUTE,
                 np.where(u < profile.p_f + profile.p_e, ERASE, CLEAN))
    return NoiseRealization(w)


def sample_counts(profile, size, rng):
    """Draw *size* independent pairs (T_f, T_e).

    Positions sharing the same probabilities are grouped and drawn as one
    multinomial, which has exactly the law of the per-position sum.

    Returns:
        tuple: two int arrays of length *size*, T_f and T_e
    """

    pairs = np.stack([profile.p_f, profile.p_e], axis=1)
    groups, counts = np.unique(pairs, axis=0, return_counts=True)
    t_f = np.zeros(size, dtype=np.int64)
    t_e = np.zeros(size, dtype=np.int64)
    for (p_f, p_e), count in zip(groups, counts):
        clean = max(0.0, 1.0 - p_f - p_e)
        draws = rng.multinomial(int(count), [p_f, p_e, clean], size=size)
        t_f += draws[:, 0]
        t_e += draws[:, 1]
    return t_f, t_e


def transmit(x, w):
    """Pass a binary word through the channel for a fixed noise draw.

    Position i of the output is x_i when clean, 1 - x_i when substituted and
    the erasure symbol when erased.

    Args:
        x (Word): binary word
        w (NoiseRealization): noise of the same length

    Raises:
        DomainError: if x is not over the binary alphabet
        DimensionError: if the lengths differ

    Returns:
        ReceivedWord: the channel output
    """

    if x.alphabet.size != 2:
        raise DomainError("the substitution/erasure channel carries binary "
                          "words only")
    if x.length != w.n:
        raise DimensionError(f"word of length {x.length} with noise of "
                             f"length {w.n}")
    entries = tuple(ERASURE if wi == ERASE else (1 - xi if wi == SUBSTITUTE
                                                 else xi)
                    for xi, wi in zip(x.symbols, w.w.tolist()))
    return ReceivedWord(entries, BINARY)


def channel_stats(profile, epsilon):
    """Compute mu_f, mu_e, p_eff and the error budget t.

    Raises:
        DomainError: if epsilon is not positive

    Returns:
        ChannelStats: statistics of the profile
    """

    if epsilon <= 0:
        raise DomainError(f"slack epsilon must be positive, got {epsilon}")
    mu_f = sum((_exact(v) for v in profile.p_f), Fraction(0))
    mu_e = sum((_exact(v) for v in profile.p_e), Fraction(0))
    p_eff = (2 * mu_f + mu_e) / profile.n
    t = math.floor(profile.n * p_eff * (1 + 2 * _exact(epsilon)))
    stats = ChannelStats(profile.n, float(mu_f), float(mu_e), float(p_eff),
                         t, float(epsilon))
    logger.debug("channel stats %s", stats)
    return stats


def concentration_bound(mu, epsilon):
    """Bound 2 exp(-eps^2 mu / 4) on P(|T - mu| >= eps mu).

    Raises:
        DomainError: if mu or epsilon is not positive
    """

    if mu <= 0:
        raise DomainError(f"expected count must be positive, got {mu}")
    if epsilon <= 0:
        raise DomainError(f"slack epsilon must be positive, got {epsilon}")
    return 2.0 * math.exp(-epsilon ** 2 * mu / 4.0)


def decoding_error_bound(stats):
    """Analytic bound on P(2 T_f + T_e > t) from the concentration bounds.

    If both counts stay within (1 + eps) of their means then
    2 T_f + T_e < (2 mu_f + mu_e)(1 + eps); when that quantity is at most t
    the failure probability is bounded by the sum of the two concentration
    bounds. Otherwise no bound better than 1 follows.

    Args:
        stats (ChannelStats): statistics of the profile

    Returns:
        float: bound in [0, 1]
    """

    if (2 * stats.mu_f + stats.mu_e) * (1 + stats.epsilon) > stats.t:
        return 1.0
    bound = 0.0
    for mu in (stats.mu_f, stats.mu_e):
        if mu > 0:
            bound += concentration_bound(mu, stats.epsilon)
    return min(1.0, bound)


def budget_exceedance(profile, t):
    """Exact P(2 T_f + T_e > t) by convolving the per-position laws.

    Args:
        profile (NoiseProfile): the channel profile
        t (int): error budget

    Returns:
        float: the exceedance probability
    """

    pmf = np.ones(1)
    for p_f, p_e in zip(profile.p_f, profile.p_e):
        pmf = np.convolve(pmf, [max(0.0, 1.0 - p_f - p_e), p_e, p_f])
    if t < 0:
        return 1.0
    return float(min(1.0, pmf[t + 1:].sum()))
