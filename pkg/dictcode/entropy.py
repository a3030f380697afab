"""
.. module:: entropy

Module entropy provides the entropy functions, the Stirling bound on binomial
coefficients and the rate formulas of the binary asymmetric channel.

All sums are evaluated in natural logarithms with
:py:func:`scipy.special.entr` (which implements the 0 log 0 = 0 convention)
and converted to the requested base at the end.
"""

import csv
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .core import DimensionError, DomainError


#: Tolerance on the total mass of a distribution.
MASS_TOLERANCE = 1e-12

#: Asymmetry values plotted by default.
FIGURE1_DELTAS = (0.0, 0.025, 0.05, 0.1)

EntropySummary = namedtuple("EntropySummary",
                            ["h_x", "h_y", "h_xy", "h_y_given_x",
                             "h_x_given_y"])


def _check_base(base):
    if base < 2:
        raise DomainError(f"logarithm base must be at least 2, got {base}")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite support with a logarithm base."""

    probabilities: np.ndarray
    base: int = 2

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DimensionError("a distribution is a non-empty vector")
        if np.any(p < 0):
            raise DomainError("probabilities must be nonnegative")
        if abs(math.fsum(p) - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"probabilities sum to {math.fsum(p)!r}, "
                              f"not 1")
        _check_base(self.base)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def uniform(cls, size, base=2):
        return cls(np.full(size, 1.0 / size), base)

    @property
    def size(self):
        return self.probabilities.size


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint law p_XY(x, y) given as a matrix with inputs along rows."""

    matrix: np.ndarray
    base: int = 2

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise DimensionError("a joint distribution is a non-empty matrix")
        if np.any(m < 0):
            raise DomainError("joint probabilities must be nonnegative")
        if abs(math.fsum(m.ravel()) - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"joint probabilities sum to "
                              f"{math.fsum(m.ravel())!r}, not 1")
        _check_base(self.base)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_channel(cls, p_x, transition, base=None):
        """Build p_XY(x, y) = p_{Y|X}(y|x) p_X(x).

        Args:
            p_x (Distribution): input distribution
            transition (numpy.ndarray): row-stochastic matrix p(y|x)
            base (int, optional): logarithm base, defaults to ``p_x.base``
        """

        transition = np.asarray(transition, dtype=float)
        if transition.shape[0] != p_x.size:
            raise DimensionError(f"{transition.shape[0]} channel rows for "
                                 f"{p_x.size} input symbols")
        return cls(p_x.probabilities[:, None] * transition,
                   p_x.base if base is None else base)

    @property
    def p_x(self):
        return Distribution(self.matrix.sum(axis=1), self.base)

    @property
    def p_y(self):
        return Distribution(self.matrix.sum(axis=0), self.base)


def _nats(p):
    return float(entr(np.asarray(p, dtype=float)).sum())


def binary_entropy(x):
    """Binary entropy H(x) = -x log2 x - (1-x) log2(1-x) in bits.

    Raises:
        DomainError: if x is outside [0, 1]
    """

    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy needs 0 <= x <= 1, got {x}")
    return _nats([x, 1.0 - x]) / math.log(2)


def entropy(p):
    """Shannon entropy of a :py:class:`Distribution` in its own base."""
    return _nats(p.probabilities) / math.log(p.base)


def joint_conditional_entropies(joint):
    """Marginal, joint and conditional entropies of a joint law.

    The conditional entropies come from the chain rule
    H(Y|X) = H(X,Y) - H(X) and H(X|Y) = H(X,Y) - H(Y).

    Args:
        joint (JointDistribution): the joint law

    Returns:
        EntropySummary: H(X), H(Y), H(X,Y), H(Y|X), H(X|Y)
    """

    scale = math.log(joint.base)
    h_xy = _nats(joint.matrix) / scale
    h_x = _nats(joint.matrix.sum(axis=1)) / scale
    h_y = _nats(joint.matrix.sum(axis=0)) / scale
    return EntropySummary(h_x, h_y, h_xy, h_xy - h_x, h_xy - h_y)


def stirling_binomial_bound(n, k):
    """Upper bound 4 e n 2^{n H(k/n)} on the binomial coefficient C(n, k).

    Raises:
        DomainError: unless 1 <= k <= n - 1
    """

    if not 1 <= k <= n - 1:
        raise DomainError(f"Stirling bound needs 1 <= k <= n-1, "
                          f"got n={n}, k={k}")
    return 4 * math.e * n * 2.0 ** (n * binary_entropy(k / n))


def gv_rate_bound(alpha, p):
    """Theorem-1 rate target alpha - H(p) for effective noise level *p*."""
    return alpha - binary_entropy(p)


def asymmetric_channel_entropies(p0, p1):
    """Entropies of the binary asymmetric channel under uniform input.

    Args:
        p0 (float): crossover probability p(1|0)
        p1 (float): crossover probability p(0|1)

    Returns:
        EntropySummary: closed-form H(X), H(Y), H(X,Y), H(Y|X), H(X|Y)
    """

    for p in (p0, p1):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"crossover probability {p} outside [0, 1]")
    q = (1.0 - p0 + p1) / 2.0
    h_y_given_x = (binary_entropy(p0) + binary_entropy(p1)) / 2.0
    h_y = binary_entropy(q)
    h_xy = 1.0 + h_y_given_x
    return EntropySummary(1.0, h_y, h_xy, h_y_given_x, h_xy - h_y)


def asymmetric_alpha0(p, delta):
    """alpha_0 = H(p) + H(p + delta) + 1 - H((1 - delta) / 2).

    The achievable-rate headroom without dictionary restrictions is
    ``1 - alpha_0``.

    Raises:
        DomainError: if p or delta is negative or p + delta > 1
    """

    if p < 0 or delta < 0 or p + delta > 1:
        raise DomainError(f"need p >= 0, delta >= 0 and p + delta <= 1, "
                          f"got p={p}, delta={delta}")
    return (binary_entropy(p) + binary_entropy(p + delta)
            + 1.0 - binary_entropy((1.0 - delta) / 2.0))


def rate_curve(delta, p_grid):
    """Evaluate the rate 1 - alpha_0 along a grid of p values.

    Returns:
        list: ``(p, 1 - alpha_0)`` pairs in grid order
    """

    return [(p, 1.0 - asymmetric_alpha0(p, delta)) for p in p_grid]


def figure1_grid(step=0.001, p_max=0.25):
    """Evenly spaced grid ``0, step, ..., p_max`` rounded to 12 digits."""
    if step <= 0 or p_max < 0:
        raise DomainError("grid step must be positive and p_max nonnegative")
    count = int(round(p_max / step))
    return [round(i * step, 12) for i in range(count + 1)]


def write_rate_curves(deltas, p_grid, stream):
    """Write ``p,delta,rate`` CSV rows for every delta and grid point.

    Args:
        deltas (iterable): asymmetry values
        p_grid (list): p values
        stream: writable text stream

    Returns:
        int: number of data rows written
    """

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["p", "delta", "rate"])
    rows = 0
    for delta in deltas:
        for p, rate in rate_curve(delta, p_grid):
            writer.writerow([f"{p:.6f}", f"{delta:.6f}", f"{rate:.6f}"])
            rows += 1
    return rows
