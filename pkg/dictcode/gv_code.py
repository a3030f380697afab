"""
.. module:: gv_code

Module gv_code builds codes inside an arbitrary dictionary with the greedy
Gilbert-Varshamov scan, states the size guarantee of the resulting maximal
code and decodes substitutions and erasures with the two-stage decoder.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .binary_channel import channel_stats
from .core import (Code, Dictionary, DimensionError, DomainError,
                   MAX_MATERIALIZED, ResourceError, ball_volume)
from .entropy import binary_entropy, gv_rate_bound


logger = logging.getLogger(__name__)


class FailureReason(enum.Enum):
    """Why the two-stage decoder gave up."""

    DISTANCE_TIE = "distance_tie"
    AMBIGUOUS_COMPLETION = "ambiguous_completion"


@dataclass(frozen=True)
class Decoded:
    """Successful decoding to a code word."""

    word: object

    @property
    def ok(self):
        return True


@dataclass(frozen=True)
class DecodingError:
    """Decoder failure with its reason."""

    reason: FailureReason

    @property
    def ok(self):
        return False


#: Result of the two-stage decoder.
DecodeOutcome = Union[Decoded, DecodingError]


@dataclass(frozen=True)
class GVConstructionReport:
    """Result of :py:func:`greedy_gv_construct`.

    Attributes:
        code (Code): the constructed maximal code
        d (int): target minimum distance
        guarantee (int): ceil(#D / ball_volume(n, d-1, N))
        achieved_size (int): size of the code
        dictionary_size (int): #D
    """

    code: Code = field(repr=False)
    d: int
    guarantee: int
    achieved_size: int
    dictionary_size: int


def gv_guarantee(dictionary_size, n, d, alphabet_size=2):
    """Exact lower bound ceil(#D / |B_{d-1}|) on any maximal code's size."""
    volume = ball_volume(n, d - 1, alphabet_size)
    return -(-dictionary_size // volume)


def stirling_size_bound(n, d, alpha):
    """Relaxed bound 2^{alpha n} / (4 e n^2 2^{n H((d-1)/n)}) on the code size.

    It replaces the ball volume by n times the Stirling bound of its largest
    term; it is only meaningful while (d - 1) / n < 1/2.
    """

    if not 1 <= d - 1 < n / 2:
        raise DomainError(f"relaxed bound needs 1 <= d-1 < n/2, got d={d}, "
                          f"n={n}")
    exponent = n * (alpha - binary_entropy((d - 1) / n))
    return 2.0 ** exponent / (4 * math.e * n ** 2)


def greedy_gv_construct(dictionary, d):
    """Greedily pack a minimum-distance-*d* code inside a dictionary.

    The dictionary is scanned in file order; a word is admitted iff its
    distance to every admitted word is at least *d*. Whenever a word is
    admitted, all dictionary words within distance d - 1 of it are marked
    covered, so the next uncovered word in order is exactly the next word the
    sequential scan admits. The result is maximal: every rejected word lies
    within distance d - 1 of some code word.

    Args:
        dictionary (Dictionary): materialized dictionary
        d (int): target minimum distance, 1 <= d <= n

    Raises:
        DomainError: for an empty dictionary or d outside 1..n
        ResourceError: if the dictionary exceeds the materialization cap

    Returns:
        GVConstructionReport: the code and its size guarantee
    """

    if not isinstance(dictionary, Dictionary):
        raise ResourceError("greedy construction needs a materialized "
                            "dictionary")
    if dictionary.size == 0:
        raise DomainError("cannot construct a code in an empty dictionary")
    if not 1 <= d <= dictionary.n:
        raise DomainError(f"distance {d} outside 1..{dictionary.n}")
    if dictionary.size > MAX_MATERIALIZED:
        raise ResourceError(f"dictionary of {dictionary.size} words exceeds "
                            f"the cap of {MAX_MATERIALIZED}")

    if d == 1:
        chosen = list(range(dictionary.size))
    else:
        words = dictionary.array
        covered = np.zeros(dictionary.size, dtype=bool)
        chosen = []
        position = 0
        while position < dictionary.size:
            chosen.append(position)
            distances = (words != words[position]).sum(axis=1)
            covered |= distances < d
            remaining = np.flatnonzero(~covered[position + 1:])
            if remaining.size == 0:
                break
            position += 1 + int(remaining[0])

    code = Code(tuple(dictionary.words[i] for i in chosen), dictionary)
    report = GVConstructionReport(code, d,
                                  gv_guarantee(dictionary.size, dictionary.n,
                                               d, dictionary.alphabet.size),
                                  code.size, dictionary.size)
    logger.info("greedy GV: %d of %d words admitted at d=%d (guarantee %d)",
                report.achieved_size, dictionary.size, d, report.guarantee)
    return report


class TwoStageDecoder:
    """Two-stage substitution/erasure decoder for a fixed code.

    Stage 1 punctures every code word at the erased positions and keeps the
    reduced words at minimum Hamming distance from the punctured received
    word; it fails with ``distance_tie`` unless exactly one reduced word
    remains. Stage 2 completes the erased positions and fails with
    ``ambiguous_completion`` unless exactly one code word reduces to it.
    """

    def __init__(self, code, d):
        """
        Args:
            code (Code): non-empty code
            d (int): minimum distance of the code; the decoder is guaranteed
                     to recover any word hit by 2 T_f + T_e <= d - 1
        """

        if code.size == 0:
            raise DomainError("cannot decode with an empty code")
        if d < 1:
            raise DomainError(f"minimum distance must be positive, got {d}")
        self.code = code
        self.d = d
        self._words = code.array

    def decode(self, received):
        """Decode one received word.

        Args:
            received (ReceivedWord): channel output

        Raises:
            DimensionError: if the length differs from the code length

        Returns:
            DecodeOutcome: the decoded word or the failure reason
        """

        if received.length != self.code.n:
            raise DimensionError(f"received word of length {received.length} "
                                 f"for a code of length {self.code.n}")
        kept = ~received.erasure_mask
        if not kept.any():
            if self.code.size == 1:
                return Decoded(self.code[0])
            return DecodingError(FailureReason.DISTANCE_TIE)

        reduced = self._words[:, kept]
        distances = (reduced != received.as_array()[kept]).sum(axis=1)
        winners = np.flatnonzero(distances == distances.min())
        if not (reduced[winners] == reduced[winners[0]]).all():
            return DecodingError(FailureReason.DISTANCE_TIE)
        if winners.size != 1:
            return DecodingError(FailureReason.AMBIGUOUS_COMPLETION)
        return Decoded(self.code[int(winners[0])])


def two_stage_decode(code, d, received):
    """Decode *received* with a :py:class:`TwoStageDecoder` for *code*."""
    return TwoStageDecoder(code, d).decode(received)


@dataclass(frozen=True)
class Theorem1Report:
    """Outcome of :py:func:`theorem1_pipeline`.

    Attributes:
        stats (ChannelStats): noise statistics of the profile
        d (int): t + 1
        alpha (float): log2(#D) / n
        target_rate (float): alpha - H(p_eff), None when p_eff > 1
        construction (GVConstructionReport): None when infeasible or the
                                             dictionary is virtual
        achieved_rate (float): log2(#C) / n, None without a construction
        infeasible (tuple): violated conditions that rule out a code
        warnings (tuple): conditions under which the rate target is
                          vacuous although a code is still built
    """

    stats: object
    d: int
    alpha: float
    target_rate: float
    construction: GVConstructionReport = field(repr=False)
    achieved_rate: float
    infeasible: tuple
    warnings: tuple = ()

    @property
    def feasible(self):
        return not self.infeasible


def theorem1_pipeline(dictionary, profile, epsilon):
    """Build a Theorem-1 code for a dictionary and a noise profile.

    Sets d = t + 1 from :py:func:`channel_stats`, runs the greedy
    construction and compares the achieved rate with alpha - H(p_eff).
    Parameters with d > n are reported as infeasible instead of raising;
    p_eff >= 1/2 only yields a warning since the construction is still
    defined. A virtual dictionary yields statistics only.

    Args:
        dictionary (Dictionary or FullSpace): the dictionary
        profile (NoiseProfile): the noise profile
        epsilon (float): slack

    Raises:
        DimensionError: if dictionary and profile lengths differ

    Returns:
        Theorem1Report: the pipeline report
    """

    if dictionary.n != profile.n:
        raise DimensionError(f"dictionary length {dictionary.n} differs from "
                             f"profile length {profile.n}")
    stats = channel_stats(profile, epsilon)
    d = stats.t + 1
    alpha = dictionary.rate_exponent
    target = gv_rate_bound(alpha, stats.p_eff) if stats.p_eff <= 1 else None

    infeasible = []
    warnings = []
    if stats.p_eff >= 0.5:
        warnings.append(f"p_eff = {stats.p_eff:.6f} >= 1/2")
    if d > dictionary.n:
        infeasible.append(f"d = {d} > n = {dictionary.n}")

    construction = None
    achieved = None
    if d <= dictionary.n and isinstance(dictionary, Dictionary):
        construction = greedy_gv_construct(dictionary, d)
        achieved = construction.code.rate
    elif d <= dictionary.n:
        logger.info("virtual dictionary of size %d: statistics only",
                    dictionary.size)
    return Theorem1Report(stats, d, alpha, target, construction, achieved,
                          tuple(infeasible), tuple(warnings))
