"""
.. module:: conflict

Module conflict implements conflict-set coding for discrete memoryless
channels: epsilon-probable output sets and their conflict sets, the greedy
packing of inputs with pairwise disjoint probable sets, the conflict-set
decoder with its exact error probability, and the typical-set pipeline that
builds dictionaries and codes for the n-fold channel.

Probable sets are viewed as a bipartite :py:mod:`networkx` graph between
inputs and outputs; the packing works on its projection onto the inputs,
where two inputs are adjacent iff they share an output.

Masses compared against epsilon are the masses *outside* a set, summed with
:py:func:`math.fsum`. A correctly rounded sum does not depend on summation
order and is monotone in the summed set, so the exact error probabilities
reproduce the construction's inequalities bit for bit.
"""

import enum
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from .core import (Alphabet, CapacityError, Code, DimensionError, DomainError,
                   ResourceError, Word)
from .entropy import (Distribution, JointDistribution, MASS_TOLERANCE,
                      joint_conditional_entropies)


logger = logging.getLogger(__name__)

#: Cap on #X0 * #Y0 for exact error summation.
MAX_EXACT_PAIRS = 10 ** 7

#: Cap on #X^n + #Y^n for typical-set enumeration.
MAX_ENUMERATED = 2 ** 24

ErrorProfile = namedtuple("ErrorProfile", ["per_word", "max"])

ChebyshevBounds = namedtuple("ChebyshevBounds",
                             ["input", "output", "joint", "total"])


class Strategy(enum.Enum):
    """How probable sets are chosen."""

    GREEDY_MASS = "greedy_mass"
    FULL_ROW = "full_row"


def _index_alphabet(size):
    if size <= 36:
        return Alphabet.standard(size)
    return Alphabet(tuple(str(i) for i in range(size)))


def _log(values, base):
    with np.errstate(divide="ignore"):
        return np.log(values) / math.log(base)


def _enumerate(alphabet_size, n):
    powers = alphabet_size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    indices = np.arange(alphabet_size ** n, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % alphabet_size


@dataclass(frozen=True, eq=False)
class DMC:
    """Discrete memoryless channel given by its transition matrix p0(y|x).

    Inputs and outputs are words of length one over index alphabets.
    """

    transition: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.transition, dtype=float)
        if p.ndim != 2 or p.size == 0:
            raise DimensionError("a transition matrix is a non-empty 2-d "
                                 "array")
        if np.any(p < 0):
            raise DomainError("transition probabilities must be nonnegative")
        for i, row in enumerate(p, start=1):
            total = math.fsum(row)
            if abs(total - 1.0) > MASS_TOLERANCE:
                raise DomainError(f"row {i} sums to {total!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "transition", p)

    @classmethod
    def identity(cls, size):
        return cls(np.eye(size))

    @classmethod
    def binary_symmetric(cls, p):
        return cls([[1.0 - p, p], [p, 1.0 - p]])

    @classmethod
    def binary_asymmetric(cls, p0, p1):
        """Binary channel with p(1|0) = p0 and p(0|1) = p1."""
        return cls([[1.0 - p0, p0], [p1, 1.0 - p1]])

    @property
    def input_size(self):
        return self.transition.shape[0]

    @property
    def output_size(self):
        return self.transition.shape[1]

    @cached_property
    def inputs(self):
        alphabet = _index_alphabet(self.input_size)
        return tuple(Word((i,), alphabet) for i in range(self.input_size))

    def row(self, index):
        return self.transition[index]


class ProductChannel:
    """The n-fold memoryless extension of a :py:class:`DMC`.

    Inputs and outputs are enumerated in lexicographic order; rows are
    computed on demand.
    """

    def __init__(self, channel, n):
        """
        Args:
            channel (DMC): per-symbol channel
            n (int): block length

        Raises:
            ResourceError: if #X^n + #Y^n exceeds :py:data:`MAX_ENUMERATED`
        """

        if n < 1:
            raise DomainError(f"block length must be positive, got {n}")
        total = channel.input_size ** n + channel.output_size ** n
        if total > MAX_ENUMERATED:
            raise ResourceError(f"{total} enumerated words exceed the cap of "
                                f"{MAX_ENUMERATED}")
        self.channel = channel
        self.n = n
        self.input_array = _enumerate(channel.input_size, n)
        self.output_array = _enumerate(channel.output_size, n)

    @property
    def input_size(self):
        return self.input_array.shape[0]

    @property
    def output_size(self):
        return self.output_array.shape[0]

    @cached_property
    def inputs(self):
        alphabet = _index_alphabet(self.channel.input_size)
        return tuple(Word(x, alphabet) for x in self.input_array.tolist())

    def row(self, index):
        """numpy.ndarray: p(y|x) over all outputs y for input number *index*."""
        x = self.input_array[index]
        return self.channel.transition[x[None, :], self.output_array].prod(axis=1)

    def log_row(self, index, base):
        x = self.input_array[index]
        logs = _log(self.channel.transition, base)
        return logs[x[None, :], self.output_array].sum(axis=1)


@dataclass(frozen=True, eq=False)
class ProbableSetFamily:
    """A choice of epsilon-probable output sets D(x, eps) for some inputs.

    Attributes:
        epsilon (float): slack
        inputs (tuple): the inputs X0 as words, in canonical order
        input_indices (tuple): channel row number of each input
        output_size (int): number of channel outputs
        probable (tuple): frozenset of output numbers per input
    """

    epsilon: float
    inputs: tuple
    input_indices: tuple
    output_size: int
    probable: tuple

    def __post_init__(self):
        if not len(self.inputs) == len(self.input_indices) \
                == len(self.probable):
            raise DimensionError("inputs, indices and probable sets must "
                                 "align")

    @cached_property
    def conflicts(self):
        """dict: output number -> frozenset of input positions C(y, eps)."""
        conflicts = {}
        for position, outputs in enumerate(self.probable):
            for y in outputs:
                conflicts.setdefault(y, set()).add(position)
        return {y: frozenset(xs) for y, xs in conflicts.items()}

    def conflict_set(self, y):
        return self.conflicts.get(y, frozenset())

    @property
    def size(self):
        return len(self.inputs)

    @cached_property
    def d_left(self):
        """int: d_L, the largest probable set."""
        return max((len(s) for s in self.probable), default=0)

    @cached_property
    def d_right(self):
        """int: d_R, the largest conflict set."""
        return max((len(s) for s in self.conflicts.values()), default=0)

    @cached_property
    def _positions(self):
        return {w: i for i, w in enumerate(self.inputs)}

    def position(self, word):
        try:
            return self._positions[word]
        except KeyError:
            raise DomainError(f"{word} is not an input of this family")

    @cached_property
    def graph(self):
        """networkx.Graph: bipartite graph, ("x", i) -- ("y", j) iff
        j is in D(x_i, eps)."""
        graph = nx.Graph()
        graph.add_nodes_from((("x", i) for i in range(self.size)),
                             bipartite=0)
        graph.add_nodes_from((("y", y) for y in self.conflicts), bipartite=1)
        graph.add_edges_from((("x", i), ("y", y))
                             for i, outputs in enumerate(self.probable)
                             for y in outputs)
        return graph

    @cached_property
    def conflict_graph(self):
        """networkx.Graph: inputs adjacent iff their probable sets meet."""
        left = [("x", i) for i in range(self.size)]
        return nx.bipartite.projected_graph(self.graph, left)


def build_probable_sets(channel, epsilon, strategy=Strategy.GREEDY_MASS):
    """Choose an epsilon-probable set for every input of a channel.

    With ``greedy_mass`` the outputs of each row are taken in decreasing
    probability (lower output number first on ties) until the mass left
    outside is at most epsilon; with ``full_row`` every set is the whole
    output alphabet.

    Args:
        channel (DMC): the channel
        epsilon (float): slack, 0 < eps < 1
        strategy (Strategy or str): set selection rule

    Raises:
        DomainError: if epsilon is outside (0, 1)

    Returns:
        ProbableSetFamily: the family over all channel inputs
    """

    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    strategy = Strategy(strategy)
    sets = []
    for i in range(channel.input_size):
        row = channel.row(i)
        if strategy is Strategy.FULL_ROW:
            sets.append(frozenset(range(channel.output_size)))
        else:
            sets.append(_greedy_mass_set(row, epsilon))
    family = ProbableSetFamily(epsilon, channel.inputs,
                               tuple(range(channel.input_size)),
                               channel.output_size, tuple(sets))
    logger.debug("probable sets (%s): d_L=%d d_R=%d", strategy.value,
                 family.d_left, family.d_right)
    return family


def _greedy_mass_set(row, epsilon):
    order = np.argsort(-row, kind="stable")
    ranked = row[order]
    tails = np.append(np.cumsum(ranked[::-1])[::-1], 0.0)
    k = int(np.argmax(tails <= epsilon))
    while math.fsum(ranked[k:]) > epsilon:
        k += 1
    while k > 0 and math.fsum(ranked[k - 1:]) <= epsilon:
        k -= 1
    return frozenset(int(y) for y in order[:k])


def max_admissible_size(family):
    """Largest M with M < #X0 / (d_L d_R), zero when none exists."""
    product = family.d_left * family.d_right
    if family.size == 0 or product == 0:
        return 0
    return (family.size - 1) // product


def greedy_disjoint_code(family, size):
    """Pick *size* inputs with pairwise disjoint probable sets.

    Inputs are scanned in canonical order; each chosen input removes every
    input sharing an output with it. Each step removes at most d_L d_R
    inputs, so the scan succeeds whenever size < #X0 / (d_L d_R).

    Args:
        family (ProbableSetFamily): probable sets to pack
        size (int): number of code words M >= 1

    Raises:
        CapacityError: if M * d_L * d_R >= #X0

    Returns:
        Code: the M chosen inputs
    """

    if size < 1:
        raise DomainError(f"code size must be at least 1, got {size}")
    product = family.d_left * family.d_right
    if size * product >= family.size:
        raise CapacityError(f"M = {size} violates M < #X0 / (d_L*d_R) = "
                            f"{family.size} / {product}")

    graph = family.conflict_graph
    removed = set()
    chosen = []
    for i in range(family.size):
        if i in removed:
            continue
        chosen.append(i)
        if len(chosen) == size:
            break
        removed.update(j for _, j in graph.neighbors(("x", i)))
    if len(chosen) < size:
        raise CapacityError(f"only {len(chosen)} disjoint inputs found for "
                            f"M = {size}")
    return Code(tuple(family.inputs[i] for i in chosen))


class ConflictDecoder:
    """Conflict-set decoder for a code packed from a probable-set family.

    An output y decodes to the code word x_j if x_j is the only code word
    in the conflict set C(y, eps); every other output decodes to the first
    code word.
    """

    def __init__(self, family, code):
        if code.size == 0:
            raise DomainError("cannot decode with an empty code")
        self.family = family
        self.code = code
        counts = np.zeros(family.output_size, dtype=np.int64)
        owner = np.zeros(family.output_size, dtype=np.int64)
        for j, word in enumerate(code):
            outputs = np.fromiter(family.probable[family.position(word)],
                                  dtype=np.int64)
            counts[outputs] += 1
            owner[outputs] = j
        #: code position decided for each output, -1 for the fallback
        self.decisions = np.where(counts == 1, owner, -1)

    def decode(self, y):
        j = int(self.decisions[y])
        return self.code[j if j >= 0 else 0]


def conflict_decode(family, code, y):
    """Decode output number *y* with the conflict-set rule.

    Args:
        family (ProbableSetFamily): probable sets used to build the code
        code (Code): code whose words are inputs of the family
        y (int): output number

    Returns:
        Word: the decoded code word
    """

    members = [j for j, word in enumerate(code)
               if family.position(word) in family.conflict_set(y)]
    if len(members) == 1:
        return code[members[0]]
    return code[0]


def exact_error_probability(channel, family, code, domain=None):
    """Exact decoding error of every code word under the conflict decoder.

    For each code word x the probabilities p(y|x) of all outputs y that do
    not decode to x are summed.

    Args:
        channel (DMC or ProductChannel): channel the family was built for
        family (ProbableSetFamily): probable sets
        code (Code): code over the family inputs
        domain (numpy.ndarray, optional): boolean mask of outputs where the
            decoder is defined; outputs outside it count as errors

    Raises:
        ResourceError: if #X0 * #Y0 exceeds :py:data:`MAX_EXACT_PAIRS`

    Returns:
        ErrorProfile: per-word error probabilities and their maximum
    """

    if family.size * channel.output_size > MAX_EXACT_PAIRS:
        raise ResourceError(f"{family.size} x {channel.output_size} pairs "
                            f"exceed the cap of {MAX_EXACT_PAIRS}")
    if code.size == 0:
        return ErrorProfile((), 0.0)
    decisions = ConflictDecoder(family, code).decisions
    if domain is None:
        domain = np.ones(channel.output_size, dtype=bool)
    errors = []
    for j, word in enumerate(code):
        row = channel.row(family.input_indices[family.position(word)])
        correct = decisions == j
        if j == 0:
            correct |= decisions == -1
        errors.append(min(1.0, math.fsum(row[~(correct & domain)])))
    return ErrorProfile(tuple(errors), max(errors))


@dataclass(frozen=True, eq=False)
class TypicalSets:
    """Typical sets of an i.i.d. input through a memoryless channel.

    Attributes:
        n (int): block length
        epsilon (float): slack
        base (int): logarithm base N = #X
        entropies (EntropySummary): per-symbol entropies in base N
        channel (ProductChannel): the n-fold channel
        a1 (tuple): input numbers of A_{n,1}
        a2 (numpy.ndarray): boolean mask of A_{n,2} over outputs
        probable (dict): input number in A_{n,1} -> frozenset D_n(x, eps)
        outside_mass (dict): input number -> mass of p(.|x) outside D_n(x)
        b (tuple): input numbers of B_n = A_{n,4}
        probabilities (dict): exact P(A_{n,1}), P(A_{n,2}), P(A_n)
        chebyshev (ChebyshevBounds): Chebyshev bounds on the complements
    """

    n: int
    epsilon: float
    base: int
    entropies: object
    channel: ProductChannel = field(repr=False)
    a1: tuple = field(repr=False)
    a2: np.ndarray = field(repr=False)
    probable: dict = field(repr=False)
    outside_mass: dict = field(repr=False)
    b: tuple = field(repr=False)
    probabilities: dict
    chebyshev: ChebyshevBounds
    log_p_x: np.ndarray = field(repr=False)
    log_p_y: np.ndarray = field(repr=False)

    def in_joint(self, x, y):
        """Whether (x, y) belongs to A_{n,3}(eps)."""
        log_joint = self.log_p_x[x] + self.channel.log_row(x, self.base)[y]
        return _within(-log_joint, self.n, self.entropies.h_xy, self.epsilon)

    def family(self, inputs=None):
        """Probable-set family D_n(x, eps) over *inputs* (default A_{n,1}).

        Args:
            inputs (iterable, optional): input numbers from A_{n,1}
        """

        inputs = self.a1 if inputs is None else tuple(inputs)
        words = self.channel.inputs
        return ProbableSetFamily(self.epsilon,
                                 tuple(words[x] for x in inputs),
                                 inputs, self.channel.output_size,
                                 tuple(self.probable[x] for x in inputs))


def _within(neg_log, n, h, epsilon):
    tolerance = 1e-9 * max(1, n)
    return (neg_log >= n * (h - epsilon) - tolerance) \
        & (neg_log <= n * (h + epsilon) + tolerance)


def _chebyshev(p, h, n, epsilon, base):
    support = p[p > 0]
    variance = float(np.sum(support * (-_log(support, base) - h) ** 2))
    return min(1.0, variance / (n * epsilon ** 2))


def build_typical_sets(p_x, channel, n, epsilon):
    """Enumerate the typical sets of a small-n memoryless channel.

    A_{n,1} and A_{n,2} hold the words whose product probability lies within
    N^{-n(H +- eps)} of the input and output entropies, A_{n,3} the pairs
    banded around H(X,Y). For x in A_{n,1}, D_n(x, eps) collects the outputs
    y in A_{n,2} with (x, y) in A_{n,3}; B_n keeps the x whose conditional
    mass outside D_n(x, eps) is at most eps.

    Args:
        p_x (Distribution): per-symbol input law
        channel (DMC): per-symbol channel
        n (int): block length
        epsilon (float): slack

    Raises:
        DimensionError: if p_x and channel inputs disagree in size
        ResourceError: if the word spaces exceed the enumeration cap

    Returns:
        TypicalSets: the enumerated sets
    """

    if p_x.size != channel.input_size:
        raise DimensionError(f"input law over {p_x.size} symbols for a "
                             f"channel with {channel.input_size} inputs")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    base = max(2, channel.input_size)
    joint = JointDistribution.from_channel(
        Distribution(p_x.probabilities, base), channel.transition, base)
    h = joint_conditional_entropies(joint)
    product = ProductChannel(channel, n)

    p_in = joint.matrix.sum(axis=1)
    p_out = joint.matrix.sum(axis=0)
    log_p_x = _log(p_in, base)[product.input_array].sum(axis=1)
    log_p_y = _log(p_out, base)[product.output_array].sum(axis=1)
    a1_mask = _within(-log_p_x, n, h.h_x, epsilon)
    a2 = _within(-log_p_y, n, h.h_y, epsilon)
    a1 = tuple(int(x) for x in np.flatnonzero(a1_mask))

    probable = {}
    outside_mass = {}
    typical_mass = 0.0
    for x in a1:
        row = product.row(x)
        log_joint = log_p_x[x] + product.log_row(x, base)
        inside = a2 & _within(-log_joint, n, h.h_xy, epsilon)
        probable[x] = frozenset(int(y) for y in np.flatnonzero(inside))
        outside_mass[x] = math.fsum(row[~inside])
        typical_mass += base ** log_p_x[x] * math.fsum(row[inside])
    b = tuple(x for x in a1 if outside_mass[x] <= epsilon)

    probabilities = {
        "A1": math.fsum(base ** log_p_x[a1_mask]),
        "A2": math.fsum(base ** log_p_y[a2]),
        "A": typical_mass,
    }
    bounds = (_chebyshev(p_in, h.h_x, n, epsilon, base),
              _chebyshev(p_out, h.h_y, n, epsilon, base),
              _chebyshev(joint.matrix.ravel(), h.h_xy, n, epsilon, base))
    chebyshev = ChebyshevBounds(*bounds, min(1.0, sum(bounds)))
    logger.info("typical sets n=%d: #A1=%d #A2=%d #B=%d P(A)=%.6f", n,
                len(a1), int(a2.sum()), len(b), typical_mass)
    return TypicalSets(n, epsilon, base, h, product, a1, a2, probable,
                       outside_mass, b, probabilities, chebyshev,
                       log_p_x, log_p_y)


@dataclass(frozen=True)
class Theorem3Report:
    """Outcome of :py:func:`theorem3_pipeline`.

    Attributes:
        typical (TypicalSets): enumerated typical sets
        alpha (float): dictionary exponent
        dictionary_target (int): ceil(N^{n(alpha - 2 eps)})
        dictionary (tuple): chosen input numbers from B_n
        family (ProbableSetFamily): D_n(x, eps) over the dictionary
        size (int): M, the largest integer below N0 / (d_L d_R)
        code (Code): the packed code (empty when M = 0)
        errors (ErrorProfile): exact error probabilities of the code, None
                               when M = 0
        achieved_rate (float): log_N(M) / n, None when M = 0
        target_rate (float): alpha - H(Y|X) - H(X|Y) - 7 eps
        d_left_bound (float): N^{n(H(Y|X) + 2 eps)}
        d_right_bound (float): N^{n(H(X|Y) + 2 eps)}
        shortfalls (tuple): human-readable shortfalls, empty if none
        infeasible (str): the violated packing condition when M = 0
    """

    typical: TypicalSets = field(repr=False)
    alpha: float
    dictionary_target: int
    dictionary: tuple = field(repr=False)
    family: ProbableSetFamily = field(repr=False)
    size: int
    code: Code = field(repr=False)
    errors: ErrorProfile
    achieved_rate: float
    target_rate: float
    d_left_bound: float
    d_right_bound: float
    shortfalls: tuple
    infeasible: str = None

    @property
    def feasible(self):
        return self.size >= 1


def theorem3_pipeline(p_x, channel, n, epsilon, alpha=None,
                      selector="canonical", seed=0):
    """Build a dictionary inside B_n and a conflict-set code inside it.

    The dictionary is the first ceil(N^{n(alpha - 2 eps)}) words of B_n under
    the selector (canonical order, or a seeded random subset kept in
    canonical order). The probable sets D_n(x, eps) then feed the greedy
    packing with the largest admissible M, and the code's exact error is
    summed over all outputs, charging outputs outside A_{n,2} as errors.

    Args:
        p_x (Distribution): per-symbol input law
        channel (DMC): per-symbol channel
        n (int): block length
        epsilon (float): slack
        alpha (float, optional): dictionary exponent, defaults to H(X)
        selector (str): ``canonical`` or ``random``
        seed (int): seed of the random selector

    Raises:
        DomainError: unless 0 < alpha <= H(X)

    Returns:
        Theorem3Report: the pipeline report
    """

    typical = build_typical_sets(p_x, channel, n, epsilon)
    h = typical.entropies
    alpha = h.h_x if alpha is None else alpha
    if not 0 < alpha <= h.h_x + 1e-12:
        raise DomainError(f"need 0 < alpha <= H(X) = {h.h_x:.6f}, "
                          f"got {alpha}")
    base = typical.base
    target = math.ceil(base ** (n * (alpha - 2 * epsilon)) - 1e-9)
    shortfalls = []
    if len(typical.b) < target:
        shortfalls.append(f"#B_n = {len(typical.b)} < dictionary target "
                          f"{target}")

    if selector == "canonical":
        chosen = typical.b[:target]
    elif selector == "random":
        rng = np.random.default_rng(seed & (2 ** 64 - 1))
        picked = rng.permutation(len(typical.b))[:target]
        chosen = tuple(typical.b[i] for i in sorted(picked))
    else:
        raise DomainError(f"unknown dictionary selector {selector!r}")

    family = typical.family(chosen)
    size = max_admissible_size(family)
    infeasible = None
    if size >= 1:
        code = greedy_disjoint_code(family, size)
        errors = exact_error_probability(typical.channel, family, code,
                                         domain=typical.a2)
        achieved = math.log(size, base) / n
    else:
        infeasible = (f"no M >= 1 satisfies M < N0 / (d_L*d_R) = "
                      f"{family.size} / {family.d_left * family.d_right}")
        code = Code(())
        errors = None
        achieved = None

    return Theorem3Report(
        typical, alpha, target, chosen, family, size, code, errors, achieved,
        alpha - h.h_y_given_x - h.h_x_given_y - 7 * epsilon,
        base ** (n * (h.h_y_given_x + 2 * epsilon)),
        base ** (n * (h.h_x_given_y + 2 * epsilon)),
        tuple(shortfalls), infeasible)
