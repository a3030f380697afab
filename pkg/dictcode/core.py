"""
.. module:: core

Module core holds the shared vocabulary of the package: alphabets, words,
received words, dictionaries and codes, together with the Hamming geometry
and the combinatorial volumes used by the constructions.

Words are stored as tuples of alphabet indices, so binary and general
alphabets share one representation. Dictionaries and codes expose a cached
:py:mod:`numpy` array of their words for vectorised distance computations.
"""

import math
import string
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product

import numpy as np


#: Largest dictionary that may be materialized (greedy construction cap).
MAX_MATERIALIZED = 2 ** 22

ERASURE = None


class DictcodeError(Exception):
    """General exception used to signalize errors in dictcode package."""
    pass


class DimensionError(DictcodeError):
    """Words or vectors of mismatching lengths were combined."""
    pass


class DomainError(DictcodeError):
    """An argument lies outside the domain of an operation."""
    pass


class CapacityError(DictcodeError):
    """A requested code size violates the packing precondition."""
    pass


class ResourceError(DictcodeError):
    """A computation would exceed the desk-scale enumeration caps."""
    pass


class InfeasibleError(DictcodeError):
    """Pipeline parameters violate the inequality named in the message."""
    pass


class FormatError(DictcodeError):
    """A file does not follow its declared format.

    Args:
        message (str): description of the problem
        path (str, optional): file in which the problem was found
        line (int, optional): 1-based line number
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered alphabet with an optional erasure symbol."""

    symbols: tuple
    erasure_symbol: str = None

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise DomainError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise DomainError("alphabet symbols must be distinct")
        if self.erasure_symbol is not None \
                and self.erasure_symbol in self.symbols:
            raise DomainError(f"erasure symbol {self.erasure_symbol!r} "
                              f"clashes with an alphabet symbol")

    @classmethod
    def standard(cls, size):
        """Alphabet of the first *size* symbols of ``0-9A-Z``, erasure ``e``.

        Args:
            size (int): alphabet size N, at most 36

        Returns:
            Alphabet: the standard alphabet of size N
        """

        pool = string.digits + string.ascii_uppercase
        if not 1 <= size <= len(pool):
            raise DomainError(f"alphabet size must be in 1..{len(pool)}, "
                              f"got {size}")
        return cls(tuple(pool[:size]), "e")

    @property
    def size(self):
        return len(self.symbols)

    @cached_property
    def _lookup(self):
        return {s: i for i, s in enumerate(self.symbols)}

    def index(self, symbol):
        try:
            return self._lookup[symbol]
        except KeyError:
            raise DomainError(f"symbol {symbol!r} is not in the alphabet")


BINARY = Alphabet.standard(2)


@dataclass(frozen=True)
class Word:
    """Fixed-length word, a tuple of indices into an :py:class:`Alphabet`."""

    symbols: tuple
    alphabet: Alphabet = field(default=BINARY, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if len(self.symbols) == 0:
            raise DomainError("words must have positive length")
        if any(s < 0 or s >= self.alphabet.size for s in self.symbols):
            raise DomainError(f"word {self.symbols} has entries outside "
                              f"an alphabet of size {self.alphabet.size}")

    @classmethod
    def parse(cls, text, alphabet=BINARY):
        """Create a word from its symbol characters, e.g. ``"0110"``."""
        return cls(tuple(alphabet.index(c) for c in text), alphabet)

    @property
    def length(self):
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self):
        return "".join(self.alphabet.symbols[s] for s in self.symbols)


@dataclass(frozen=True)
class ReceivedWord:
    """Channel output: alphabet indices with :py:data:`ERASURE` for erased
    positions."""

    entries: tuple
    alphabet: Alphabet = field(default=BINARY, compare=False, repr=False)

    def __post_init__(self):
        entries = tuple(ERASURE if e is ERASURE else int(e)
                        for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) == 0:
            raise DomainError("received words must have positive length")
        for e in entries:
            if e is not ERASURE and not 0 <= e < self.alphabet.size:
                raise DomainError(f"received entry {e} is outside an "
                                  f"alphabet of size {self.alphabet.size}")

    @classmethod
    def parse(cls, text, alphabet=BINARY):
        """Create a received word from text such as ``"0e1"``."""
        erasure = alphabet.erasure_symbol
        return cls(tuple(ERASURE if c == erasure else alphabet.index(c)
                         for c in text), alphabet)

    @property
    def length(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def erased_positions(self):
        """frozenset: 1-based positions holding the erasure symbol."""
        return frozenset(i + 1 for i, e in enumerate(self.entries)
                         if e is ERASURE)

    @property
    def erasure_mask(self):
        return np.array([e is ERASURE for e in self.entries], dtype=bool)

    def as_array(self):
        """Entries as an int array, erasures replaced by ``-1``."""
        return np.array([-1 if e is ERASURE else e for e in self.entries],
                        dtype=np.int64)

    def __str__(self):
        erasure = self.alphabet.erasure_symbol or "e"
        return "".join(erasure if e is ERASURE else self.alphabet.symbols[e]
                       for e in self.entries)


def _words_array(words, n):
    if len(words) == 0:
        return np.zeros((0, n), dtype=np.int8)
    return np.array([w.symbols for w in words], dtype=np.int8)


@dataclass(frozen=True)
class Dictionary:
    """Finite set of distinct words of common length *n*.

    Iteration follows the insertion order (the order of the source file);
    every greedy algorithm in the package consumes dictionaries in it.
    """

    n: int
    words: tuple
    alphabet: Alphabet = field(default=BINARY, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if self.n < 1:
            raise DomainError(f"word length must be positive, got {self.n}")
        for w in self.words:
            if w.length != self.n:
                raise DimensionError(f"word {w} has length {w.length}, "
                                     f"dictionary length is {self.n}")
        if len(set(self.words)) != len(self.words):
            raise DomainError("dictionary contains duplicate words")

    @classmethod
    def full_space(cls, n, alphabet=BINARY):
        """Materialize the whole word space in lexicographic order.

        Raises:
            ResourceError: if N^n exceeds :py:data:`MAX_MATERIALIZED`
        """

        if alphabet.size ** n > MAX_MATERIALIZED:
            raise ResourceError(f"{alphabet.size}^{n} words exceed the "
                                f"materialization cap of {MAX_MATERIALIZED}")
        return cls(n, tuple(Word(s, alphabet)
                            for s in product(range(alphabet.size), repeat=n)),
                   alphabet)

    @property
    def size(self):
        return len(self.words)

    @property
    def rate_exponent(self):
        """float: α = log_N(#D) / n."""
        return math.log(self.size, self.alphabet.size) / self.n

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    @cached_property
    def _members(self):
        return frozenset(self.words)

    def __contains__(self, word):
        return word in self._members

    @cached_property
    def array(self):
        """numpy.ndarray: words as rows of an ``(M, n)`` int8 array."""
        return _words_array(self.words, self.n)


@dataclass(frozen=True)
class FullSpace:
    """The whole space N^n used as a virtual dictionary.

    Only its size and rate exponent are available; constructions need
    :py:meth:`materialize`.
    """

    n: int
    alphabet: Alphabet = BINARY

    @property
    def size(self):
        return self.alphabet.size ** self.n

    @property
    def rate_exponent(self):
        return 1.0

    def __len__(self):
        return self.size

    def materialize(self):
        return Dictionary.full_space(self.n, self.alphabet)


@dataclass(frozen=True)
class Code:
    """Ordered list of distinct words, optionally tied to a source dictionary.

    Args:
        words (tuple): the code words
        dictionary (Dictionary, optional): dictionary the words come from
        claimed_distance (int, optional): minimum distance declared by a
                                          code file
    """

    words: tuple
    dictionary: Dictionary = field(default=None, compare=False, repr=False)
    claimed_distance: int = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if len(set(self.words)) != len(self.words):
            raise DomainError("code words must be pairwise distinct")
        lengths = {w.length for w in self.words}
        if len(lengths) > 1:
            raise DimensionError(f"code words have mixed lengths {lengths}")
        if self.dictionary is not None:
            for w in self.words:
                if w not in self.dictionary:
                    raise DomainError(f"code word {w} is not in the "
                                      f"dictionary")

    @property
    def size(self):
        return len(self.words)

    @property
    def n(self):
        return self.words[0].length if self.words else 0

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __getitem__(self, i):
        return self.words[i]

    @property
    def rate(self):
        """float: log_N(#C) / n."""
        if not self.words:
            raise DomainError("an empty code has no rate")
        return math.log(self.size, self.words[0].alphabet.size) / self.n

    @cached_property
    def array(self):
        return _words_array(self.words, self.n)


def hamming_distance(a, b):
    """Count the positions where two words differ.

    Args:
        a (Word): first word
        b (Word): second word

    Raises:
        DimensionError: if the words have different lengths

    Returns:
        int: Hamming distance d_H(a, b)
    """

    if len(a) != len(b):
        raise DimensionError(f"cannot compare words of lengths {len(a)} "
                             f"and {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def min_distance(code):
    """Minimum Hamming distance over all unordered pairs of code words.

    Args:
        code (Code): code with at least two words

    Raises:
        DomainError: if the code has fewer than two words

    Returns:
        int: the minimum distance
    """

    if code.size < 2:
        raise DomainError("minimum distance needs at least two code words")
    if code.size <= 64:
        return min(hamming_distance(a, b)
                   for a, b in combinations(code.words, 2))
    arr = code.array
    return int(min((arr[i + 1:] != arr[i]).sum(axis=1).min()
                   for i in range(code.size - 1)))


def ball_volume(n, r, alphabet_size=2):
    """Exact number of words within Hamming distance *r* of a fixed word.

    Computes sum_{i=0}^{r} C(n, i) (N - 1)^i with Python integers.

    Raises:
        DomainError: if r is negative or larger than n

    Returns:
        int: the ball volume
    """

    if not 0 <= r <= n:
        raise DomainError(f"radius {r} outside 0..{n}")
    return sum(math.comb(n, i) * (alphabet_size - 1) ** i
               for i in range(r + 1))


def puncture(word, positions):
    """Delete the given 1-based positions from a word, keeping the order.

    Words have positive length, so removing every position is an error.
    A fully erased received word never reaches this function: the
    two-stage decoder treats it as an empty reduction, where every code
    word ties at distance 0.

    Args:
        word (Word): word to puncture
        positions (iterable): 1-based indices to remove

    Raises:
        DomainError: if an index is outside 1..n, or all positions are
                     removed

    Returns:
        Word: the reduced word of length n - #positions
    """

    positions = frozenset(positions)
    for p in positions:
        if not 1 <= p <= word.length:
            raise DomainError(f"position {p} outside 1..{word.length}")
    kept = tuple(s for i, s in enumerate(word.symbols, start=1)
                 if i not in positions)
    if not kept:
        raise DomainError("puncturing every position leaves an empty word")
    return Word(kept, word.alphabet)
