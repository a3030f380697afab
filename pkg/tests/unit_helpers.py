import contextlib
import os
from pathlib import Path

import numpy as np

from dictcode.conflict import DMC
from dictcode.core import Dictionary, Word


def make_path(name):
    return Path(__file__).parent / "fixtures" / name


@contextlib.contextmanager
def env(**kwargs):
    original = {key: os.getenv(key) for key in kwargs}
    os.environ.update({key: str(value) for key, value in kwargs.items()})
    try:
        yield
    finally:
        for key, value in original.items():
            if value is None:
                del os.environ[key]
            else:
                os.environ[key] = value


def random_dictionary(n, size, seed):
    """Dictionary of *size* distinct random binary words in random order."""
    rng = np.random.default_rng(seed)
    picked = rng.choice(2 ** n, size=size, replace=False)
    words = tuple(Word(tuple((int(v) >> (n - 1 - i)) & 1 for i in range(n)))
                  for v in picked)
    return Dictionary(n, words)


def random_sparse_channel(rng, max_inputs=256, max_outputs=256, support=3):
    """Channel whose rows put random mass on a few random outputs."""
    inputs = int(rng.integers(64, max_inputs + 1))
    outputs = int(rng.integers(inputs, max_outputs + 1))
    matrix = np.zeros((inputs, outputs))
    for row in matrix:
        columns = rng.choice(outputs, size=support, replace=False)
        weights = rng.random(support) + 0.05
        row[columns] = weights / weights.sum()
        row[columns[0]] += 1.0 - row.sum()
    return DMC(matrix)
