from pathlib import Path

import numpy as np
import pytest

from cliquedist import LabeledDistanceMatrix

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def make_matrix(values, labels=None) -> LabeledDistanceMatrix:
    values = np.asarray(values, dtype=float)
    if labels is None:
        labels = tuple(f"n{i}" for i in range(values.shape[0]))
    return LabeledDistanceMatrix(tuple(labels), values)


def random_symmetric(rng, n, scale=1.0) -> LabeledDistanceMatrix:
    """Random nonnegative symmetric clique with zero diagonal, positive total."""
    a = rng.random((n, n)) * scale
    sym = (a + a.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    return make_matrix(sym)
