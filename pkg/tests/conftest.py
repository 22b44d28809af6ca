import os

import numpy as np
import pytest

from selection import LocalRuntime, RowDataset


def pytest_collection_modifyitems(config, items):
    """Skip scaling smoke tests unless ITFS_RUN_SLOW=1."""
    if os.getenv("ITFS_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set ITFS_RUN_SLOW=1 to run scaling tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def random_dataset(rng, m, n, max_card=4, n_classes=2, class_index=-1, informative=2):
    """Random discrete table; the first ``informative`` features partly copy the class."""
    labels = rng.integers(0, n_classes, size=m)
    cards = rng.integers(2, max_card + 1, size=n)
    table = np.column_stack([rng.integers(0, c, size=m) for c in cards])
    for k in range(min(informative, n)):
        agree = rng.random(m) < 0.6
        table[agree, k] = labels[agree] % cards[k]
    rows = np.column_stack([table, labels])
    if class_index != -1:
        rows = np.insert(table, class_index, labels, axis=1)
    return RowDataset.from_rows(rows, class_index=class_index)


@pytest.fixture
def rng():
    """Seeded generator so every test sees the same random data."""
    return np.random.default_rng(20240601)


@pytest.fixture
def make_dataset(rng):
    """Factory for random datasets drawn from the shared generator."""

    def factory(m=200, n=8, max_card=4, n_classes=2, class_index=-1, informative=2):
        return random_dataset(rng, m, n, max_card, n_classes, class_index, informative)

    return factory


@pytest.fixture
def runtime():
    return LocalRuntime(workers=2)


@pytest.fixture
def serial_runtime():
    return LocalRuntime(workers=1)


@pytest.fixture
def xor_dataset():
    """Two uniform bits and their XOR as the class, every combination twice."""
    a = np.array([0, 0, 1, 1, 0, 0, 1, 1])
    b = np.array([0, 1, 0, 1, 0, 1, 0, 1])
    return RowDataset.from_rows(np.column_stack([a, b, a ^ b]))
