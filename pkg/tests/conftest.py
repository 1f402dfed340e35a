import numpy as np
import pytest

from conversekit.divergence import DiscretePmf


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pmf(*probs) -> DiscretePmf:
    return DiscretePmf(np.array(probs, dtype=np.float64))


def random_pmf(rng, size: int, with_zeros: bool = False) -> DiscretePmf:
    raw = rng.uniform(0.0, 1.0, size=size)
    if with_zeros and size > 1:
        kill = rng.integers(0, size)
        raw[kill] = 0.0
    if raw.sum() == 0.0:
        raw[0] = 1.0
    return DiscretePmf(raw / raw.sum())
