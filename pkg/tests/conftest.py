import numpy as np
import pytest

from .randomgroups import random_group


@pytest.fixture(scope="session")
def group_corpus():
    rng = np.random.default_rng(20241017)
    return [random_group(rng) for _ in range(120)]
