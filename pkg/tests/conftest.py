# -*- coding: utf-8 -*-
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from channel import ChannelSpec, noise_limited  # noqa: E402
from mellin import clear_cache  # noqa: E402

SEED = 20240611


@pytest.fixture(autouse=True)
def fresh_mellin_cache():
    clear_cache()
    yield
    clear_cache()


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def three_interferers():
    """γ_∅ = 15 dB，a = [2, 4, 8]"""
    return ChannelSpec(31.62, (2.0, 4.0, 8.0))


@pytest.fixture
def rayleigh_10db():
    return noise_limited(10.0)
