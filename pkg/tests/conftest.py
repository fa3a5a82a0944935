import numpy as np
import pytest

import holo_interp as hi


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def flat1():
    return hi.flat_space(1)


@pytest.fixture
def disk():
    return hi.hyperbolic_ball(1.0)


@pytest.fixture
def fock1():
    return hi.fock_weight(1.0)
