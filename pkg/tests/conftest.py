import random

import pytest

from tvpdhors import preset

SEED_A = bytes(range(32))
SEED_B = bytes(range(32, 64))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def fixed_clock():
    return lambda: 1_700_000_000.0


@pytest.fixture(params=[32, 48, 64, 72, 96, 128])
def any_preset(request):
    return preset(request.param)
