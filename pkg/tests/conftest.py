import pytest

from hypermt.geometry import make_context
from hypermt.profiles import RadialProfile, random_profile


@pytest.fixture(params=[2, 3, 4, 5], ids=lambda n: f"n{n}")
def ctx(request):
    return make_context(request.param)


@pytest.fixture
def ctx2():
    return make_context(2)


@pytest.fixture
def ctx3():
    return make_context(3)


@pytest.fixture
def cone():
    """v(s) = 1 - s on [0, 1]"""
    return RadialProfile([0.0, 1.0], [1.0, 0.0])


@pytest.fixture
def staircase():
    return RadialProfile([0.0, 0.5, 2.0, 3.0, 7.5], [2.0, 1.5, 1.5, 0.2, 0.0])


@pytest.fixture
def seeded_profiles():
    return [random_profile(seed, 2 + seed % 12, 10.0 ** (seed % 5 - 2), 1.0) for seed in range(8)]
