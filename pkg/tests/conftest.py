import pytest

from voronoi_sln.complex import build_complex
from voronoi_sln.reps import build_pi


@pytest.fixture(scope="session")
def c2():
    return build_complex(2)


@pytest.fixture(scope="session")
def c3():
    return build_complex(3)


@pytest.fixture(scope="session")
def c4():
    return build_complex(4)


@pytest.fixture(scope="session")
def pi3():
    return build_pi(3)


@pytest.fixture(scope="session")
def pi4():
    return build_pi(4)
