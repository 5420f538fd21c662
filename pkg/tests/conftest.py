import pytest
from wulink.complex import (
    SimplicialComplex,
    lens_space,
    product,
    rp_space,
    sphere,
)


@pytest.fixture(scope="session")
def circle() -> SimplicialComplex:
    return sphere(1)


@pytest.fixture(scope="session")
def s2() -> SimplicialComplex:
    return sphere(2)


@pytest.fixture(scope="session")
def s5() -> SimplicialComplex:
    return sphere(5)


@pytest.fixture(scope="session")
def torus(circle: SimplicialComplex) -> SimplicialComplex:
    return product(circle, circle)


@pytest.fixture(scope="session")
def rp2() -> SimplicialComplex:
    return rp_space(2)


@pytest.fixture(scope="session")
def rp3() -> SimplicialComplex:
    return rp_space(3)


@pytest.fixture(scope="session")
def rp5() -> SimplicialComplex:
    return rp_space(5)


@pytest.fixture(scope="session")
def l41() -> SimplicialComplex:
    return lens_space(4, 1)


@pytest.fixture(scope="session")
def l81() -> SimplicialComplex:
    return lens_space(8, 1)


@pytest.fixture(scope="session")
def s2xl41(l41: SimplicialComplex) -> SimplicialComplex:
    return product(sphere(2), l41)


@pytest.fixture(scope="session")
def s2xl81(l81: SimplicialComplex) -> SimplicialComplex:
    return product(sphere(2), l81)
