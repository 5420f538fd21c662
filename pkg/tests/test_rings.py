import pytest
from wulink.rings import ZZ, Ring, Zmod


def test_integers() -> None:
    assert ZZ.is_integral
    assert str(ZZ) == "Z"
    assert ZZ.reduce(-7) == -7


@pytest.mark.parametrize("modulus", [-1, 1])
def test_invalid_modulus(modulus: int) -> None:
    with pytest.raises(ValueError):
        Ring(modulus)


def test_reduce() -> None:
    assert Zmod(4).reduce(-1) == 3
    assert Zmod(2).reduce(5) == 1
    assert str(Zmod(8)) == "Z/8"


@pytest.mark.parametrize("modulus, exponent", [(2, 1), (4, 2), (8, 3)])
def test_two_exponent(modulus: int, exponent: int) -> None:
    assert Zmod(modulus).two_exponent == exponent


@pytest.mark.parametrize("ring", [ZZ, Zmod(6), Zmod(3)])
def test_two_exponent_rejects(ring: Ring) -> None:
    with pytest.raises(ValueError):
        ring.two_exponent

