import math

import pytest
from wulink.cohomology import (
    SesSpec,
    UnsupportedCoefficientsError,
    change_coeffs,
    cohomology,
    connecting,
    cup_classes,
)
from wulink.complex import SimplicialComplex
from wulink.rings import Zmod
from wulink.steenrod import (
    Coset,
    NotInKernelError,
    adem_terms,
    beta2,
    compose,
    gen_sq,
    sq,
    total_sq,
)


def generator(complex_: SimplicialComplex, degree: int, modulus: int = 2):
    (x,) = cohomology(complex_, Zmod(modulus), degree).generator_classes()
    return x


def test_sq_on_projective_space(rp3: SimplicialComplex) -> None:
    a = generator(rp3, 1)
    a2 = generator(rp3, 2)
    a3 = generator(rp3, 3)
    assert sq(0, a) == a
    assert sq(1, a) == a2
    assert sq(2, a).is_zero()
    assert sq(1, a2).is_zero()
    assert sq(2, a2) == cup_classes(a2, a2)
    assert sq(1, a2) == connecting(SesSpec("D"), a2)
    assert cup_classes(a, a2) == a3


def test_total_sq(rp2: SimplicialComplex) -> None:
    a = generator(rp2, 1)
    assert total_sq(a) == (a, generator(rp2, 2))


def test_sq_out_of_range(rp2: SimplicialComplex) -> None:
    a = generator(rp2, 1)
    assert sq(-1, a).is_zero()
    assert sq(2, a).is_zero()
    assert sq(5, a).degree == 6


def test_sq_needs_mod_two(rp2: SimplicialComplex) -> None:
    with pytest.raises(UnsupportedCoefficientsError):
        sq(1, generator(rp2, 0, 4))


@pytest.mark.parametrize(
    "a, b, terms",
    [
        (1, 1, []),
        (1, 2, [(3, 0)]),
        (2, 2, [(3, 1)]),
        (3, 2, []),
        (1, 3, []),
        (2, 3, [(5, 0), (4, 1)]),
    ],
)
def test_adem_terms(a: int, b: int, terms: list[tuple[int, int]]) -> None:
    assert adem_terms(a, b) == terms


@pytest.mark.parametrize("a, b", [(0, 1), (2, 1), (4, 2)])
def test_adem_terms_rejects(a: int, b: int) -> None:
    with pytest.raises(ValueError):
        adem_terms(a, b)


def test_compose(rp3: SimplicialComplex) -> None:
    a = generator(rp3, 1)
    assert compose((1, 1), a).is_zero()
    assert compose((1,), a) == sq(1, a)
    assert compose((), a) is a


def test_gen_sq_matches_sq_mod_two(rp3: SimplicialComplex) -> None:
    for degree in range(4):
        x = generator(rp3, degree)
        for i in range(degree + 1):
            assert gen_sq(i, x) == sq(i, x)


def test_gen_sq_factorizations(l41: SimplicialComplex) -> None:
    for n in (2, 3):
        ring = Zmod(2**n)
        for degree in range(4):
            for x in cohomology(l41, ring, degree).generator_classes():
                reduced = change_coeffs(x, Zmod(2))
                for i in range(degree + 1):
                    if i % 2 == 0:
                        expected = change_coeffs(sq(i, reduced), ring)
                    else:
                        expected = connecting(SesSpec("C", n), sq(i - 1, reduced))
                    assert gen_sq(i, x) == expected


def test_gen_sq_needs_power_of_two(rp2: SimplicialComplex) -> None:
    with pytest.raises(ValueError):
        gen_sq(0, generator(rp2, 0, 6))


def test_beta2(l41: SimplicialComplex) -> None:
    x = generator(l41, 1)
    # β vanishes on H¹(L(4,1); ℤ/2) but the second Bockstein does not.
    assert connecting(SesSpec("A", 1), x).is_zero()
    coset = beta2(x, 1)
    assert isinstance(coset, Coset)
    assert not coset.is_zero()
    assert coset.contains(generator(l41, 2))
    assert beta2(x) == coset


def test_beta2_rejects(rp2: SimplicialComplex, l41: SimplicialComplex) -> None:
    with pytest.raises(NotInKernelError):
        beta2(generator(rp2, 1))
    with pytest.raises(ValueError):
        beta2(generator(l41, 1), 2)


@pytest.mark.parametrize("j", range(1, 6))
def test_squares_of_projective_space_are_binomial(j: int, rp5: SimplicialComplex) -> None:
    a = generator(rp5, j)
    for i in range(0, 6 - j):
        assert sq(i, a).coords == (math.comb(j, i) % 2,), (i, j)
