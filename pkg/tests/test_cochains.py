import itertools
import random
from collections import Counter

import pytest
from wulink.bss import boundaries, cycles
from wulink.checks import cup_i_coboundary_holds, leibniz_holds
from wulink.cochains import (
    Cochain,
    RingMismatchError,
    _diagonal,
    coboundary,
    coproduct,
    cup,
    cup_i,
    pullback,
    suspend,
)
from wulink.cohomology import cohomology, reduced_complex
from wulink.complex import (
    SimplicialComplex,
    antipodal_cover,
    coboundary_matrices,
    suspension,
)
from wulink.duality import duality_certificate, wu_classes
from wulink.rings import ZZ, Zmod
from wulink.steenrod import sq


def test_cochain_values_are_reduced(s2: SimplicialComplex) -> None:
    u = Cochain(s2, 1, Zmod(4), {0: 5, 1: 4, 2: -1})
    assert u.values == {0: 1, 2: 3}
    assert (2 * u).values == {0: 2, 2: 2}
    assert (u - u).is_zero()
    with pytest.raises(IndexError):
        Cochain(s2, 1, ZZ, {6: 1})


def test_cochain_ring_mismatch(s2: SimplicialComplex, rp2: SimplicialComplex) -> None:
    u = Cochain.indicator(s2, 1, 0, ZZ)
    with pytest.raises(RingMismatchError):
        u + Cochain.indicator(s2, 1, 0, Zmod(2))
    with pytest.raises(RingMismatchError):
        u + Cochain.indicator(s2, 2, 0, ZZ)
    with pytest.raises(RingMismatchError):
        u + Cochain.indicator(rp2, 1, 0, ZZ)


def test_change_ring_and_divide(s2: SimplicialComplex) -> None:
    u = Cochain(s2, 0, Zmod(4), {0: 3, 1: 2})
    assert u.lift().values == {0: 3, 1: 2}
    assert u.change_ring(Zmod(2)).values == {0: 1}
    assert Cochain(s2, 0, ZZ, {0: 4, 1: -8}).divide(4).values == {0: 1, 1: -2}
    with pytest.raises(ArithmeticError):
        Cochain(s2, 0, ZZ, {0: 3}).divide(2)
    with pytest.raises(RingMismatchError):
        u.divide(2)


def test_coboundary(s2: SimplicialComplex) -> None:
    vertex = Cochain.indicator(s2, 0, 0, ZZ)
    # δ of the vertex 0 indicator is −1 on every edge (0, j).
    assert coboundary(vertex)((0, 1)) == -1
    assert coboundary(vertex)((1, 2)) == 0
    assert coboundary(Cochain.constant(s2, 0, ZZ)).is_zero()
    assert coboundary(coboundary(Cochain.random(s2, 0, ZZ, random.Random(0)))).is_zero()


def test_cup(s2: SimplicialComplex) -> None:
    u = Cochain(s2, 1, ZZ, {s2.index(1)[(0, 1)]: 2})
    v = Cochain(s2, 1, ZZ, {s2.index(1)[(1, 2)]: 3})
    product = cup(u, v)
    assert product.degree == 2
    assert product((0, 1, 2)) == 6
    assert product((0, 1, 3)) == 0
    assert cup(v, u).is_zero()
    assert cup(u, Cochain.constant(s2, 2, ZZ)).is_zero()


def test_cup_zero_is_cup(rp2: SimplicialComplex) -> None:
    rng = random.Random(3)
    for p in range(3):
        for q in range(3 - p):
            u = Cochain.random(rp2, p, ZZ, rng)
            v = Cochain.random(rp2, q, ZZ, rng)
            assert cup_i(u, v, 0) == cup(u, v)


def test_cup_i_rejects_negative(s2: SimplicialComplex) -> None:
    u = Cochain.indicator(s2, 1, 0, ZZ)
    with pytest.raises(ValueError):
        cup_i(u, u, -1)


def test_coproduct_degrees() -> None:
    for n in range(4):
        for i in range(n + 1):
            for value, front, back in coproduct(n, i):
                assert value
                assert len(front) + len(back) == n + i + 2


@pytest.mark.parametrize("ring", [ZZ, Zmod(2), Zmod(4)])
def test_coboundary_formula(ring, rp2: SimplicialComplex, s2: SimplicialComplex) -> None:
    rng = random.Random(str(ring))
    for complex_ in (s2, rp2):
        for p in range(3):
            for q in range(3):
                for i in range(4):
                    u = Cochain.random(complex_, p, ring, rng)
                    v = Cochain.random(complex_, q, ring, rng)
                    assert cup_i_coboundary_holds(u, v, i), (complex_.name, p, q, i)
                    assert leibniz_holds(u, v)


def test_pullback_commutes_with_coboundary() -> None:
    cover = antipodal_cover(2)
    rng = random.Random(4)
    for degree in range(2):
        u = Cochain.random(cover.base, degree, ZZ, rng)
        assert coboundary(pullback(u, cover.vertex_map, cover.total)) == pullback(
            coboundary(u), cover.vertex_map, cover.total
        )


def test_pullback_of_constant() -> None:
    cover = antipodal_cover(2)
    one = Cochain.constant(cover.base, 0, Zmod(2))
    assert pullback(one, cover.vertex_map, cover.total) == Cochain.constant(
        cover.total, 0, Zmod(2)
    )


def test_suspend_commutes_with_coboundary(rp2: SimplicialComplex) -> None:
    suspended = suspension(rp2)
    rng = random.Random(5)
    for degree in range(2):
        u = Cochain.random(rp2, degree, Zmod(4), rng)
        assert coboundary(suspend(u, suspended)) == suspend(coboundary(u), suspended)


def interval_coproduct(n: int, i: int) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    # Cut 0..n at i + 1 points; u reads the even intervals and v the odd ones.
    terms: Counter = Counter()
    for cuts in itertools.combinations(range(n + 1), i + 1):
        bounds = (0, *cuts, n)
        intervals = [range(bounds[j], bounds[j + 1] + 1) for j in range(i + 2)]
        front = tuple(sorted(set().union(*intervals[0::2])))
        back = tuple(sorted(set().union(*intervals[1::2])))
        terms[front, back] += 1
    return {term for term, count in terms.items() if count % 2}


def interval_cup_i(u: Cochain, v: Cochain, i: int) -> Cochain:
    complex_ = u.complex
    degree = u.degree + v.degree - i
    terms = [
        (front, back)
        for front, back in interval_coproduct(degree, i)
        if len(front) == u.degree + 1 and len(back) == v.degree + 1
    ]
    front_index, back_index = complex_.index(u.degree), complex_.index(v.degree)
    values = {}
    for position, simplex in enumerate(complex_.simplices(degree)):
        values[position] = sum(
            u.values.get(front_index[tuple(simplex[p] for p in front)], 0)
            * v.values.get(back_index[tuple(simplex[p] for p in back)], 0)
            for front, back in terms
        )
    return Cochain(complex_, degree, u.ring, values)


@pytest.mark.parametrize("n", range(5))
def test_coproduct_extremes_match_interval_formula(n: int) -> None:
    for i in (0, n):
        mod_two = {(front, back) for value, front, back in coproduct(n, i) if value % 2}
        assert mod_two == interval_coproduct(n, i)


@pytest.mark.parametrize("name", ["rp2", "rp3", "l41", "torus"])
def test_squares_match_interval_formula(name: str, request) -> None:
    complex_ = request.getfixturevalue(name)
    ring = Zmod(2)
    for degree in range(1, complex_.dimension + 1):
        for x in cohomology(complex_, ring, degree).generator_classes():
            for i in range(degree + 1):
                if degree + i > complex_.dimension:
                    continue
                w = interval_cup_i(x.rep, x.rep, degree - i)
                assert cohomology(complex_, ring, degree + i).class_of(w) == sq(i, x)


@pytest.mark.parametrize(
    "cached",
    [
        _diagonal,
        coproduct,
        coboundary_matrices,
        reduced_complex,
        cohomology,
        duality_certificate,
        wu_classes,
        cycles,
        boundaries,
    ],
)
def test_caches_are_bounded(cached) -> None:
    assert cached.cache_parameters()["maxsize"] is not None
