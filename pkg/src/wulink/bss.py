"""
Bockstein spectral sequence of ℤ →(2ⁿ) ℤ → ℤ/2ⁿ.

Pages are subquotients of E₁ = H*(K; ℤ/2ⁿ): E_r = Z_{r−1} / B_{r−1} with

    Z_s = {x : β̃x ∈ 2^{ns}·H*(K; ℤ)}
    B_s = red(ker 2^{ns} on H*(K; ℤ))

and d_r[x] = red(y) where 2^{n(r−1)}·y = β̃x.
"""

import dataclasses
import functools
import math

from .cochains import coboundary
from .cohomology import (
    CohomologyClass,
    InconsistencyError,
    SesSpec,
    change_coeffs,
    coboundary_preimage,
    cohomology,
    connecting,
    integral_rep,
)
from .complex import SimplicialComplex
from .linalg import IntMatrix, NoSolution, kernel_of_map, solve_mod, subgroup_order
from .logger import logger
from .rings import ZZ, Zmod

Coords = tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class BssPiece:
    degree: int
    orders: tuple[int, ...]  # summand orders of H^degree(K; ℤ/2ⁿ)
    cycles: tuple[Coords, ...]
    boundaries: tuple[Coords, ...]
    differential: tuple[Coords, ...]  # d_r of each cycle generator, in degree + 1
    order: int

    @property
    def length(self) -> int:
        """
        log₂ of the order of the piece.
        """
        return self.order.bit_length() - 1


@dataclasses.dataclass(frozen=True)
class BssPage:
    n: int
    r: int
    pieces: tuple[BssPiece, ...]

    def piece(self, degree: int) -> BssPiece:
        return self.pieces[degree]

    def differential_length(self, degree: int) -> int:
        """
        log₂ of the order of the image of d_r out of the given degree.
        """
        piece = self.pieces[degree]
        if degree + 1 >= len(self.pieces) or not piece.differential:
            return 0
        target = self.pieces[degree + 1]
        if not target.orders:
            return 0
        with_image = subgroup_order(
            target.orders, list(piece.differential) + list(target.boundaries)
        )
        base = subgroup_order(target.orders, list(target.boundaries))
        return (with_image // base).bit_length() - 1

    def is_zero_differential(self) -> bool:
        return all(self.differential_length(k) == 0 for k in range(len(self.pieces)))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "lengths": [piece.length for piece in self.pieces],
            "differential_lengths": [
                self.differential_length(k) for k in range(len(self.pieces))
            ],
        }


def _unit(size: int, index: int) -> Coords:
    return tuple(int(i == index) for i in range(size))


@functools.lru_cache(maxsize=256)
def cycles(complex_: SimplicialComplex, n: int, degree: int, s: int) -> tuple[Coords, ...]:
    group = cohomology(complex_, Zmod(2**n), degree)
    if s == 0:
        return tuple(_unit(group.rank, i) for i in range(group.rank))
    integral = cohomology(complex_, ZZ, degree + 1)
    power = 2 ** (n * s)
    images = [
        connecting(SesSpec("B", n), g).coords for g in group.generator_classes()
    ]
    targets = [power if o == 0 else math.gcd(o, power) for o in integral.orders]
    return tuple(kernel_of_map(group.orders, images, targets))


@functools.lru_cache(maxsize=256)
def boundaries(
    complex_: SimplicialComplex, n: int, degree: int, s: int
) -> tuple[Coords, ...]:
    if s == 0:
        return ()
    integral = cohomology(complex_, ZZ, degree)
    power = 2 ** (n * s)
    result = []
    for index, order in enumerate(integral.orders):
        if order == 0:
            continue
        element = integral.element(
            [order // math.gcd(order, power) * c for c in _unit(integral.rank, index)]
        )
        image = change_coeffs(element, Zmod(2**n)).coords
        if any(image):
            result.append(image)
    return tuple(result)


def _divide_class(y: CohomologyClass, power: int) -> CohomologyClass:
    # Some z with power·z = y, free parameters zero.
    coords = []
    for c, order in zip(y.coords, y.group.orders):
        if order == 0:
            if c % power:
                raise InconsistencyError(f"{c} is not divisible by {power} in ℤ")
            coords.append(c // power)
        else:
            try:
                coords.append(solve_mod(IntMatrix(1, 1, {(0, 0): power}), [c], order)[0])
            except NoSolution as exc:
                raise InconsistencyError(
                    f"{c} is not divisible by {power} in ℤ/{order}"
                ) from exc
    return y.group.element(coords)


def integral_differential(
    complex_: SimplicialComplex, n: int, r: int, degree: int, coords: Coords
) -> CohomologyClass:
    """
    The integral class y with 2^{n(r−1)}·y = β̃x for x ∈ Z_{r−1}, checked on
    cochains: δ(a − 2ⁿc) = 2^{nr}·rep(y) for the lift a of x.
    """
    modulus = 2**n
    x = cohomology(complex_, Zmod(modulus), degree).element(coords)
    a = integral_rep(x)
    bockstein = coboundary(a).divide(modulus)
    integral = cohomology(complex_, ZZ, degree + 1)
    power = 2 ** (n * (r - 1))
    y = _divide_class(integral.class_of(bockstein), power)
    if degree + 1 > complex_.dimension:
        return y
    correction = coboundary_preimage(complex_, ZZ, bockstein - power * y.rep)
    if coboundary(a - modulus * correction) != (modulus * power) * y.rep:
        raise InconsistencyError(
            f"d_{r} lift in degree {degree} of {complex_.name} failed to verify"
        )
    return y


def differential(
    complex_: SimplicialComplex, n: int, r: int, degree: int, coords: Coords
) -> Coords:
    y = integral_differential(complex_, n, r, degree, coords)
    return change_coeffs(y, Zmod(2**n)).coords


def bss_page(complex_: SimplicialComplex, n: int, r: int) -> BssPage:
    if r < 1:
        raise ValueError(f"Page number must be at least 1, got {r}")
    modulus = 2**n
    pieces = []
    for degree in range(complex_.dimension + 1):
        group = cohomology(complex_, Zmod(modulus), degree)
        z = cycles(complex_, n, degree, r - 1)
        b = boundaries(complex_, n, degree, r - 1)
        if group.rank:
            order = subgroup_order(group.orders, list(z) + list(b)) // subgroup_order(
                group.orders, list(b)
            )
        else:
            order = 1
        images = tuple(differential(complex_, n, r, degree, c) for c in z)
        pieces.append(BssPiece(degree, group.orders, z, b, images, order))
    page = BssPage(n, r, tuple(pieces))
    logger.info(
        "BSS page %d (n=%d) of %s: lengths %s",
        r,
        n,
        complex_.name,
        [piece.length for piece in pieces],
    )
    return page


def bss_pages(
    complex_: SimplicialComplex, n: int, max_page: int
) -> list[BssPage]:
    """
    Pages 1..max_page, stopping early once a page and all later ones have zero
    differentials (E_∞ reached).
    """
    pages = []
    for r in range(1, max_page + 1):
        page = bss_page(complex_, n, r)
        pages.append(page)
        if page.is_zero_differential() and _stable_from(complex_, n, r):
            break
    return pages


def _stable_from(complex_: SimplicialComplex, n: int, r: int) -> bool:
    # Once 2^{nr} exceeds every torsion order, no later differential can be nonzero.
    torsion = [
        o
        for k in range(complex_.dimension + 2)
        for o in cohomology(complex_, ZZ, k).torsion_orders
    ]
    return all(o <= 2 ** (n * r) for o in torsion)
