import dataclasses
import math
from typing import Sequence

from .cochains import Cochain, coboundary, cup_i
from .cohomology import (
    CohomologyClass,
    InconsistencyError,
    SesSpec,
    UnsupportedCoefficientsError,
    cohomology,
    coboundary_preimage,
    connecting,
    integral_rep,
)
from .linalg import in_subgroup
from .rings import Zmod


class NotInKernelError(ValueError):
    pass


def _target(x: CohomologyClass, i: int):
    return cohomology(x.complex, x.ring, x.degree + i)


def sq(i: int, x: CohomologyClass) -> CohomologyClass:
    """
    Sqⁱ[u] = [u ⌣_{r−i} u] for a mod 2 class of degree r.
    """
    if x.ring != Zmod(2):
        raise UnsupportedCoefficientsError(f"Sq needs Z/2 coefficients, not {x.ring}")
    target = _target(x, i)
    if i < 0 or i > x.degree or target.is_trivial():
        return target.zero()
    return target.class_of(cup_i(x.rep, x.rep, x.degree - i))


def total_sq(x: CohomologyClass) -> tuple[CohomologyClass, ...]:
    return tuple(sq(i, x) for i in range(x.degree + 1))


def gen_sq(i: int, x: CohomologyClass) -> CohomologyClass:
    """
    The mod 2ⁿ square: 2ⁿ⁻¹·(u ⌣_{r−i} u) for even i, u ⌣_{r−i} u for odd i.
    """
    modulus = 2**x.ring.two_exponent
    target = _target(x, i)
    if i < 0 or i > x.degree or target.is_trivial():
        return target.zero()
    w = cup_i(x.rep, x.rep, x.degree - i)
    if i % 2 == 0:
        w = (modulus // 2) * w
    return target.class_of(w)


def adem_terms(a: int, b: int) -> list[tuple[int, int]]:
    """
    Pairs (a+b−j, j) with odd binomial coefficient in SqᵃSqᵇ for 0 < a < 2b.
    """
    if not 0 < a < 2 * b:
        raise ValueError(f"Adem relation needs 0 < a < 2b, got a={a}, b={b}")
    terms = []
    for j in range(a // 2 + 1):
        top = b - 1 - j
        if top >= 0 and 0 <= a - 2 * j <= top and math.comb(top, a - 2 * j) % 2:
            terms.append((a + b - j, j))
    return terms


def compose(operations: Sequence[int], x: CohomologyClass) -> CohomologyClass:
    """
    Apply Sq^{ops[0]} Sq^{ops[1]} ... right to left.
    """
    for i in reversed(operations):
        x = sq(i, x)
    return x


@dataclasses.dataclass(frozen=True, eq=False)
class Coset:
    """
    `representative + ⟨indeterminacy⟩` inside one cohomology group.
    """

    representative: CohomologyClass
    indeterminacy: tuple[CohomologyClass, ...]

    def contains(self, y: CohomologyClass) -> bool:
        group = self.representative.group
        difference = y - self.representative
        return in_subgroup(
            group.orders, [z.coords for z in self.indeterminacy], difference.coords
        )

    def is_zero(self) -> bool:
        return self.contains(self.representative.group.zero())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Coset):
            return NotImplemented
        return self.contains(other.representative) and other.contains(
            self.representative
        )

    __hash__ = None  # type: ignore[assignment]


def _beta2_value(a: Cochain, n: int) -> CohomologyClass:
    modulus = 2**n
    ring = Zmod(modulus)
    complex_ = a.complex
    da = coboundary(a)
    try:
        c = da.divide(modulus).change_ring(ring)
        b = coboundary_preimage(complex_, ring, c).lift()
        value = (da - modulus * coboundary(b)).divide(modulus * modulus)
    except ArithmeticError as exc:
        raise InconsistencyError(str(exc)) from exc
    return cohomology(complex_, ring, a.degree + 1).class_of(value.change_ring(ring))


def beta2(x: CohomologyClass, n: int | None = None) -> Coset:
    """
    Secondary Bockstein on ker β, valued modulo im β.
    """
    exponent = x.ring.two_exponent
    if n is not None and n != exponent:
        raise ValueError(f"Class over {x.ring} does not match n={n}")
    sequence = SesSpec("A", exponent)
    if not connecting(sequence, x).is_zero():
        raise NotInKernelError(f"Class {x.coords} in degree {x.degree} has β ≠ 0")

    modulus = 2**exponent
    complex_ = x.complex
    indeterminacy = tuple(
        connecting(sequence, g)
        for g in cohomology(complex_, x.ring, x.degree).generator_classes()
    )
    a = integral_rep(x)
    first = Coset(_beta2_value(a, exponent), indeterminacy)

    # A second lift: shift one value by 2ⁿ and add an integral coboundary.
    if complex_.simplices(x.degree):
        perturbed = a + modulus * Cochain.indicator(complex_, x.degree, 0, a.ring)
        if x.degree >= 1:
            perturbed = perturbed + coboundary(
                Cochain.indicator(complex_, x.degree - 1, 0, a.ring)
            )
        second = _beta2_value(perturbed, exponent)
        if not first.contains(second):
            raise InconsistencyError(
                f"β₂ depends on the lift in degree {x.degree} of {complex_.name}"
            )
    return first
