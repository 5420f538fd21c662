import dataclasses
import functools
import random
from typing import Mapping, Sequence

from .complex import SimplicialComplex
from .rings import ZZ, Ring


class RingMismatchError(ValueError):
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class Cochain:
    """
    Values are keyed by simplex index in `complex.simplices(degree)` and kept
    reduced over the ring, without zeros.
    """

    complex: SimplicialComplex = dataclasses.field(repr=False)
    degree: int
    ring: Ring
    values: Mapping[int, int] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        size = len(self.complex.simplices(self.degree))
        values = {}
        for index, value in self.values.items():
            if not 0 <= index < size:
                raise IndexError(
                    f"Simplex index {index} outside degree {self.degree} of {self.complex.name}"
                )
            value = self.ring.reduce(value)
            if value:
                values[index] = value
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls, complex_: SimplicialComplex, degree: int, ring: Ring) -> "Cochain":
        return cls(complex_, degree, ring)

    @classmethod
    def indicator(
        cls, complex_: SimplicialComplex, degree: int, index: int, ring: Ring
    ) -> "Cochain":
        return cls(complex_, degree, ring, {index: 1})

    @classmethod
    def constant(cls, complex_: SimplicialComplex, degree: int, ring: Ring, value: int = 1) -> "Cochain":
        count = len(complex_.simplices(degree))
        return cls(complex_, degree, ring, dict.fromkeys(range(count), value))

    @classmethod
    def random(
        cls,
        complex_: SimplicialComplex,
        degree: int,
        ring: Ring,
        rng: random.Random,
        support: int | None = None,
    ) -> "Cochain":
        """
        Random values on `support` random simplices (all of them when None).
        Integral values are drawn from [−9, 9].
        """
        count = len(complex_.simplices(degree))
        indices = range(count)
        if support is not None and support < count:
            indices = sorted(rng.sample(range(count), support))
        if ring.modulus:
            draw = lambda: rng.randrange(ring.modulus)
        else:
            draw = lambda: rng.randint(-9, 9)
        return cls(complex_, degree, ring, {i: draw() for i in indices})

    def _check(self, other: "Cochain") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"Cochains over {self.ring} and {other.ring}")
        if self.complex is not other.complex and self.complex != other.complex:
            raise RingMismatchError(
                f"Cochains on {self.complex.name} and {other.complex.name}"
            )

    def _same_degree(self, other: "Cochain") -> None:
        self._check(other)
        if self.degree != other.degree:
            raise RingMismatchError(
                f"Cochains of degree {self.degree} and {other.degree}"
            )

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same_degree(other)
        values = dict(self.values)
        for index, value in other.values.items():
            values[index] = values.get(index, 0) + value
        return Cochain(self.complex, self.degree, self.ring, values)

    def __neg__(self) -> "Cochain":
        return Cochain(
            self.complex, self.degree, self.ring, {i: -v for i, v in self.values.items()}
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, scalar: int) -> "Cochain":
        return Cochain(
            self.complex,
            self.degree,
            self.ring,
            {i: scalar * v for i, v in self.values.items()},
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.ring == other.ring
            and (self.complex is other.complex or self.complex == other.complex)
            and self.values == other.values
        )

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.values

    def __call__(self, simplex: Sequence[int]) -> int:
        index = self.complex.index(self.degree).get(tuple(simplex))
        if index is None:
            raise KeyError(f"{tuple(simplex)} is not a {self.degree}-simplex")
        return self.values.get(index, 0)

    def change_ring(self, ring: Ring) -> "Cochain":
        """
        Reinterpret the canonical values over another ring: lifting to ℤ keeps
        representatives in 0..m−1, reducing takes them mod the new modulus.
        """
        return Cochain(self.complex, self.degree, ring, self.values)

    def lift(self) -> "Cochain":
        return self.change_ring(ZZ)

    def divide(self, factor: int) -> "Cochain":
        """
        Exact division of an integral cochain.
        """
        if not self.ring.is_integral:
            raise RingMismatchError(f"Exact division needs integral values, not {self.ring}")
        for index, value in self.values.items():
            if value % factor:
                raise ArithmeticError(
                    f"Value {value} at simplex {index} is not divisible by {factor}"
                )
        return Cochain(
            self.complex,
            self.degree,
            self.ring,
            {i: v // factor for i, v in self.values.items()},
        )


def coboundary(u: Cochain) -> Cochain:
    """
    (δu)(τ) = Σⱼ (−1)ʲ u(∂ⱼτ).
    """
    values: dict[int, int] = {}
    cofaces = u.complex.cofaces(u.degree)
    for index, value in u.values.items():
        for row, sign in cofaces[index]:
            values[row] = values.get(row, 0) + sign * value
    return Cochain(u.complex, u.degree + 1, u.ring, values)


def _accumulate(chain: dict, key: tuple, value: int) -> None:
    total = chain.get(key, 0) + value
    if total:
        chain[key] = total
    else:
        chain.pop(key, None)


def _cone(chain: Mapping[tuple, int]) -> dict:
    # Contraction of the standard simplex towards vertex 0, extended to tensors.
    result: dict = {}
    for (front, back), value in chain.items():
        if front[0] != 0:
            _accumulate(result, ((0,) + front, back), value)
        if len(front) == 1 and back[0] != 0:
            _accumulate(result, ((0,), (0,) + back), value)
    return result


@functools.lru_cache(maxsize=128)
def _diagonal(n: int, i: int) -> Mapping[tuple[tuple[int, ...], tuple[int, ...]], int]:
    if i == 0:
        return {
            (tuple(range(k + 1)), tuple(range(k, n + 1))): 1 for k in range(n + 1)
        }
    if n == 0:
        return {}
    sign = -1 if i % 2 else 1
    total: dict = {}
    for k in range(n + 1):
        face = [p if p < k else p + 1 for p in range(n)]
        for (front, back), value in _diagonal(n - 1, i).items():
            _accumulate(
                total,
                (tuple(face[p] for p in front), tuple(face[p] for p in back)),
                sign * (-1) ** k * value,
            )
    for (front, back), value in _diagonal(n, i - 1).items():
        _accumulate(total, (front, back), value)
        twist = (-1) ** ((len(front) - 1) * (len(back) - 1))
        _accumulate(total, (back, front), sign * twist * value)
    return _cone(total)


@functools.lru_cache(maxsize=128)
def coproduct(n: int, i: int) -> tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]:
    """
    The cup-i coproduct of the standard n-simplex as (coefficient, front, back)
    vertex-position terms, sorted.

    Built recursively by coning off the cycle that the coboundary formula
    prescribes, which makes the formula hold by construction.
    """
    return tuple(
        sorted((value, front, back) for (front, back), value in _diagonal(n, i).items())
    )


def cup_i(u: Cochain, v: Cochain, i: int) -> Cochain:
    if i < 0:
        raise ValueError(f"cup-i needs i >= 0, got {i}")
    u._check(v)
    complex_ = u.complex
    degree = u.degree + v.degree - i
    if degree < 0 or degree > complex_.dimension or u.is_zero() or v.is_zero():
        return Cochain.zero(complex_, degree, u.ring)

    terms = [
        (value, front, back)
        for value, front, back in coproduct(degree, i)
        if len(front) == u.degree + 1 and len(back) == v.degree + 1
    ]
    front_index = complex_.index(u.degree)
    back_index = complex_.index(v.degree)
    u_values, v_values = u.values, v.values
    values = {}
    for position, simplex in enumerate(complex_.simplices(degree)):
        total = 0
        for value, front, back in terms:
            a = u_values.get(front_index[tuple(simplex[p] for p in front)])
            if not a:
                continue
            b = v_values.get(back_index[tuple(simplex[p] for p in back)])
            if b:
                total += value * a * b
        if total:
            values[position] = total
    return Cochain(complex_, degree, u.ring, values)


def cup(u: Cochain, v: Cochain) -> Cochain:
    """
    Alexander–Whitney: (u⌣v)(σ) = u(front face) · v(back face).
    """
    u._check(v)
    complex_ = u.complex
    r, s = u.degree, v.degree
    degree = r + s
    if degree > complex_.dimension or u.is_zero() or v.is_zero():
        return Cochain.zero(complex_, degree, u.ring)
    front_index = complex_.index(r)
    back_index = complex_.index(s)
    values = {}
    for position, simplex in enumerate(complex_.simplices(degree)):
        a = u.values.get(front_index[simplex[: r + 1]])
        if a:
            b = v.values.get(back_index[simplex[r:]])
            if b:
                values[position] = a * b
    return Cochain(complex_, degree, u.ring, values)


def _permutation_sign(values: Sequence[int]) -> int:
    sign = 1
    items = list(values)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def pullback(u: Cochain, vertex_map: Sequence[int], source: SimplicialComplex) -> Cochain:
    """
    Pull `u` back along a simplicial map given on vertices of `source`.
    """
    index = u.complex.index(u.degree)
    values = {}
    for position, simplex in enumerate(source.simplices(u.degree)):
        image = [vertex_map[v] for v in simplex]
        if len(set(image)) != len(image):
            continue
        value = u.values.get(index[tuple(sorted(image))])
        if value:
            values[position] = _permutation_sign(image) * value
    return Cochain(source, u.degree, u.ring, values)


def suspend(u: Cochain, target: SimplicialComplex) -> Cochain:
    """
    Cochain-level suspension Cⁱ(K) → Cⁱ⁺¹(ΣK): s(u)(σ ∪ {north}) = u(σ).
    """
    north = u.complex.vertex_count
    index = target.index(u.degree + 1)
    values = {}
    for position, simplex in enumerate(u.complex.simplices(u.degree)):
        value = u.values.get(position)
        if value:
            values[index[simplex + (north,)]] = value
    return Cochain(target, u.degree + 1, u.ring, values)
