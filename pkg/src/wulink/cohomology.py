import dataclasses
import functools
import math
from typing import Iterator, Sequence

from .cochains import Cochain, RingMismatchError, coboundary, cup
from .complex import SimplicialComplex, coboundary_matrices
from .linalg import IntMatrix, NoSolution, smith_normal_form, solve_mod
from .logger import debug_logger, logger
from .reduction import ReducedComplex, reduce_cochain_complex
from .rings import ZZ, Ring, Zmod


class NotACocycleError(ValueError):
    pass


class UnsupportedCoefficientsError(ValueError):
    pass


class InconsistencyError(AssertionError):
    pass


@functools.lru_cache(maxsize=8)
def reduced_complex(complex_: SimplicialComplex) -> ReducedComplex:
    cochains = coboundary_matrices(complex_, ZZ)
    reduced = reduce_cochain_complex(
        [len(layer) for layer in cochains.basis], cochains.delta
    )
    logger.info(
        "Reduced %s from %s to %s cells",
        complex_.name,
        complex_.f_vector,
        tuple(len(layer) for layer in reduced.cells),
    )
    return reduced


@dataclasses.dataclass(frozen=True, eq=False)
class _Presentation:
    # SNF of the outgoing reduced coboundary, δ′ₖ = U·D·V.
    V: IntMatrix
    V_inv: IntMatrix
    # (position in SNF coordinates, divisor m/gᵢ, slot order gᵢ) per slot.
    slots: tuple[tuple[int, int, int], ...]
    # SNF of [M | diag(g)] = P·E·Q.
    P: IntMatrix
    P_inv: IntMatrix
    # Summand j is row `summands[j]` of P⁻¹, of order `orders[j]` (0 for ℤ).
    summands: tuple[int, ...]


@dataclasses.dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """
    Hᵏ(K; ring) as ℤ^free_rank ⊕ ⊕ ℤ/tⱼ, free summands first, torsion increasing.
    """

    complex: SimplicialComplex = dataclasses.field(repr=False)
    degree: int
    ring: Ring
    free_rank: int
    torsion_orders: tuple[int, ...]
    generators: tuple[Cochain, ...] = dataclasses.field(repr=False)
    _presentation: _Presentation | None = dataclasses.field(repr=False, default=None)

    @property
    def orders(self) -> tuple[int, ...]:
        return (0,) * self.free_rank + self.torsion_orders

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        return math.prod(self.torsion_orders)

    def is_trivial(self) -> bool:
        return not self.generators

    def normalize(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.rank:
            raise ValueError(f"Expected {self.rank} coordinates, got {len(coords)}")
        return tuple(c % o if o else c for c, o in zip(coords, self.orders))

    def express(self, z: Cochain) -> tuple[int, ...]:
        if z.ring != self.ring or z.degree != self.degree:
            raise RingMismatchError(
                f"Degree {z.degree} cochain over {z.ring} against H^{self.degree}(-; {self.ring})"
            )
        if not coboundary(z).is_zero():
            raise NotACocycleError(
                f"Degree {z.degree} cochain over {z.ring} is not a cocycle"
            )
        if self._presentation is None:
            return ()
        presentation = self._presentation
        modulus = self.ring.modulus
        reduced = reduced_complex(self.complex)
        y = presentation.V.apply(reduced.project(self.degree, z.values))
        c = []
        for position, divisor, _ in presentation.slots:
            value = y[position] % modulus if modulus else y[position]
            if value % divisor:
                raise InconsistencyError(
                    f"Cocycle coordinate {value} not divisible by {divisor}"
                )
            c.append(value // divisor)
        w = presentation.P_inv.apply(c)
        return self.normalize([w[row] for row in presentation.summands])

    def element(self, coords: Sequence[int]) -> "CohomologyClass":
        coords = self.normalize(coords)
        rep = Cochain.zero(self.complex, self.degree, self.ring)
        for c, generator in zip(coords, self.generators):
            if c:
                rep = rep + c * generator
        return CohomologyClass(self, coords, rep)

    def class_of(self, z: Cochain) -> "CohomologyClass":
        return CohomologyClass(self, self.express(z), z)

    def zero(self) -> "CohomologyClass":
        return CohomologyClass(
            self, (0,) * self.rank, Cochain.zero(self.complex, self.degree, self.ring)
        )

    def generator_classes(self) -> tuple["CohomologyClass", ...]:
        return tuple(
            CohomologyClass(self, tuple(int(i == j) for j in range(self.rank)), g)
            for i, g in enumerate(self.generators)
        )

    def elements(self) -> Iterator["CohomologyClass"]:
        if self.free_rank:
            raise ValueError(f"H^{self.degree}(-; {self.ring}) is infinite")
        coords = [0] * self.rank
        while True:
            yield self.element(coords)
            for i in range(self.rank):
                coords[i] += 1
                if coords[i] < self.torsion_orders[i]:
                    break
                coords[i] = 0
            else:
                return

    def label(self, index: int) -> str:
        if self.rank == 1:
            return f"g{self.degree}"
        return f"g{self.degree}_{index}"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "ring": str(self.ring),
            "free_rank": self.free_rank,
            "torsion_orders": list(self.torsion_orders),
        }


@dataclasses.dataclass(frozen=True, eq=False)
class CohomologyClass:
    group: CohomologyGroup = dataclasses.field(repr=False)
    coords: tuple[int, ...]
    rep: Cochain = dataclasses.field(repr=False)

    @property
    def degree(self) -> int:
        return self.group.degree

    @property
    def ring(self) -> Ring:
        return self.group.ring

    @property
    def complex(self) -> SimplicialComplex:
        return self.group.complex

    def _check(self, other: "CohomologyClass") -> None:
        if (
            other.degree != self.degree
            or other.ring != self.ring
            or other.complex is not self.complex
            and other.complex != self.complex
        ):
            raise RingMismatchError(
                f"Classes in H^{self.degree}(-; {self.ring}) and H^{other.degree}(-; {other.ring})"
            )

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        self._check(other)
        coords = self.group.normalize([a + b for a, b in zip(self.coords, other.coords)])
        return CohomologyClass(self.group, coords, self.rep + other.rep)

    def __neg__(self) -> "CohomologyClass":
        return CohomologyClass(
            self.group, self.group.normalize([-c for c in self.coords]), -self.rep
        )

    def __sub__(self, other: "CohomologyClass") -> "CohomologyClass":
        return self + (-other)

    def __mul__(self, scalar: int) -> "CohomologyClass":
        return CohomologyClass(
            self.group,
            self.group.normalize([scalar * c for c in self.coords]),
            scalar * self.rep,
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.ring == other.ring
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.ring, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        """
        Additive order, 0 for elements of infinite order.
        """
        result = 1
        for c, o in zip(self.coords, self.group.orders):
            if not c:
                continue
            if not o:
                return 0
            result = math.lcm(result, o // math.gcd(c, o))
        return result


def _zero_group(complex_: SimplicialComplex, ring: Ring, k: int) -> CohomologyGroup:
    return CohomologyGroup(complex_, k, ring, 0, (), ())


@functools.lru_cache(maxsize=256)
def cohomology(complex_: SimplicialComplex, ring: Ring, k: int) -> CohomologyGroup:
    if k < 0 or k > complex_.dimension:
        return _zero_group(complex_, ring, k)
    modulus = ring.modulus
    reduced = reduced_complex(complex_)
    size = len(reduced.cells[k])
    if k < len(reduced.delta):
        outgoing = reduced.delta[k]
    else:
        outgoing = IntMatrix(0, size)
    if k >= 1:
        incoming = reduced.delta[k - 1]
    else:
        incoming = IntMatrix(size, 0)

    snf = smith_normal_form(outgoing)
    diagonal = snf.diagonal
    slots = []
    for i in range(size):
        d = diagonal[i] if i < len(diagonal) else 0
        if modulus:
            g = math.gcd(d, modulus)
            if g == 1:
                continue
            slots.append((i, modulus // g, g))
        elif d == 0:
            slots.append((i, 1, 0))
    if not slots:
        return _zero_group(complex_, ring, k)

    image = (snf.V @ incoming).to_rows()
    rows = []
    for position, divisor, _ in slots:
        row = image[position]
        if any(value % divisor for value in row):
            raise InconsistencyError(f"Coboundary row {position} not divisible by {divisor}")
        rows.append([value // divisor for value in row])
    if modulus:
        quotient = IntMatrix.diagonal_matrix(
            [g for _, _, g in slots], len(slots), len(slots)
        )
    else:
        quotient = IntMatrix(len(slots), 0)
    relations = IntMatrix.from_rows(rows, incoming.cols).hstack(quotient)
    second = smith_normal_form(relations)
    invariants = [
        second.diagonal[j] if j < len(second.diagonal) else 0 for j in range(len(slots))
    ]
    free = [j for j, e in enumerate(invariants) if e == 0]
    torsion = sorted(
        (j for j, e in enumerate(invariants) if e > 1), key=lambda j: (invariants[j], j)
    )
    summands = tuple(free + torsion)

    generators = []
    for j in summands:
        y = [0] * size
        for s, (position, divisor, _) in enumerate(slots):
            y[position] = second.U.get(s, j) * divisor
        x = snf.V_inv.apply(y)
        generators.append(Cochain(complex_, k, ring, reduced.lift(k, x)))

    group = CohomologyGroup(
        complex_,
        k,
        ring,
        len(free),
        tuple(invariants[j] for j in torsion),
        tuple(generators),
        _Presentation(snf.V, snf.V_inv, tuple(slots), second.U, second.U_inv, summands),
    )
    debug_logger.debug(
        "H^%d(%s; %s) = free %d, torsion %s",
        k,
        complex_.name,
        ring,
        group.free_rank,
        group.torsion_orders,
    )
    return group


@dataclasses.dataclass(frozen=True)
class SesSpec:
    """
    A coefficient sequence 0 → sub →(·factor) middle → quotient → 0.

    A: ℤ/2ⁿ → ℤ/2²ⁿ → ℤ/2ⁿ, B: ℤ → ℤ → ℤ/2ⁿ, C: ℤ/2ⁿ → ℤ/2ⁿ⁺¹ → ℤ/2,
    D: ℤ/2 → ℤ/4 → ℤ/2.
    """

    tag: str
    n: int = 1

    def __post_init__(self) -> None:
        if self.tag not in ("A", "B", "C", "D"):
            raise ValueError(f"Unknown coefficient sequence {self.tag!r}")
        if self.n < 1:
            raise ValueError(f"Sequence exponent must be positive, got {self.n}")

    @property
    def sub(self) -> Ring:
        return {
            "A": Zmod(2**self.n),
            "B": ZZ,
            "C": Zmod(2**self.n),
            "D": Zmod(2),
        }[self.tag]

    @property
    def middle(self) -> Ring:
        return {
            "A": Zmod(2 ** (2 * self.n)),
            "B": ZZ,
            "C": Zmod(2 ** (self.n + 1)),
            "D": Zmod(4),
        }[self.tag]

    @property
    def quotient(self) -> Ring:
        return {
            "A": Zmod(2**self.n),
            "B": Zmod(2**self.n),
            "C": Zmod(2),
            "D": Zmod(2),
        }[self.tag]

    @property
    def factor(self) -> int:
        return 2 if self.tag in ("C", "D") else 2**self.n


def integral_rep(x: CohomologyClass) -> Cochain:
    """
    Coefficientwise lift of the representative into 0..m−1.
    """
    return x.rep.lift()


def connecting(sequence: SesSpec, x: CohomologyClass) -> CohomologyClass:
    if x.ring != sequence.quotient:
        raise UnsupportedCoefficientsError(
            f"Sequence {sequence.tag} needs a class over {sequence.quotient}, not {x.ring}"
        )
    lifted = coboundary(integral_rep(x))
    try:
        image = lifted.divide(sequence.factor)
    except ArithmeticError as exc:
        raise InconsistencyError(str(exc)) from exc
    target = cohomology(x.complex, sequence.sub, x.degree + 1)
    return target.class_of(image.change_ring(sequence.sub))


def change_coeffs(x: CohomologyClass, target: Ring) -> CohomologyClass:
    source = x.ring.modulus
    modulus = target.modulus
    if source == modulus:
        return x
    if modulus and (source == 0 or source % modulus == 0):
        rep = x.rep.change_ring(target)
    elif source == 2 and modulus and modulus % 2 == 0:
        rep = (modulus // 2) * x.rep.change_ring(target)
    else:
        raise UnsupportedCoefficientsError(f"No coefficient map {x.ring} -> {target}")
    return cohomology(x.complex, target, x.degree).class_of(rep)


def coboundary_preimage(
    complex_: SimplicialComplex, ring: Ring, c: Cochain
) -> Cochain:
    """
    A cochain y with δy = c over `ring`; raises NoSolution when c is not a coboundary.
    """
    if c.ring != ring:
        raise RingMismatchError(f"Cochain over {c.ring} against {ring}")
    k = c.degree
    if k < 1 and not c.is_zero():
        raise NoSolution(f"Nonzero degree {k} cochains are never coboundaries")
    if k < 1 or k > complex_.dimension:
        return Cochain.zero(complex_, k - 1, ring)
    reduced = reduced_complex(complex_)
    small = reduced.project(k, c.values)
    solution = solve_mod(reduced.delta[k - 1], small, ring.modulus)
    values = reduced.lift(k - 1, solution)
    for cell, value in reduced.homotopy(k, c.values).items():
        values[cell] = values.get(cell, 0) + value
    y = Cochain(complex_, k - 1, ring, values)
    if coboundary(y) != c:
        raise InconsistencyError(f"Coboundary preimage in degree {k} failed to verify")
    return y


def cup_classes(x: CohomologyClass, y: CohomologyClass) -> CohomologyClass:
    product = cup(x.rep, y.rep)
    return cohomology(x.complex, x.ring, x.degree + y.degree).class_of(product)
