"""
Exact linear algebra over ℤ and ℤ/m.

Everything over ℤ/m is done by lifting to ℤ and reading the answer off an
integer Smith normal form.
"""

import dataclasses
import functools
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .logger import debug_logger

# Above this density the GF(2) rank switches to numpy bit-packed rows.
DENSE_THRESHOLD = 0.05


class DimensionError(ValueError):
    pass


class NoSolution(ArithmeticError):
    pass


@dataclasses.dataclass(frozen=True)
class IntMatrix:
    """
    Sparse integer matrix. Zero entries are never stored.
    """

    rows: int
    cols: int
    entries: Mapping[tuple[int, int], int] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"Negative shape {self.rows}x{self.cols}")
        entries = {}
        for (row, col), value in self.entries.items():
            if not (0 <= row < self.rows and 0 <= col < self.cols):
                raise DimensionError(
                    f"Entry ({row}, {col}) outside a {self.rows}x{self.cols} matrix"
                )
            if value:
                entries[(row, col)] = value
        object.__setattr__(self, "entries", entries)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError(f"Row {r} has {len(row)} entries, expected {cols}")
            for c, value in enumerate(row):
                if value:
                    entries[(r, c)] = value
        return cls(len(rows), cols, entries)

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[int]], rows: int
    ) -> "IntMatrix":
        entries = {}
        for c, column in enumerate(columns):
            if len(column) != rows:
                raise DimensionError(
                    f"Column {c} has {len(column)} entries, expected {rows}"
                )
            for r, value in enumerate(column):
                if value:
                    entries[(r, c)] = value
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        return cls(size, size, {(i, i): 1 for i in range(size)})

    @classmethod
    def diagonal_matrix(cls, values: Sequence[int], rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, {(i, i): v for i, v in enumerate(values) if v})

    def get(self, row: int, col: int) -> int:
        return self.entries.get((row, col), 0)

    def to_rows(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), value in self.entries.items():
            dense[r][c] = value
        return dense

    def column(self, col: int) -> list[int]:
        values = [0] * self.rows
        for (r, c), value in self.entries.items():
            if c == col:
                values[r] = value
        return values

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def reduce(self, modulus: int) -> "IntMatrix":
        if not modulus:
            return self
        return IntMatrix(
            self.rows,
            self.cols,
            {key: value % modulus for key, value in self.entries.items()},
        )

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionError(f"Cannot stack {self.rows} rows with {other.rows}")
        entries = dict(self.entries)
        for (r, c), value in other.entries.items():
            entries[(r, self.cols + c)] = value
        return IntMatrix(self.rows, self.cols + other.cols, entries)

    def apply(self, vector: Sequence[int]) -> list[int]:
        if len(vector) != self.cols:
            raise DimensionError(
                f"Vector of length {len(vector)} against {self.cols} columns"
            )
        result = [0] * self.rows
        for (r, c), value in self.entries.items():
            x = vector[c]
            if x:
                result[r] += value * x
        return result

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(
                f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (r, c), value in other.entries.items():
            by_row.setdefault(r, []).append((c, value))
        entries: dict[tuple[int, int], int] = {}
        for (r, k), left in self.entries.items():
            for c, right in by_row.get(k, ()):
                entries[(r, c)] = entries.get((r, c), 0) + left * right
        return IntMatrix(self.rows, other.cols, entries)


@dataclasses.dataclass(frozen=True, eq=False)
class SnfResult:
    """
    `A = U·D·V` with `U`, `V` unimodular and `d₁ | d₂ | ...` on the diagonal of `D`.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @functools.cached_property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(
            self.D.get(i, i) for i in range(min(self.D.rows, self.D.cols))
        )

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(a: IntMatrix) -> SnfResult:
    m, n = a.rows, a.cols
    work = a.to_rows()
    left = [[int(i == j) for j in range(m)] for i in range(m)]
    left_inv = [[int(i == j) for j in range(m)] for i in range(m)]
    right = [[int(i == j) for j in range(n)] for i in range(n)]
    right_inv = [[int(i == j) for j in range(n)] for i in range(n)]

    # Invariant: work == left_inv · A · right_inv, left == left_inv⁻¹, right == right_inv⁻¹.
    def row_add(dst: int, src: int, q: int) -> None:
        work[dst] = [x + q * y for x, y in zip(work[dst], work[src])]
        left_inv[dst] = [x + q * y for x, y in zip(left_inv[dst], left_inv[src])]
        for row in left:
            row[src] -= q * row[dst]

    def row_swap(i: int, j: int) -> None:
        work[i], work[j] = work[j], work[i]
        left_inv[i], left_inv[j] = left_inv[j], left_inv[i]
        for row in left:
            row[i], row[j] = row[j], row[i]

    def row_negate(i: int) -> None:
        work[i] = [-x for x in work[i]]
        left_inv[i] = [-x for x in left_inv[i]]
        for row in left:
            row[i] = -row[i]

    def col_add(dst: int, src: int, q: int) -> None:
        for row in work:
            if row[src]:
                row[dst] += q * row[src]
        for row in right_inv:
            if row[src]:
                row[dst] += q * row[src]
        right[src] = [x - q * y for x, y in zip(right[src], right[dst])]

    def col_swap(i: int, j: int) -> None:
        for row in work:
            row[i], row[j] = row[j], row[i]
        for row in right_inv:
            row[i], row[j] = row[j], row[i]
        right[i], right[j] = right[j], right[i]

    t = 0
    while t < min(m, n):
        pivot = None
        for r in range(t, m):
            row = work[r]
            for c in range(t, n):
                value = row[c]
                if value and (pivot is None or abs(value) < pivot[0]):
                    pivot = (abs(value), r, c)
                    if pivot[0] == 1:
                        break
            if pivot is not None and pivot[0] == 1:
                break
        if pivot is None:
            break
        _, r, c = pivot
        if r != t:
            row_swap(t, r)
        if c != t:
            col_swap(t, c)

        while True:
            p = work[t][t]
            clean = True
            for i in range(t + 1, m):
                if work[i][t]:
                    row_add(i, t, -(work[i][t] // p))
                    if work[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if work[t][j]:
                    col_add(j, t, -(work[t][j] // p))
                    if work[t][j]:
                        clean = False
            if not clean:
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if work[i][t] and abs(work[i][t]) < best[0]:
                        best = (abs(work[i][t]), i, t)
                for j in range(t + 1, n):
                    if work[t][j] and abs(work[t][j]) < best[0]:
                        best = (abs(work[t][j]), t, j)
                if best[1] != t:
                    row_swap(t, best[1])
                if best[2] != t:
                    col_swap(t, best[2])
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, m)
                    if any(work[i][j] % p for j in range(t + 1, n))
                ),
                None,
            )
            if offender is None:
                break
            row_add(t, offender, 1)

        if work[t][t] < 0:
            row_negate(t)
        t += 1

    debug_logger.debug("SNF of %dx%d matrix, rank %d", m, n, t)
    return SnfResult(
        U=IntMatrix.from_rows(left, m),
        D=IntMatrix.from_rows(work, n),
        V=IntMatrix.from_rows(right, n),
        U_inv=IntMatrix.from_rows(left_inv, m),
        V_inv=IntMatrix.from_rows(right_inv, n),
    )


def solve_mod(a: IntMatrix, b: Sequence[int], modulus: int = 0) -> list[int]:
    """
    Solve `A·x ≡ b (mod modulus)`, or over ℤ when `modulus == 0`.

    Back-substitution through the SNF with every free parameter set to 0.
    """
    if len(b) != a.rows:
        raise DimensionError(f"Right-hand side of length {len(b)} against {a.rows} rows")
    snf = smith_normal_form(a)
    c = snf.U_inv.apply(b)
    diagonal = snf.diagonal
    y = [0] * a.cols
    for i, ci in enumerate(c):
        d = diagonal[i] if i < len(diagonal) else 0
        if modulus:
            ci %= modulus
            g = math.gcd(d, modulus)
            if ci % g:
                raise NoSolution(f"No solution modulo {modulus} in row {i}")
            if d % modulus == 0:
                continue
            reduced = modulus // g
            y[i] = (ci // g) * pow(d // g, -1, reduced) % reduced
        else:
            if d == 0:
                if ci:
                    raise NoSolution(f"No integral solution in row {i}")
                continue
            if ci % d:
                raise NoSolution(f"No integral solution in row {i}")
            y[i] = ci // d
    x = snf.V_inv.apply(y)
    if modulus:
        return [value % modulus for value in x]
    return x


def kernel_mod(a: IntMatrix, modulus: int = 0) -> IntMatrix:
    """
    Columns generating `{x : A·x ≡ 0}`, read off `V⁻¹` with the factors
    `m / gcd(dᵢ, m)` (or the columns past the rank over ℤ).
    """
    snf = smith_normal_form(a)
    diagonal = snf.diagonal
    columns = []
    for i in range(a.cols):
        d = diagonal[i] if i < len(diagonal) else 0
        if modulus:
            factor = modulus // math.gcd(d, modulus)
            if factor == modulus:
                continue
        else:
            if d:
                continue
            factor = 1
        column = [factor * value for value in snf.V_inv.column(i)]
        if modulus:
            column = [value % modulus for value in column]
        if any(column):
            columns.append(column)
    return IntMatrix.from_columns(columns, a.cols)


def rank_gf2(a: IntMatrix) -> int:
    if not a.rows or not a.cols:
        return 0
    odd = [key for key, value in a.entries.items() if value % 2]
    if len(odd) > DENSE_THRESHOLD * a.rows * a.cols:
        return _rank_gf2_dense(a.rows, a.cols, odd)
    return _rank_gf2_sparse(a.rows, odd)


def _rank_gf2_dense(rows: int, cols: int, odd: Iterable[tuple[int, int]]) -> int:
    words = (cols + 63) // 64
    bits = np.zeros((rows, words * 64), dtype=np.uint8)
    for r, c in odd:
        bits[r, c] = 1
    packed = np.packbits(bits, axis=1, bitorder="little").view(np.uint64)
    packed = np.ascontiguousarray(packed)

    # Columns are scanned in packed order; rank ignores column permutations.
    rank = 0
    for word in range(words):
        for bit in range(64):
            if rank == rows:
                return rank
            mask = np.uint64(1 << bit)
            hits = np.flatnonzero(packed[rank:, word] & mask)
            if hits.size == 0:
                continue
            pivot = rank + int(hits[0])
            if pivot != rank:
                packed[[rank, pivot]] = packed[[pivot, rank]]
            below = np.flatnonzero(packed[rank + 1 :, word] & mask) + rank + 1
            if below.size:
                packed[below] ^= packed[rank]
            rank += 1
    return rank


def _rank_gf2_sparse(rows: int, odd: Iterable[tuple[int, int]]) -> int:
    bitsets = [0] * rows
    for r, c in odd:
        bitsets[r] |= 1 << c

    pivots: dict[int, int] = {}
    for row in bitsets:
        while row:
            lead = row.bit_length() - 1
            other = pivots.get(lead)
            if other is None:
                pivots[lead] = row
                break
            row ^= other
    return len(pivots)


# Finite abelian groups ⊕ ℤ/oᵢ in coordinates; an order of 0 stands for ℤ.


def _relations(orders: Sequence[int]) -> list[list[int]]:
    size = len(orders)
    return [
        [order if j == i else 0 for j in range(size)]
        for i, order in enumerate(orders)
        if order
    ]


def subgroup_order(orders: Sequence[int], generators: Sequence[Sequence[int]]) -> int:
    """
    Order of the subgroup generated by `generators` inside the finite group ⊕ ℤ/oᵢ.
    """
    if any(order == 0 for order in orders):
        raise ValueError("subgroup_order needs a finite ambient group")
    if not orders:
        return 1
    matrix = IntMatrix.from_columns(
        [list(g) for g in generators] + _relations(orders), len(orders)
    )
    index = math.prod(smith_normal_form(matrix).diagonal)
    return math.prod(orders) // index


def subgroup_coefficients(
    orders: Sequence[int],
    generators: Sequence[Sequence[int]],
    element: Sequence[int],
) -> list[int]:
    """
    Integers λ with Σ λᵢ·generatorᵢ = element in ⊕ ℤ/oᵢ; raises NoSolution otherwise.
    """
    relations = _relations(orders)
    columns = [list(g) for g in generators] + relations
    if not columns:
        if any(element):
            raise NoSolution("Element outside the trivial subgroup")
        return []
    matrix = IntMatrix.from_columns(columns, len(orders))
    return solve_mod(matrix, list(element))[: len(generators)]


def in_subgroup(
    orders: Sequence[int],
    generators: Sequence[Sequence[int]],
    element: Sequence[int],
) -> bool:
    try:
        subgroup_coefficients(orders, generators, element)
    except NoSolution:
        return False
    return True


def kernel_of_map(
    source_orders: Sequence[int],
    images: Sequence[Sequence[int]],
    target_orders: Sequence[int],
    extra_relations: Sequence[Sequence[int]] = (),
) -> list[tuple[int, ...]]:
    """
    Generators of the kernel of the homomorphism ⊕ ℤ/sᵢ → (⊕ ℤ/tⱼ) / ⟨extra⟩
    sending the i-th unit vector to `images[i]`.
    """
    size = len(source_orders)
    if size == 0:
        return []
    quotient = _relations(target_orders) + [list(r) for r in extra_relations]
    columns = [list(image) for image in images] + [
        [-value for value in relation] for relation in quotient
    ]
    if not target_orders:
        kernel_columns = [[int(i == j) for j in range(size)] for i in range(size)]
    else:
        kernel = kernel_mod(IntMatrix.from_columns(columns, len(target_orders)))
        kernel_columns = [kernel.column(c)[:size] for c in range(kernel.cols)]
    result = []
    for column in kernel_columns:
        vector = tuple(
            value % order if order else value
            for value, order in zip(column, source_orders)
        )
        if any(vector):
            result.append(vector)
    return result
