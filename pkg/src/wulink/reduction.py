"""
Cancel pairs of cells joined by a ±1 incidence in an integral cochain complex.

Each cancellation of σ ∈ Cᵏ against τ ∈ Cᵏ⁺¹ is Gaussian elimination on δₖ.
The recorded steps give chain maps f: C → C′, g: C′ → C and a homotopy h
with 1 − g∘f = δh + hδ, so cocycles, classes and coboundary preimages can
be moved between the large complex and its small core.
"""

import dataclasses
import functools
from typing import Mapping, Sequence

from .linalg import IntMatrix
from .logger import debug_logger


@dataclasses.dataclass(frozen=True)
class Elimination:
    order: int
    degree: int
    source: int  # σ in C^degree
    target: int  # τ in C^{degree+1}
    unit: int  # ±1 entry of τ in δσ
    row: Mapping[int, int]  # rest of τ's row
    column: Mapping[int, int]  # rest of σ's column


@dataclasses.dataclass(frozen=True, eq=False)
class ReducedComplex:
    """
    `cells[k]` lists the surviving original k-cells; `delta[k]` is the reduced
    coboundary with rows `cells[k+1]` and columns `cells[k]`.
    """

    cells: tuple[tuple[int, ...], ...]
    delta: tuple[IntMatrix, ...]
    eliminations: tuple[Elimination, ...]

    @functools.cached_property
    def _steps_by_degree(self) -> dict[int, tuple[Elimination, ...]]:
        steps: dict[int, list[Elimination]] = {}
        for step in self.eliminations:
            steps.setdefault(step.degree, []).append(step)
        return {k: tuple(v) for k, v in steps.items()}

    @functools.cached_property
    def _positions(self) -> tuple[dict[int, int], ...]:
        return tuple({cell: i for i, cell in enumerate(layer)} for layer in self.cells)

    def position(self, degree: int) -> Mapping[int, int]:
        return self._positions[degree]

    def _forward(
        self, degree: int, values: Mapping[int, int]
    ) -> tuple[dict[int, int], list[tuple[Elimination, int]]]:
        current = {cell: v for cell, v in values.items() if v}
        pieces = []
        steps = sorted(
            self._steps_by_degree.get(degree - 1, ())
            + self._steps_by_degree.get(degree, ()),
            key=lambda step: step.order,
        )
        for step in steps:
            if step.degree == degree:
                current.pop(step.source, None)
                continue
            y = current.pop(step.target, 0)
            if not y:
                continue
            pieces.append((step, step.unit * y))
            for cell, coefficient in step.column.items():
                value = current.get(cell, 0) - step.unit * y * coefficient
                if value:
                    current[cell] = value
                else:
                    current.pop(cell, None)
        return current, pieces

    def project(self, degree: int, values: Mapping[int, int]) -> list[int]:
        """
        f on a degree-k cochain, as a vector over `cells[k]`.
        """
        current, _ = self._forward(degree, values)
        positions = self._positions[degree]
        vector = [0] * len(self.cells[degree])
        for cell, value in current.items():
            vector[positions[cell]] = value
        return vector

    def lift(self, degree: int, vector: Sequence[int]) -> dict[int, int]:
        """
        g on a vector over `cells[k]`, as a cochain on the original cells.
        """
        result = {
            cell: value for cell, value in zip(self.cells[degree], vector) if value
        }
        for step in reversed(self._steps_by_degree.get(degree, ())):
            total = sum(c * result.get(cell, 0) for cell, c in step.row.items())
            if total:
                result[step.source] = -step.unit * total
        return result

    def homotopy(self, degree: int, values: Mapping[int, int]) -> dict[int, int]:
        """
        h from degree k to degree k−1, accumulated as Σⱼ g_{<j} hⱼ f_{<j}.
        """
        _, pieces = self._forward(degree, values)
        if not pieces:
            return {}
        scalars = {step.order: s for step, s in pieces}
        result: dict[int, int] = {}
        for step in reversed(self._steps_by_degree.get(degree - 1, ())):
            total = sum(c * result.get(cell, 0) for cell, c in step.row.items())
            value = -step.unit * total + scalars.get(step.order, 0)
            if value:
                result[step.source] = value
        return result


def reduce_cochain_complex(
    sizes: Sequence[int], delta: Sequence[IntMatrix]
) -> ReducedComplex:
    rows: list[dict[int, dict[int, int]]] = []
    cols: list[dict[int, dict[int, int]]] = []
    for k, matrix in enumerate(delta):
        row_maps: dict[int, dict[int, int]] = {r: {} for r in range(sizes[k + 1])}
        col_maps: dict[int, dict[int, int]] = {c: {} for c in range(sizes[k])}
        for (r, c), value in matrix.entries.items():
            row_maps[r][c] = value
            col_maps[c][r] = value
        rows.append(row_maps)
        cols.append(col_maps)
    alive = [set(range(size)) for size in sizes]
    eliminations: list[Elimination] = []

    def eliminate(k: int, sigma: int, tau: int) -> None:
        unit = cols[k][sigma][tau]
        row = {a: v for a, v in rows[k][tau].items() if a != sigma}
        column = {b: v for b, v in cols[k][sigma].items() if b != tau}
        for beta, cb in column.items():
            row_b = rows[k][beta]
            for alpha, ra in row.items():
                value = row_b.get(alpha, 0) - cb * unit * ra
                if value:
                    row_b[alpha] = value
                    cols[k][alpha][beta] = value
                else:
                    row_b.pop(alpha, None)
                    cols[k][alpha].pop(beta, None)
        for alpha in rows[k].pop(tau):
            cols[k][alpha].pop(tau, None)
        for beta in cols[k].pop(sigma):
            rows[k][beta].pop(sigma, None)
        if k >= 1:
            for rho in rows[k - 1].pop(sigma):
                cols[k - 1][rho].pop(sigma, None)
        if k + 1 < len(delta):
            for omega in cols[k + 1].pop(tau):
                rows[k + 1][omega].pop(tau, None)
        alive[k].discard(sigma)
        alive[k + 1].discard(tau)
        eliminations.append(
            Elimination(len(eliminations), k, sigma, tau, unit, row, column)
        )

    for k in range(len(delta)):
        progress = True
        while progress:
            progress = False
            for sigma in sorted(cols[k]):
                column = cols[k].get(sigma)
                if not column:
                    continue
                best = None
                for tau, value in column.items():
                    if value in (1, -1):
                        key = (len(rows[k][tau]), tau)
                        if best is None or key < best:
                            best = key
                if best is not None:
                    eliminate(k, sigma, best[1])
                    progress = True

    cells = tuple(tuple(sorted(layer)) for layer in alive)
    positions = [{cell: i for i, cell in enumerate(layer)} for layer in cells]
    reduced = []
    for k in range(len(delta)):
        entries = {
            (positions[k + 1][r], positions[k][c]): value
            for r, row in rows[k].items()
            for c, value in row.items()
        }
        reduced.append(IntMatrix(len(cells[k + 1]), len(cells[k]), entries))

    debug_logger.debug(
        "Reduced cells %s to %s with %d eliminations",
        tuple(sizes),
        tuple(len(layer) for layer in cells),
        len(eliminations),
    )
    return ReducedComplex(cells, tuple(reduced), tuple(eliminations))
