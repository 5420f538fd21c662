import dataclasses
import functools
import hashlib
import itertools
import json
import math
from pathlib import Path
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .linalg import IntMatrix
from .logger import logger
from .rings import Ring


class ComplexFormatError(ValueError):
    pass


class ComplexValidationError(ValueError):
    pass


class Simplex(tuple):
    """
    Strictly increasing tuple of vertex ids.
    """

    def __new__(cls, vertices: Iterable[int]) -> "Simplex":
        ordered = sorted(vertices)
        if not ordered:
            raise ComplexValidationError("A simplex needs at least one vertex")
        for a, b in zip(ordered, ordered[1:]):
            if a == b:
                raise ComplexValidationError(f"Repeated vertex {a} in simplex")
        return super().__new__(cls, ordered)

    @property
    def dimension(self) -> int:
        return len(self) - 1

    def face(self, j: int) -> tuple[int, ...]:
        return self[:j] + self[j + 1 :]


@dataclasses.dataclass(frozen=True)
class SimplicialComplex:
    """
    Finite ordered simplicial complex given by its facets.

    Faces are generated from the facets on first use and kept sorted, so the
    index of a simplex in `simplices(k)` is deterministic.
    """

    name: str
    vertex_count: int
    facets: tuple[Simplex, ...]
    dimension: int = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        if not self.facets:
            raise ComplexValidationError(f"Complex {self.name!r} has no facets")
        facets = tuple(sorted({Simplex(facet) for facet in self.facets}))
        used = set(itertools.chain.from_iterable(facets))
        if used != set(range(self.vertex_count)):
            raise ComplexValidationError(
                f"Vertex ids of {self.name!r} are not exactly 0..{self.vertex_count - 1}"
            )
        object.__setattr__(self, "facets", facets)
        object.__setattr__(
            self, "dimension", max(facet.dimension for facet in facets)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.vertex_count, self.content_hash))

    @functools.cached_property
    def content_hash(self) -> str:
        canonical = json.dumps([list(facet) for facet in self.facets], separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf8")).hexdigest()

    @functools.cached_property
    def _faces(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        faces: list[set[tuple[int, ...]]] = [set() for _ in range(self.dimension + 1)]
        for facet in self.facets:
            for k in range(len(facet)):
                faces[k].update(itertools.combinations(facet, k + 1))
        return tuple(tuple(sorted(layer)) for layer in faces)

    @functools.cached_property
    def _indices(self) -> tuple[dict[tuple[int, ...], int], ...]:
        return tuple(
            {simplex: i for i, simplex in enumerate(layer)} for layer in self._faces
        )

    @functools.cached_property
    def _cofaces(self) -> tuple[tuple[tuple[tuple[int, int], ...], ...], ...]:
        result = []
        for k in range(self.dimension):
            index = self._indices[k]
            cofaces: list[list[tuple[int, int]]] = [[] for _ in self._faces[k]]
            for row, tau in enumerate(self._faces[k + 1]):
                for j in range(k + 2):
                    cofaces[index[tau[:j] + tau[j + 1 :]]].append(
                        (row, -1 if j % 2 else 1)
                    )
            result.append(tuple(tuple(c) for c in cofaces))
        return tuple(result)

    def simplices(self, k: int) -> tuple[tuple[int, ...], ...]:
        if 0 <= k <= self.dimension:
            return self._faces[k]
        return ()

    def index(self, k: int) -> Mapping[tuple[int, ...], int]:
        if 0 <= k <= self.dimension:
            return self._indices[k]
        return {}

    def cofaces(self, k: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        """
        For every k-simplex, the (k+1)-simplices containing it with their incidence sign.
        """
        if 0 <= k < self.dimension:
            return self._cofaces[k]
        return tuple(() for _ in self.simplices(k))

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self._faces)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * count for k, count in enumerate(self.f_vector))

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "facets": [list(facet) for facet in self.facets]}


def complex_from_facets(name: str, facets: Iterable[Iterable[int]]) -> SimplicialComplex:
    """
    Build a complex from arbitrary non-negative vertex ids, renumbering them
    monotonically onto 0..V−1.
    """
    simplices = [Simplex(facet) for facet in facets]
    labels = sorted(set(itertools.chain.from_iterable(simplices)))
    if labels and labels[0] < 0:
        raise ComplexValidationError(f"Negative vertex id {labels[0]}")
    relabel = {label: i for i, label in enumerate(labels)}
    return SimplicialComplex(
        name=name,
        vertex_count=len(labels),
        facets=tuple(Simplex(relabel[v] for v in s) for s in simplices),
    )


def load_complex(path: str | Path) -> SimplicialComplex:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ComplexFormatError(f"Cannot read complex file {path}: {exc}") from exc

    if not isinstance(data, dict) or not isinstance(data.get("facets"), list):
        raise ComplexFormatError(f'{path} must be an object with a "facets" list')
    name = data.get("name", path.stem)
    if not isinstance(name, str):
        raise ComplexFormatError(f'"name" in {path} must be a string')
    for facet in data["facets"]:
        if not isinstance(facet, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in facet
        ):
            raise ComplexFormatError(f"Facet {facet!r} in {path} is not a list of integers")

    complex_ = complex_from_facets(name, data["facets"])
    logger.info(
        "Loaded %s: dimension %d, f-vector %s",
        complex_.name,
        complex_.dimension,
        complex_.f_vector,
    )
    return complex_


def dump_complex(complex_: SimplicialComplex, path: str | Path) -> None:
    Path(path).write_text(json.dumps(complex_.to_json()) + "\n", encoding="utf8")


def point() -> SimplicialComplex:
    return SimplicialComplex("point", 1, (Simplex((0,)),))


def sphere(n: int) -> SimplicialComplex:
    if n < 0:
        raise ValueError(f"Sphere dimension must be non-negative, got {n}")
    return SimplicialComplex(
        name=f"S{n}",
        vertex_count=n + 2,
        facets=tuple(Simplex(f) for f in itertools.combinations(range(n + 2), n + 1)),
    )


def suspension(complex_: SimplicialComplex) -> SimplicialComplex:
    """
    Join with two apexes; the north pole is vertex V and the south pole V+1.
    """
    north, south = complex_.vertex_count, complex_.vertex_count + 1
    facets = []
    for facet in complex_.facets:
        facets.append(Simplex(facet + (north,)))
        facets.append(Simplex(facet + (south,)))
    return SimplicialComplex(f"S({complex_.name})", complex_.vertex_count + 2, tuple(facets))


def product(left: SimplicialComplex, right: SimplicialComplex) -> SimplicialComplex:
    """
    Staircase triangulation; the vertex (v, w) gets id v·|right| + w.
    """
    width = right.vertex_count
    facets = set()
    for sigma in left.facets:
        for tau in right.facets:
            p, q = sigma.dimension, tau.dimension
            for moves in itertools.combinations(range(p + q), p):
                steps = set(moves)
                i = j = 0
                path = [sigma[0] * width + tau[0]]
                for step in range(p + q):
                    if step in steps:
                        i += 1
                    else:
                        j += 1
                    path.append(sigma[i] * width + tau[j])
                facets.add(Simplex(path))
    return SimplicialComplex(
        f"{left.name}x{right.name}", left.vertex_count * width, tuple(facets)
    )


@dataclasses.dataclass(frozen=True)
class Covering:
    """
    A free simplicial quotient `total → base` given on vertices.
    """

    total: SimplicialComplex
    base: SimplicialComplex
    vertex_map: tuple[int, ...]


def _subdivision_chains(
    simplices: Iterable[tuple[Hashable, ...]],
) -> Iterator[tuple[frozenset, ...]]:
    for simplex in simplices:
        for order in itertools.permutations(simplex):
            yield tuple(frozenset(order[: k + 1]) for k in range(len(order)))


def _vertex_key(vertex: frozenset) -> tuple[int, tuple]:
    return (len(vertex), tuple(sorted(vertex)))


def _orbit_quotient(
    name: str,
    chains: Sequence[tuple[frozenset, ...]],
    orbit: Callable[[frozenset], frozenset],
) -> Covering:
    """
    Quotient of a barycentric subdivision by a free action; `orbit(v)` returns
    the canonical representative of the orbit of the subdivision vertex `v`.
    """
    vertices = sorted({v for chain in chains for v in chain}, key=_vertex_key)
    total_id = {v: i for i, v in enumerate(vertices)}
    representatives = sorted({orbit(v) for v in vertices}, key=_vertex_key)
    base_id = {v: i for i, v in enumerate(representatives)}
    vertex_map = tuple(base_id[orbit(v)] for v in vertices)

    total_facets = []
    base_facets = set()
    for chain in chains:
        image = [vertex_map[total_id[v]] for v in chain]
        if len(set(image)) != len(image):
            raise ComplexValidationError(
                f"Action on {name} identifies two vertices of a simplex"
            )
        total_facets.append(Simplex(total_id[v] for v in chain))
        base_facets.add(Simplex(image))

    total = SimplicialComplex(f"cover({name})", len(vertices), tuple(total_facets))
    base = SimplicialComplex(name, len(representatives), tuple(base_facets))
    # A free action on p-fold orbits divides the top simplex count exactly.
    fold = len(vertices) // len(representatives)
    if len(total.facets) != fold * len(base.facets):
        raise ComplexValidationError(f"Action on {name} is not free on simplices")
    return Covering(total, base, vertex_map)


def antipodal_cover(n: int) -> Covering:
    """
    Barycentric subdivision of ∂Δ^{n+1} over its antipodal quotient ℝPⁿ.
    """
    if n < 1:
        raise ValueError(f"Projective space dimension must be at least 1, got {n}")
    ground = frozenset(range(n + 2))
    chains = list(
        _subdivision_chains(itertools.combinations(range(n + 2), n + 1))
    )

    def orbit(vertex: frozenset) -> frozenset:
        return min(vertex, ground - vertex, key=_vertex_key)

    return _orbit_quotient(f"RP{n}", chains, orbit)


def rp_space(n: int) -> SimplicialComplex:
    return antipodal_cover(n).base


def lens_cover(p: int, q: int) -> Covering:
    """
    Join of two 2p-gons with ℤ/p rotating them by 2 and 2q steps, subdivided
    once and divided by the action.
    """
    if p < 2 or math.gcd(p, q) != 1:
        raise ValueError(f"Lens space parameters need p >= 2 and gcd(p, q) = 1, got {p}, {q}")
    size = 2 * p
    tetrahedra = [
        (i, (i + 1) % size, size + j, size + (j + 1) % size)
        for i in range(size)
        for j in range(size)
    ]

    def rotate(vertex: int, times: int) -> int:
        if vertex < size:
            return (vertex + 2 * times) % size
        return size + (vertex - size + 2 * q * times) % size

    for tetrahedron in tetrahedra:
        for t in range(1, p):
            moved = {rotate(v, t) for v in tetrahedron}
            if moved & set(tetrahedron):
                raise ComplexValidationError(
                    f"Lens action moves a vertex of {tetrahedron} inside it"
                )

    def orbit(vertex: frozenset) -> frozenset:
        return min(
            (frozenset(rotate(v, t) for v in vertex) for t in range(p)),
            key=_vertex_key,
        )

    chains = list(_subdivision_chains(tetrahedra))
    return _orbit_quotient(f"L({p},{q})", chains, orbit)


def lens_space(p: int, q: int) -> SimplicialComplex:
    return lens_cover(p, q).base


@dataclasses.dataclass(frozen=True, eq=False)
class CochainComplex:
    """
    `delta[k]` has the (k+1)-simplices as rows and the k-simplices as columns.
    """

    complex: SimplicialComplex
    ring: Ring
    basis: tuple[tuple[tuple[int, ...], ...], ...]
    delta: tuple[IntMatrix, ...]

    def is_complex(self) -> bool:
        for first, second in zip(self.delta, self.delta[1:]):
            if (second @ first).reduce(self.ring.modulus).entries:
                return False
        return True


@functools.lru_cache(maxsize=32)
def coboundary_matrices(complex_: SimplicialComplex, ring: Ring) -> CochainComplex:
    basis = tuple(complex_.simplices(k) for k in range(complex_.dimension + 1))
    delta = []
    for k in range(complex_.dimension):
        entries = {}
        for col, cofaces in enumerate(complex_.cofaces(k)):
            for row, sign in cofaces:
                value = ring.reduce(sign)
                if value:
                    entries[(row, col)] = value
        delta.append(IntMatrix(len(basis[k + 1]), len(basis[k]), entries))
    return CochainComplex(complex_, ring, basis, tuple(delta))
