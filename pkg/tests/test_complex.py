import json
from pathlib import Path

import pytest
from wulink.complex import (
    ComplexFormatError,
    ComplexValidationError,
    Simplex,
    SimplicialComplex,
    antipodal_cover,
    coboundary_matrices,
    complex_from_facets,
    dump_complex,
    lens_cover,
    load_complex,
    point,
    product,
    sphere,
    suspension,
)
from wulink.rings import ZZ, Zmod


def write_complex(path: Path, data: object) -> Path:
    path.write_text(json.dumps(data), encoding="utf8")
    return path


def test_simplex() -> None:
    simplex = Simplex([3, 1, 2])
    assert simplex == (1, 2, 3)
    assert simplex.dimension == 2
    assert simplex.face(1) == (1, 3)
    with pytest.raises(ComplexValidationError):
        Simplex([0, 0, 1])
    with pytest.raises(ComplexValidationError):
        Simplex([])


def test_load_complex(tmp_path: Path) -> None:
    circle = load_complex(
        write_complex(tmp_path / "circle.json", {"name": "circle", "facets": [[0, 1], [1, 2], [0, 2]]})
    )
    assert circle.name == "circle"
    assert circle.dimension == 1
    assert len(circle.facets) == 3

    triangle = load_complex(write_complex(tmp_path / "triangle.json", {"facets": [[0, 1, 2]]}))
    assert triangle.name == "triangle"
    assert triangle.dimension == 2
    assert triangle.f_vector == (3, 3, 1)


def test_load_complex_renumbers(tmp_path: Path) -> None:
    complex_ = load_complex(write_complex(tmp_path / "gap.json", {"facets": [[10, 30], [30, 20]]}))
    assert complex_.vertex_count == 3
    assert complex_.facets == ((0, 2), (1, 2))


@pytest.mark.parametrize(
    "data, error",
    [
        ({"facets": [[0, 0, 1]]}, ComplexValidationError),
        ({"facets": []}, ComplexValidationError),
        ({"facets": [[0, -1]]}, ComplexValidationError),
        ({"facets": "nope"}, ComplexFormatError),
        ({"facets": [[0, "a"]]}, ComplexFormatError),
        ({"name": 3, "facets": [[0, 1]]}, ComplexFormatError),
        ([[0, 1]], ComplexFormatError),
    ],
)
def test_load_complex_rejects(tmp_path: Path, data: object, error: type) -> None:
    with pytest.raises(error):
        load_complex(write_complex(tmp_path / "bad.json", data))


def test_load_complex_malformed(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf8")
    with pytest.raises(ComplexFormatError):
        load_complex(path)
    with pytest.raises(ComplexFormatError):
        load_complex(tmp_path / "missing.json")


def test_dump_and_load(tmp_path: Path, rp2: SimplicialComplex) -> None:
    dump_complex(rp2, tmp_path / "rp2.json")
    loaded = load_complex(tmp_path / "rp2.json")
    assert loaded.name == rp2.name
    assert loaded.content_hash == rp2.content_hash


def test_vertex_ids_must_be_dense() -> None:
    with pytest.raises(ComplexValidationError):
        SimplicialComplex("gap", 3, (Simplex((0, 2)),))


@pytest.mark.parametrize(
    "n, f_vector",
    [(0, (2,)), (1, (3, 3)), (2, (4, 6, 4)), (5, (7, 21, 35, 35, 21, 7))],
)
def test_sphere(n: int, f_vector: tuple[int, ...]) -> None:
    complex_ = sphere(n)
    assert complex_.name == f"S{n}"
    assert complex_.f_vector == f_vector
    assert complex_.euler_characteristic == 1 + (-1) ** n


def test_suspension() -> None:
    circle = sphere(1)
    suspended = suspension(circle)
    assert suspended.name == "S(S1)"
    assert suspended.dimension == 2
    assert suspended.euler_characteristic == 2
    assert suspension(point()).euler_characteristic == 1


def test_product() -> None:
    edge = complex_from_facets("I", [[0, 1]])
    square = product(edge, edge)
    assert square.name == "IxI"
    assert square.facets == ((0, 1, 3), (0, 2, 3))

    torus = product(sphere(1), sphere(1))
    assert torus.dimension == 2
    assert torus.euler_characteristic == 0
    assert len(torus.facets) == 18


@pytest.mark.parametrize("n, facets", [(1, 3), (2, 12), (3, 60)])
def test_projective_space(n: int, facets: int) -> None:
    cover = antipodal_cover(n)
    assert cover.base.name == f"RP{n}"
    assert cover.base.dimension == n
    assert len(cover.base.facets) == facets
    assert len(cover.total.facets) == 2 * facets
    # The action is free: no simplex of the cover collapses in the quotient.
    for facet in cover.total.facets:
        assert len({cover.vertex_map[v] for v in facet}) == len(facet)


def test_lens_space() -> None:
    cover = lens_cover(4, 1)
    assert cover.base.name == "L(4,1)"
    assert cover.base.dimension == 3
    assert len(cover.total.facets) == 4 * len(cover.base.facets)
    assert cover.base.euler_characteristic == 0


@pytest.mark.parametrize("p, q", [(1, 0), (4, 2)])
def test_lens_space_rejects(p: int, q: int) -> None:
    with pytest.raises(ValueError):
        lens_cover(p, q)


def test_coboundary_matrices() -> None:
    cochains = coboundary_matrices(sphere(1), ZZ)
    delta = cochains.delta[0]
    assert (delta.rows, delta.cols) == (3, 3)
    assert all(sum(row) == 0 for row in delta.to_rows())
    assert set(delta.entries.values()) <= {1, -1}

    assert coboundary_matrices(point(), ZZ).delta == ()


@pytest.mark.parametrize("ring", [ZZ, Zmod(2), Zmod(4)])
def test_coboundary_squares_to_zero(
    ring, s2: SimplicialComplex, rp3: SimplicialComplex, torus: SimplicialComplex
) -> None:
    for complex_ in (s2, rp3, torus, suspension(s2)):
        assert coboundary_matrices(complex_, ring).is_complex()
