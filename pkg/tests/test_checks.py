import pytest
from wulink.checks import (
    Checker,
    applicable_suites,
    known_cover,
    run_suite,
)
from wulink.cohomology import InconsistencyError
from wulink.complex import SimplicialComplex, complex_from_facets
from wulink.duality import PairingMatrix


def odd_pairing(complex_: SimplicialComplex, n: int) -> PairingMatrix:
    return PairingMatrix(n, 2, ((1,),), ("g2",), (2,), 2)


@pytest.mark.parametrize("suite", ["axioms", "bss"])
def test_suites_on_surfaces(suite: str, s2: SimplicialComplex, rp2: SimplicialComplex) -> None:
    for complex_ in (s2, rp2):
        (result,) = run_suite(complex_, suite, n_max=2)
        assert result.suite == suite
        assert result.passed > 0
        assert result.ok, result.first_failure


@pytest.mark.parametrize("name", ["rp2", "torus", "rp3", "l41"])
def test_cochain_identities(name: str, request) -> None:
    (result,) = run_suite(request.getfixturevalue(name), "cochain-identities", seed=7, pairs=12)
    assert result.passed > 0
    assert result.failed == 0
    assert result.first_failure is None


@pytest.mark.parametrize("name", ["rp3", "l41", "rp5", "s2xl41"])
def test_pairing_suite(name: str, request) -> None:
    (result,) = run_suite(request.getfixturevalue(name), "pairing", n_max=2)
    assert result.ok, result.first_failure


@pytest.mark.parametrize("name", ["rp3", "l41", "l81"])
def test_bss_suite_on_lens_spaces(name: str, request) -> None:
    (result,) = run_suite(request.getfixturevalue(name), "bss")
    assert result.ok, result.first_failure


@pytest.mark.parametrize("name", ["s5", "rp5", "s2xl41", "s2xl81"])
def test_theorem73_suite(name: str, request) -> None:
    (result,) = run_suite(request.getfixturevalue(name), "theorem73", n_max=2)
    assert result.ok, result.first_failure
    assert result.to_json()["suite"] == "theorem73"


def test_theorem73_suite_records_inconsistent_verdict(
    monkeypatch: pytest.MonkeyPatch, s5: SimplicialComplex
) -> None:
    monkeypatch.setattr("wulink.duality.aux_pairing", odd_pairing)
    (result,) = run_suite(s5, "theorem73", n_max=1)
    assert not result.ok
    assert result.first_failure["check"] == "verdict"
    assert "disagree" in result.first_failure["error"]


def test_unknown_suite(s2: SimplicialComplex) -> None:
    with pytest.raises(ValueError):
        run_suite(s2, "nonsense")


def test_applicable_suites(
    s2: SimplicialComplex, rp3: SimplicialComplex, s5: SimplicialComplex
) -> None:
    assert applicable_suites(s2) == ("axioms", "cochain-identities", "bss")
    assert applicable_suites(rp3) == ("axioms", "cochain-identities", "pairing", "bss")
    assert applicable_suites(s5) == (
        "axioms",
        "cochain-identities",
        "pairing",
        "bss",
        "theorem73",
    )


def test_checker_records_first_failure(s2: SimplicialComplex) -> None:
    checker = Checker("axioms", s2)
    assert checker.check("first", True, degree=0)
    assert not checker.check("second", False, degree=1)
    assert not checker.check("third", False, degree=2)
    result = checker.result
    assert (result.passed, result.failed) == (1, 2)
    assert not result.ok
    assert result.first_failure == {"check": "second", "complex": "S2", "degree": 1}


def test_checker_guarded(s2: SimplicialComplex) -> None:
    checker = Checker("pairing", s2)

    def broken() -> bool:
        raise InconsistencyError("mismatch")

    assert not checker.guarded("broken", broken, n=1)
    assert checker.result.first_failure["error"] == "mismatch"
    assert checker.guarded("fine", lambda: True)
    assert checker.result.passed == 1

    def unexpected() -> bool:
        raise KeyError("boom")

    with pytest.raises(KeyError):
        checker.guarded("unexpected", unexpected)


def test_known_cover(
    rp2: SimplicialComplex, l41: SimplicialComplex, s2: SimplicialComplex
) -> None:
    cover = known_cover(rp2)
    assert cover is not None
    assert cover.base.content_hash == rp2.content_hash
    assert known_cover(l41) is not None
    assert known_cover(s2) is None
    impostor = complex_from_facets("RP1", [[0, 1], [1, 2], [2, 3], [0, 3]])
    assert known_cover(impostor) is None
