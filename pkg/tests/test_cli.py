import json
from pathlib import Path

import pytest
from wulink.cli import Options, generate_complex, main, parse_args
from wulink.complex import SimplicialComplex, dump_complex, load_complex, sphere
from wulink.duality import PairingMatrix
from wulink.report import build_report, dumps, render_pretty


@pytest.fixture
def complex_file(tmp_path: Path):
    def write(complex_: SimplicialComplex) -> str:
        path = tmp_path / f"{complex_.name}.json"
        dump_complex(complex_, path)
        return str(path)

    return write


def run_json(capsys: pytest.CaptureFixture[str], args: list[str]) -> tuple[int, dict]:
    code = main(parse_args(args))
    return code, json.loads(capsys.readouterr().out)


def test_generate_to_file(tmp_path: Path) -> None:
    out = tmp_path / "sphere.json"
    assert main(parse_args(["generate", "sphere", "2", "--out", str(out)])) == 0
    complex_ = load_complex(out)
    assert complex_.name == "S2"
    assert len(complex_.facets) == 4


def test_generate_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    code, payload = run_json(capsys, ["generate", "lens", "4", "1"])
    assert code == 0
    assert payload["name"] == "L(4,1)"
    assert len(payload["facets"]) == 384


@pytest.mark.parametrize(
    "kind, params, name, dimension",
    [
        ("suspension", ["rp", "2"], "S(RP2)", 3),
        ("product", ["sphere", "1", "x", "sphere", "1"], "S1xS1", 2),
        ("suspension", ["suspension", "sphere", "0"], "S(S(S0))", 2),
    ],
)
def test_generate_complex(kind: str, params: list[str], name: str, dimension: int) -> None:
    complex_ = generate_complex(kind, params)
    assert complex_.name == name
    assert complex_.dimension == dimension


def test_generate_from_file(complex_file) -> None:
    path = complex_file(sphere(1))
    assert generate_complex("suspension", [path]).name == "S(S1)"


@pytest.mark.parametrize(
    "kind, params",
    [
        ("rp", ["0"]),
        ("rp", []),
        ("lens", ["4", "2"]),
        ("sphere", ["two"]),
        ("product", ["sphere", "1", "sphere", "1"]),
        ("sphere", ["1", "2"]),
    ],
)
def test_generate_rejects(kind: str, params: list[str]) -> None:
    with pytest.raises(ValueError):
        generate_complex(kind, params)
    assert main(parse_args(["generate", kind, *params])) == 2


def test_report_verdict(capsys: pytest.CaptureFixture[str], complex_file) -> None:
    path = complex_file(sphere(5))
    code, report = run_json(capsys, ["report", "-c", path, "--sections", "verdict"])
    assert code == 0
    assert report["tool"] == "wulink"
    assert report["complex"]["dimension"] == 5
    assert list(report["sections"]) == ["verdict"]
    assert report["sections"]["verdict"]["status"] == "CONSISTENT"
    assert report["assertions"] == [
        {"section": "verdict", "name": "verdict_consistent", "status": "PASS"}
    ]
    assert report["status"] == "PASS"


def test_report_abstains_in_dimension_three(
    capsys: pytest.CaptureFixture[str], complex_file, rp3: SimplicialComplex
) -> None:
    code, report = run_json(
        capsys, ["report", "-c", complex_file(rp3), "--sections", "verdict,pairing"]
    )
    assert code == 0
    assert list(report["sections"]) == ["pairing", "verdict"]
    assert report["sections"]["verdict"] == {"status": "ABSTAIN", "dimension": 3}
    (linking, *_) = report["sections"]["pairing"]["linking"]
    assert linking["gram"] == [["1/2"]]


def test_report_parity_error(complex_file, rp2: SimplicialComplex) -> None:
    path = complex_file(rp2)
    assert main(parse_args(["report", "-c", path, "--sections", "pairing"])) == 2


def test_report_missing_file(tmp_path: Path) -> None:
    missing = str(tmp_path / "missing.json")
    assert main(parse_args(["report", "-c", missing])) == 2


def test_report_is_deterministic(
    capsys: pytest.CaptureFixture[str], complex_file, rp2: SimplicialComplex
) -> None:
    args = ["report", "-c", complex_file(rp2), "--n-max", "1"]
    assert main(parse_args(args)) == 0
    first = capsys.readouterr().out
    assert main(parse_args(args)) == 0
    assert capsys.readouterr().out == first
    report = json.loads(first)
    assert list(report["sections"]) == ["cohomology", "steenrod", "bss", "wu"]
    assert report["sections"]["wu"]["v"] == "1 + g1"
    assert report["sections"]["cohomology"]["euler_characteristic"] == 1


def test_report_pretty(
    capsys: pytest.CaptureFixture[str], complex_file, rp2: SimplicialComplex
) -> None:
    args = ["report", "-c", complex_file(rp2), "--n-max", "1", "--pretty"]
    assert main(parse_args(args)) == 0
    output = capsys.readouterr().out
    assert output.startswith("wulink 0.1.0\ncomplex RP2 (dimension 2")
    assert "[cohomology]" in output
    assert "PASS steenrod sq0_is_identity" in output
    assert output.rstrip().endswith("status PASS")


def test_build_report(s2: SimplicialComplex) -> None:
    report = build_report(s2, ["wu", "cohomology"], n_max=1)
    assert list(report["sections"]) == ["cohomology", "wu"]
    assert report["complex"]["f_vector"] == [4, 6, 4]
    with pytest.raises(ValueError):
        build_report(s2, ["homotopy"])
    assert dumps(build_report(s2, ["cohomology"], n_max=1, workers=2)) == dumps(
        build_report(s2, ["cohomology"], n_max=1)
    )
    assert "status PASS" in render_pretty(report)


def test_verify(capsys: pytest.CaptureFixture[str], complex_file) -> None:
    path = complex_file(sphere(2))
    code, payload = run_json(capsys, ["verify", "-c", path, "--suite", "axioms", "--n-max", "1"])
    assert code == 0
    assert payload["status"] == "PASS"
    assert payload["failed"] == 0
    assert [suite["suite"] for suite in payload["suites"]] == ["axioms"]


def test_verify_pretty(capsys: pytest.CaptureFixture[str], complex_file) -> None:
    path = complex_file(sphere(1))
    args = ["verify", "-c", path, "-s", "cochain-identities", "--pairs", "3", "--pretty"]
    assert main(parse_args(args)) == 0
    output = capsys.readouterr().out
    assert "PASS cochain-identities:" in output
    assert output.rstrip().endswith("status PASS")


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["report"],
        ["generate", "torus"],
        ["report", "-c", "k.json", "--sections", "homotopy"],
        ["verify", "-c", "k.json", "--n-max", "0"],
        ["verify", "-c", "k.json", "--suite", "nonsense"],
        ["report", "-c", "k.json", "--workers", "-1"],
        ["report", "-c", "k.json", "--logging-config-filepath", "logging.yaml"],
    ],
)
def test_bad_options(args: list[str]) -> None:
    with pytest.raises(SystemExit) as excinfo:
        parse_args(args)
    assert excinfo.value.code == 2


def test_options() -> None:
    options = parse_args(["report", "-c", "k.json", "--sections", "wu, bss"])
    assert options.sections == ["wu", "bss"]
    assert options.n_max == Options.default_value("n_max") == 3
    assert Options.default_value("params") == []
    with pytest.raises(ValueError):
        Options.default_value("command")
    with pytest.raises(ValueError):
        Options(command="serve")


def test_logging_config(tmp_path: Path) -> None:
    config = tmp_path / "logging.json"
    config.write_text(json.dumps({"loggers": {"wulink": {"level": "WARNING"}}}))
    options = parse_args(
        ["generate", "sphere", "1", "--logging-config-filepath", str(config), "--quiet"]
    )
    assert options.logging_config == {"loggers": {"wulink": {"level": "WARNING"}}}


def test_report_degrees(capsys: pytest.CaptureFixture[str], complex_file) -> None:
    path = complex_file(sphere(2))
    args = ["report", "-c", path, "--sections", "cohomology,steenrod", "--degrees", "0,2"]
    code, report = run_json(capsys, [*args, "--n-max", "1"])
    assert code == 0
    assert [group["degree"] for group in report["sections"]["cohomology"]["Z"]] == [0, 2]
    assert [row["degree"] for row in report["sections"]["steenrod"]["table"]] == [0, 2]
    assert report["sections"]["cohomology"]["euler_characteristic"] == 2

    with pytest.raises(SystemExit):
        parse_args(["report", "-c", path, "--degrees", "one"])
    with pytest.raises(SystemExit):
        parse_args(["report", "-c", path, "--degrees", "-1"])


def test_inconsistent_verdict_exits_one(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str], complex_file
) -> None:
    def odd_pairing(complex_: SimplicialComplex, n: int) -> PairingMatrix:
        return PairingMatrix(n, 2, ((1,),), ("g2",), (2,), 2)

    monkeypatch.setattr("wulink.duality.aux_pairing", odd_pairing)
    path = complex_file(sphere(5))
    assert main(parse_args(["report", "-c", path, "--sections", "verdict", "--n-max", "1"])) == 1
    assert capsys.readouterr().out == ""

    code, payload = run_json(capsys, ["verify", "-c", path, "--suite", "theorem73", "--n-max", "1"])
    assert code == 1
    assert payload["status"] == "FAIL"
