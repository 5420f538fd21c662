import argparse
import dataclasses
import json
import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Sequence

from .checks import SuiteResult, run_suite
from .cohomology import InconsistencyError
from .complex import (
    SimplicialComplex,
    dump_complex,
    lens_space,
    load_complex,
    product,
    rp_space,
    sphere,
    suspension,
)
from .const import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    SECTIONS,
    SUITES,
    TOOL_NAME,
    VERSION,
)
from .logger import error_logger, load_config, logger
from .report import build_report, dumps, render_pretty

COMMANDS = ("generate", "report", "verify")

KINDS = ("sphere", "rp", "lens", "suspension", "product")


@dataclasses.dataclass
class Options:
    """
    Settings for one `wulink` command. `parse_args` builds it from argv, and
    callers that skip the command line construct it directly.
    """

    command: str
    kind: str | None = None
    params: list[str] = dataclasses.field(default_factory=list)
    out: Path | None = None

    complex: Path | None = None
    sections: list[str] | None = None
    degrees: list[int] | None = None
    n_max: int = 3
    max_page: int = 4

    suite: str = "all"
    seed: int = 0
    pairs: int = 50

    pretty: bool = False
    workers: int = 0

    # Logging
    quiet: bool = False
    verbose: bool = False
    logging_config_filepath: Path | None = None

    # After __post_init__
    logging_config: dict = dataclasses.field(init=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command {self.command!r}")

        if self.command == "generate":
            if self.kind not in KINDS:
                raise ValueError(f"Unknown complex kind {self.kind!r}")
        elif self.complex is None:
            raise ValueError(f"{self.command} needs --complex")

        if self.sections is not None:
            unknown = [s for s in self.sections if s not in SECTIONS]
            if unknown:
                raise ValueError(f"Unknown sections: {', '.join(unknown)}")

        if self.degrees is not None and any(k < 0 for k in self.degrees):
            raise ValueError("--degrees must not be negative")

        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"Unknown suite {self.suite!r}")

        if self.n_max < 1:
            raise ValueError("--n-max must be at least 1")
        if self.max_page < 1:
            raise ValueError("--max-page must be at least 1")
        if self.pairs < 0:
            raise ValueError("--pairs must not be negative")
        if self.workers < 0:
            raise ValueError("--workers must not be negative")

        self.load_logging_config()

    @classmethod
    def default_value(cls, field_name: str) -> Any:
        fields = {field.name: field for field in dataclasses.fields(Options)}
        default = fields[field_name].default
        default_factory = fields[field_name].default_factory
        if default is dataclasses.MISSING and default_factory is dataclasses.MISSING:
            raise ValueError(f"Field {field_name} has no default value")
        if default_factory is not dataclasses.MISSING:
            return default_factory()
        return default

    def load_logging_config(self) -> None:
        if self.logging_config_filepath is None:
            self.logging_config = {}
            return

        if self.logging_config_filepath.name.endswith(".json"):
            self.logging_config = json.loads(
                self.logging_config_filepath.read_text(encoding="utf8")
            )
            return

        raise ValueError(
            f"Logging config {self.logging_config_filepath} must be a .json file"
        )

    def configure_logging(self) -> None:
        logging.config.dictConfig(load_config(self.logging_config))

        if self.quiet:
            logging.getLogger("wulink.check").setLevel(logging.WARNING)
        if self.verbose:
            logging.getLogger("wulink.debug").setLevel(logging.DEBUG)


def _int_param(value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{what} must be an integer, got {value!r}")


def _take_complex(tokens: list[str]) -> SimplicialComplex:
    if not tokens:
        raise ValueError("Missing complex description")
    head = tokens.pop(0)
    if head.endswith(".json"):
        return load_complex(head)
    if head == "sphere":
        return sphere(_int_param(tokens.pop(0) if tokens else "", "sphere dimension"))
    if head == "rp":
        n = _int_param(tokens.pop(0) if tokens else "", "rp dimension")
        if n < 1:
            raise ValueError(f"rp dimension must be positive, got {n}")
        return rp_space(n)
    if head == "lens":
        p = _int_param(tokens.pop(0) if tokens else "", "lens p")
        q = _int_param(tokens.pop(0) if tokens else "", "lens q")
        return lens_space(p, q)
    if head == "suspension":
        return suspension(_take_complex(tokens))
    if head == "product":
        left = _take_complex(tokens)
        if not tokens or tokens.pop(0) != "x":
            raise ValueError('product factors must be separated by "x"')
        return product(left, _take_complex(tokens))
    raise ValueError(f"Unknown complex kind {head!r}")


def generate_complex(kind: str, params: Sequence[str]) -> SimplicialComplex:
    """
    Build a fixture complex from a description such as `rp 5`, `lens 4 1`,
    `suspension rp 2`, `product sphere 2 x lens 4 1` or a path to a complex file.
    """
    tokens = [kind, *params]
    complex_ = _take_complex(tokens)
    if tokens:
        raise ValueError(f"Unexpected parameters: {' '.join(tokens)}")
    return complex_


def parse_args(args: Sequence[str]) -> Options:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME, formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument("--version", action="version", version=VERSION)
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--pretty",
        default=Options.default_value("pretty"),
        action="store_true",
        help="human readable output instead of canonical JSON",
    )
    common.add_argument(
        "--workers",
        default=Options.default_value("workers"),
        type=int,
        help="number of worker processes; 0 or 1 computes in-process",
    )
    common.add_argument(
        "--quiet",
        default=Options.default_value("quiet"),
        action="store_true",
        help="only log failed checks",
    )
    common.add_argument(
        "--verbose",
        default=Options.default_value("verbose"),
        action="store_true",
        help="log elimination and Smith normal form statistics",
    )
    common.add_argument(
        "--logging-config-filepath",
        help="logging config file path",
        type=Path,
        required=False,
    )

    # Please keep the order of arguments like `Options`.
    generate = subparsers.add_parser(
        "generate",
        parents=[common],
        help="write a fixture complex",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    generate.add_argument("kind", choices=KINDS, help="complex kind")
    generate.add_argument(
        "params",
        nargs="*",
        help="kind parameters, e.g. `5` for rp, `4 1` for lens, `rp 2` for suspension",
    )
    generate.add_argument(
        "--out",
        "-o",
        type=Path,
        help="output file, standard output if omitted",
        required=False,
    )

    report = subparsers.add_parser(
        "report",
        parents=[common],
        help="compute report sections for a complex",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    report.add_argument(
        "--complex", "-c", type=Path, required=True, help="complex JSON file"
    )
    report.add_argument(
        "--sections",
        help="comma separated sections out of " + ",".join(SECTIONS),
        required=False,
    )
    report.add_argument(
        "--degrees",
        help="comma separated degrees for the cohomology and steenrod tables",
        required=False,
    )
    report.add_argument(
        "--n-max",
        default=Options.default_value("n_max"),
        type=int,
        help="largest n for the ℤ/2ⁿ pairings and verdict",
    )
    report.add_argument(
        "--max-page",
        default=Options.default_value("max_page"),
        type=int,
        help="last Bockstein spectral sequence page",
    )

    verify = subparsers.add_parser(
        "verify",
        parents=[common],
        help="run invariant suites on a complex",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    verify.add_argument(
        "--complex", "-c", type=Path, required=True, help="complex JSON file"
    )
    verify.add_argument(
        "--n-max",
        default=Options.default_value("n_max"),
        type=int,
        help="largest n for the ℤ/2ⁿ checks",
    )
    verify.add_argument(
        "--max-page",
        default=Options.default_value("max_page"),
        type=int,
        help="last Bockstein spectral sequence page",
    )
    verify.add_argument(
        "--suite",
        "-s",
        default=Options.default_value("suite"),
        choices=(*SUITES, "all"),
        help="invariant suite",
    )
    verify.add_argument(
        "--seed",
        default=Options.default_value("seed"),
        type=int,
        help="seed for random cochains",
    )
    verify.add_argument(
        "--pairs",
        default=Options.default_value("pairs"),
        type=int,
        help="random cochain pairs per degree",
    )

    namespace = parser.parse_args(args)

    # Parse sections as a comma separated list.
    if getattr(namespace, "sections", None) is not None:
        namespace.sections = [s.strip() for s in namespace.sections.split(",") if s.strip()]
    if getattr(namespace, "degrees", None) is not None:
        try:
            namespace.degrees = [
                int(k) for k in namespace.degrees.split(",") if k.strip()
            ]
        except ValueError:
            parser.error(f"--degrees must be integers, got {namespace.degrees!r}")

    try:
        return Options(**namespace.__dict__)
    except ValueError as exc:
        parser.error(str(exc))


def _verify_payload(
    complex_: SimplicialComplex, results: list[SuiteResult]
) -> dict[str, Any]:
    return {
        "tool": TOOL_NAME,
        "version": VERSION,
        "complex": {
            "name": complex_.name,
            "hash": complex_.content_hash,
            "dimension": complex_.dimension,
        },
        "suites": [result.to_json() for result in results],
        "passed": sum(result.passed for result in results),
        "failed": sum(result.failed for result in results),
        "status": "PASS" if all(result.ok for result in results) else "FAIL",
    }


def _render_verify(payload: dict[str, Any]) -> str:
    lines = [f"{payload['tool']} {payload['version']} {payload['complex']['name']}"]
    for suite in payload["suites"]:
        status = "PASS" if not suite["failed"] else "FAIL"
        lines.append(
            f"{status} {suite['suite']}: {suite['passed']} passed, {suite['failed']} failed"
        )
        if suite["first_failure"]:
            details = " ".join(
                f"{key}={value}" for key, value in sorted(suite["first_failure"].items())
            )
            lines.append(f"  first failure: {details}")
    lines.append(f"status {payload['status']}")
    return "\n".join(lines)


def _write(text: str) -> None:
    sys.stdout.write(text + "\n")
    sys.stdout.flush()


def run(options: Options) -> int:
    if options.command == "generate":
        assert options.kind is not None
        complex_ = generate_complex(options.kind, options.params)
        if options.out is None:
            _write(json.dumps(complex_.to_json()))
        else:
            dump_complex(complex_, options.out)
            logger.info(
                "Wrote {} ({} facets) to {}".format(
                    complex_.name, len(complex_.facets), options.out
                )
            )
        return EXIT_OK

    assert options.complex is not None
    complex_ = load_complex(options.complex)

    if options.command == "report":
        report = build_report(
            complex_,
            options.sections,
            n_max=options.n_max,
            max_page=options.max_page,
            degrees=options.degrees,
            workers=options.workers,
        )
        _write(render_pretty(report) if options.pretty else dumps(report))
        for assertion in report["assertions"]:
            if assertion["status"] == "FAIL":
                error_logger.error(
                    "Assertion %s/%s failed on %s",
                    assertion["section"],
                    assertion["name"],
                    complex_.name,
                )
        return EXIT_OK if report["status"] == "PASS" else EXIT_FAILURE

    results = run_suite(
        complex_,
        options.suite,
        seed=options.seed,
        pairs=options.pairs,
        n_max=options.n_max,
        max_page=options.max_page,
    )
    payload = _verify_payload(complex_, results)
    _write(
        _render_verify(payload)
        if options.pretty
        else json.dumps(payload, sort_keys=True, separators=(",", ":"))
    )
    for result in results:
        if result.first_failure is not None:
            error_logger.error(
                "Suite %s failed first at %s", result.suite, result.first_failure
            )
    return EXIT_OK if payload["status"] == "PASS" else EXIT_FAILURE


def main(options: Options) -> int:
    """
    Main entrypoint for running wulink; returns the process exit code.
    """
    options.configure_logging()

    try:
        return run(options)
    except InconsistencyError as exc:
        error_logger.error("Internal inconsistency: %s", exc)
        return EXIT_FAILURE
    except (ValueError, OSError) as exc:
        error_logger.error("%s", exc)
        return EXIT_USAGE
