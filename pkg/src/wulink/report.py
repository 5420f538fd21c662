"""
Report assembly: every section is computed independently, then assembled in
the fixed order of `SECTIONS` and serialized as canonical JSON.
"""

import json
import time
from typing import Any, Callable, Sequence

from .bss import bss_pages
from .cohomology import cohomology, cup_classes
from .complex import SimplicialComplex
from .const import SECTIONS, TOOL_NAME, VERSION
from .duality import (
    ParityError,
    aux_pairing,
    linking_form,
    sw_from_wu,
    theorem73_verdict,
    wu_classes,
    wu_lift_obstruction,
)
from .logger import logger
from .parallel import Job, run_ordered
from .rings import ZZ, Zmod
from .steenrod import sq

Assertion = tuple[str, bool]
SectionResult = tuple[dict[str, Any], list[Assertion]]
Degrees = tuple[int, ...] | None


def _selected(complex_: SimplicialComplex, degrees: Degrees) -> list[int]:
    every = range(complex_.dimension + 1)
    if degrees is None:
        return list(every)
    return [k for k in every if k in degrees]


def cohomology_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    rings = [ZZ] + [Zmod(2**n) for n in range(1, n_max + 1)]
    payload = {
        str(ring): [
            cohomology(complex_, ring, k).to_json() for k in _selected(complex_, degrees)
        ]
        for ring in rings
    }
    euler = sum(
        (-1) ** k * cohomology(complex_, ZZ, k).free_rank
        for k in range(complex_.dimension + 1)
    )
    payload["euler_characteristic"] = euler
    return payload, [("euler_characteristic", euler == complex_.euler_characteristic)]


def steenrod_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    ring = Zmod(2)
    table = []
    identity = True
    top = True
    for k in _selected(complex_, degrees):
        group = cohomology(complex_, ring, k)
        for index, g in enumerate(group.generator_classes()):
            squares = {}
            for i in range(k + 1):
                if k + i > complex_.dimension:
                    break
                squares[str(i)] = list(sq(i, g).coords)
            identity = identity and squares["0"] == list(g.coords)
            if 2 * k <= complex_.dimension:
                top = top and squares[str(k)] == list(cup_classes(g, g).coords)
            table.append({"degree": k, "generator": group.label(index), "squares": squares})
    return {"table": table}, [("sq0_is_identity", identity), ("top_square_is_cup_square", top)]


def bss_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    pages = bss_pages(complex_, 1, max_page)
    free = [cohomology(complex_, ZZ, k).free_rank for k in range(complex_.dimension + 1)]
    first = [
        (cohomology(complex_, Zmod(2), k).order or 1).bit_length() - 1
        for k in range(complex_.dimension + 1)
    ]
    assertions = [
        ("first_page_is_mod_two_cohomology", [p.length for p in pages[0].pieces] == first)
    ]
    if len(pages) < max_page:
        # Stopped early, so the last page is already E_∞.
        assertions.append(
            ("converges_to_free_part", [p.length for p in pages[-1].pieces] == free)
        )
    return {"n": 1, "pages": [page.to_json() for page in pages]}, assertions


def pairing_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    payload: dict[str, Any] = {"linking": [], "aux": []}
    assertions: list[Assertion] = []
    for n in range(1, n_max + 1):
        linking = linking_form(complex_, n)
        payload["linking"].append(linking.to_json())
        if complex_.dimension % 4 == 3:
            assertions.append((f"linking_symmetric_{n}", linking.is_symmetric()))
        else:
            aux = aux_pairing(complex_, n)
            payload["aux"].append(aux.to_json())
            assertions.append((f"aux_skew_symmetric_{n}", aux.is_skew_symmetric()))
            if aux.is_alternating():
                assertions.append(
                    (
                        f"linking_diagonal_vanishes_{n}",
                        all(linking.gram[i][i] == 0 for i in range(linking.size)),
                    )
                )
    return payload, assertions


def wu_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    v = wu_classes(complex_)
    w = sw_from_wu(complex_)
    payload: dict[str, Any] = {
        "v": v.label(),
        "w": w.label(),
        "v1_equals_w1": w.v1_equals_w1,
        "v2_equals_w2_plus_w1_squared": w.v2_equals_w2_plus_w1_squared,
    }
    if complex_.dimension % 2 == 1:
        lifts = [wu_lift_obstruction(complex_, n) for n in range(1, n_max + 1)]
        payload["obstruction"] = [lift.to_json() for lift in lifts]
        payload["lifts"] = lifts[0].lifts
    return payload, [
        ("v1_equals_w1", w.v1_equals_w1),
        ("v2_equals_w2_plus_w1_squared", w.v2_equals_w2_plus_w1_squared),
    ]


def verdict_section(
    complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    if complex_.dimension % 2 == 0:
        raise ParityError(
            f"{complex_.name} has even dimension {complex_.dimension}, no verdict"
        )
    if complex_.dimension % 4 == 3:
        return {"status": "ABSTAIN", "dimension": complex_.dimension}, []
    verdict = theorem73_verdict(complex_, n_max)
    return verdict.to_json(), [("verdict_consistent", verdict.consistent)]


SECTION_FUNCTIONS: dict[
    str, Callable[[SimplicialComplex, int, int, Degrees], SectionResult]
] = {
    "cohomology": cohomology_section,
    "steenrod": steenrod_section,
    "bss": bss_section,
    "pairing": pairing_section,
    "wu": wu_section,
    "verdict": verdict_section,
}


def default_sections(complex_: SimplicialComplex) -> tuple[str, ...]:
    if complex_.dimension % 2 == 0:
        return tuple(s for s in SECTIONS if s not in ("pairing", "verdict"))
    return SECTIONS


def _timed_section(
    name: str, complex_: SimplicialComplex, n_max: int, max_page: int, degrees: Degrees
) -> SectionResult:
    start = time.perf_counter()
    result = SECTION_FUNCTIONS[name](complex_, n_max, max_page, degrees)
    logger.info(
        "Section {} of {} finished in {:.2f}s".format(
            name, complex_.name, time.perf_counter() - start
        )
    )
    return result


def build_report(
    complex_: SimplicialComplex,
    sections: Sequence[str] | None = None,
    *,
    n_max: int = 3,
    max_page: int = 4,
    degrees: Sequence[int] | None = None,
    workers: int = 0,
) -> dict[str, Any]:
    """
    `degrees` restricts the cohomology and Steenrod tables; other sections
    always cover every degree.
    """
    if sections is None:
        sections = default_sections(complex_)
    unknown = [s for s in sections if s not in SECTION_FUNCTIONS]
    if unknown:
        raise ValueError(f"Unknown sections: {', '.join(unknown)}")
    ordered = [s for s in SECTIONS if s in sections]
    selected = None if degrees is None else tuple(degrees)
    results = run_ordered(
        [
            Job(_timed_section, name, complex_, n_max, max_page, selected)
            for name in ordered
        ],
        workers,
    )
    assertions = [
        {"section": name, "name": assertion, "status": "PASS" if passed else "FAIL"}
        for name, (_, checks) in zip(ordered, results)
        for assertion, passed in checks
    ]
    return {
        "tool": TOOL_NAME,
        "version": VERSION,
        "complex": {
            "name": complex_.name,
            "hash": complex_.content_hash,
            "dimension": complex_.dimension,
            "f_vector": list(complex_.f_vector),
        },
        "sections": {name: payload for name, (payload, _) in zip(ordered, results)},
        "assertions": assertions,
        "status": "PASS"
        if all(a["status"] == "PASS" for a in assertions)
        else "FAIL",
    }


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _render_value(value: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item and not _is_flat(item):
                lines.append(f"{pad}{key}:")
                _render_value(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_inline(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and not _is_flat(item):
                lines.append(f"{pad}-")
                _render_value(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_inline(item)}")
    else:
        lines.append(f"{pad}{_inline(value)}")


def _is_flat(value: Any) -> bool:
    # Lists of scalars, or of lists of scalars (Gram rows), render on one line.
    if isinstance(value, dict):
        return False
    return all(
        not isinstance(item, dict)
        and (not isinstance(item, list) or _is_flat(item))
        for item in value
    )


def _inline(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_inline(item) for item in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_pretty(report: dict[str, Any]) -> str:
    """
    Human readable rendering of the same payload.
    """
    info = report["complex"]
    lines = [
        f"{report['tool']} {report['version']}",
        f"complex {info['name']} (dimension {info['dimension']}, "
        f"f-vector {' '.join(map(str, info['f_vector']))})",
        f"hash {info['hash']}",
    ]
    for name, payload in report["sections"].items():
        lines.append("")
        lines.append(f"[{name}]")
        _render_value(payload, 1, lines)
    if report["assertions"]:
        lines.append("")
        for assertion in report["assertions"]:
            lines.append(
                f"{assertion['status']} {assertion['section']} {assertion['name']}"
            )
    lines.append("")
    lines.append(f"status {report['status']}")
    return "\n".join(lines)
