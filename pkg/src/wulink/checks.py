"""
Invariant suites run by `wulink verify`. Each check is logged through the
`wulink.check` logger and counted into a SuiteResult.
"""

import dataclasses
import itertools
import math
import random
from typing import Callable

from .bss import boundaries, bss_page, cycles, differential, integral_differential
from .cochains import Cochain, coboundary, cup, cup_i, pullback, suspend
from .cohomology import (
    CohomologyClass,
    InconsistencyError,
    SesSpec,
    change_coeffs,
    cohomology,
    connecting,
    cup_classes,
)
from .complex import (
    Covering,
    SimplicialComplex,
    antipodal_cover,
    coboundary_matrices,
    lens_cover,
    suspension,
)
from .const import SUITES
from .duality import (
    NotPoincareDuality,
    ParityError,
    aux_pairing,
    computation_chain,
    duality_certificate,
    linking_form,
    sw_from_wu,
    theorem73_verdict,
    wu_lift_obstruction,
)
from .linalg import in_subgroup, subgroup_order
from .logger import log_check, logger
from .rings import ZZ, Zmod
from .steenrod import NotInKernelError, adem_terms, beta2, compose, gen_sq, sq

ELEMENT_LIMIT = 64

STABILITY_MAX_DIMENSION = 3

CHECK_RINGS = (Zmod(2), Zmod(4), Zmod(8))


@dataclasses.dataclass
class SuiteResult:
    suite: str
    complex_name: str
    passed: int = 0
    failed: int = 0
    first_failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "complex": self.complex_name,
            "passed": self.passed,
            "failed": self.failed,
            "first_failure": self.first_failure,
        }


class Checker:
    def __init__(self, suite: str, complex_: SimplicialComplex) -> None:
        self.complex = complex_
        self.result = SuiteResult(suite, complex_.name)

    def check(self, name: str, passed: bool, **context) -> bool:
        context = {"complex": self.complex.name, **context}
        log_check(self.result.suite, name, passed, context)
        if passed:
            self.result.passed += 1
        else:
            self.result.failed += 1
            if self.result.first_failure is None:
                self.result.first_failure = {"check": name, **context}
        return passed

    def guarded(self, name: str, compute: Callable[[], bool], **context) -> bool:
        """
        Run a check whose computation may itself detect an inconsistency.
        """
        try:
            passed = compute()
        except (InconsistencyError, NotPoincareDuality, NotInKernelError) as exc:
            context["error"] = str(exc)
            passed = False
        return self.check(name, passed, **context)


def _classes(complex_: SimplicialComplex, ring, degree: int) -> list[CohomologyClass]:
    return list(itertools.islice(cohomology(complex_, ring, degree).elements(), ELEMENT_LIMIT))


def _sum(classes, zero: CohomologyClass) -> CohomologyClass:
    total = zero
    for x in classes:
        total = total + x
    return total


def known_cover(complex_: SimplicialComplex) -> Covering | None:
    """
    The covering sphere or join of polygons when `complex_` is one of the
    generated quotients.
    """
    name = complex_.name
    cover = None
    if name == f"RP{complex_.dimension}":
        cover = antipodal_cover(complex_.dimension)
    elif name.startswith("L(") and name.endswith(")") and complex_.dimension == 3:
        try:
            p, q = (int(part) for part in name[2:-1].split(","))
            cover = lens_cover(p, q)
        except ValueError:
            return None
    if cover is None or cover.base.content_hash != complex_.content_hash:
        return None
    return cover


# Steenrod axioms and coefficient sequences


def _check_squares(checker: Checker, complex_: SimplicialComplex) -> None:
    ring = Zmod(2)
    dimension = complex_.dimension
    sq1 = SesSpec("D")
    for degree in range(dimension + 1):
        for x in _classes(complex_, ring, degree):
            context = {"degree": degree, "coords": x.coords}
            checker.check("sq0_identity", sq(0, x) == x, **context)
            checker.check("top_square", sq(degree, x) == cup_classes(x, x), **context)
            checker.check("vanishing", sq(degree + 1, x).is_zero(), **context)
            checker.check("sq1_bockstein", sq(1, x) == connecting(sq1, x), **context)
            for b in range(1, dimension - degree + 1):
                for a in range(1, min(2 * b, dimension - degree - b + 1)):
                    target = cohomology(complex_, ring, degree + a + b).zero()
                    expected = _sum((compose(pair, x) for pair in adem_terms(a, b)), target)
                    checker.check(
                        "adem", compose((a, b), x) == expected, a=a, b=b, **context
                    )


def _check_cartan(checker: Checker, complex_: SimplicialComplex) -> None:
    ring = Zmod(2)
    dimension = complex_.dimension
    generators = [
        g
        for degree in range(dimension + 1)
        for g in cohomology(complex_, ring, degree).generator_classes()
    ]
    for x, y in itertools.product(generators, repeat=2):
        if x.degree + y.degree > dimension:
            continue
        product = cup_classes(x, y)
        for i in range(product.degree + 1):
            zero = cohomology(complex_, ring, product.degree + i).zero()
            expected = _sum(
                (cup_classes(sq(j, x), sq(i - j, y)) for j in range(i + 1)), zero
            )
            checker.check(
                "cartan",
                sq(i, product) == expected,
                i=i,
                left=(x.degree, x.coords),
                right=(y.degree, y.coords),
            )


def _check_generalized_squares(checker: Checker, complex_: SimplicialComplex, n_max: int) -> None:
    mod2 = Zmod(2)
    for n in range(1, n_max + 1):
        ring = Zmod(2**n)
        sequence = SesSpec("C", n)
        for degree in range(complex_.dimension + 1):
            for x in _classes(complex_, ring, degree):
                reduced = change_coeffs(x, mod2)
                for i in range(degree + 1):
                    if i % 2 == 0:
                        expected = change_coeffs(sq(i, reduced), ring)
                        name = "even_square_factorization"
                    else:
                        expected = connecting(sequence, sq(i - 1, reduced))
                        name = "odd_square_factorization"
                    checker.check(
                        name, gen_sq(i, x) == expected, n=n, i=i, degree=degree, coords=x.coords
                    )


def _check_stability(checker: Checker, complex_: SimplicialComplex) -> None:
    suspended = suspension(complex_)
    for ring in (Zmod(2), Zmod(4), ZZ):
        for degree in range(complex_.dimension + 1):
            below = cohomology(complex_, ring, degree)
            above = cohomology(suspended, ring, degree + 1)
            free, torsion = below.free_rank, below.torsion_orders
            if degree == 0 and ring.is_integral:
                free -= 1
            elif degree == 0:
                torsion = torsion[1:]
            expected = (free, torsion)
            checker.check(
                "suspension_shift",
                (above.free_rank, above.torsion_orders) == expected,
                ring=str(ring),
                degree=degree,
            )

    ring = Zmod(2)
    for degree in range(1, complex_.dimension + 1):
        target = cohomology(suspended, ring, degree + 1)
        for x in cohomology(complex_, ring, degree).generator_classes():
            lifted = target.class_of(suspend(x.rep, suspended))
            checker.check("suspension_injective", not lifted.is_zero(), degree=degree, coords=x.coords)
            for i in range(degree + 1):
                image = sq(i, x)
                along = cohomology(suspended, ring, image.degree + 1).class_of(
                    suspend(image.rep, suspended)
                )
                checker.check(
                    "stability", sq(i, lifted) == along, i=i, degree=degree, coords=x.coords
                )


def _check_naturality(checker: Checker, cover: Covering) -> None:
    ring = Zmod(2)
    base, total = cover.base, cover.total
    for degree in range(base.dimension + 1):
        for x in cohomology(base, ring, degree).generator_classes():
            pulled = cohomology(total, ring, degree).class_of(
                pullback(x.rep, cover.vertex_map, total)
            )
            for i in range(degree + 1):
                image = sq(i, x)
                along = cohomology(total, ring, image.degree).class_of(
                    pullback(image.rep, cover.vertex_map, total)
                )
                checker.check(
                    "naturality", sq(i, pulled) == along, i=i, degree=degree, coords=x.coords
                )


def _check_coefficients(checker: Checker, complex_: SimplicialComplex, n_max: int) -> None:
    dimension = complex_.dimension
    for ring in (ZZ, Zmod(4)):
        checker.check(
            "delta_squared_zero",
            coboundary_matrices(complex_, ring).is_complex(),
            ring=str(ring),
        )
    betti = [cohomology(complex_, ZZ, k).free_rank for k in range(dimension + 1)]
    checker.check(
        "euler_characteristic",
        sum((-1) ** k * b for k, b in enumerate(betti)) == complex_.euler_characteristic,
        betti=betti,
    )

    for modulus in (2, 4):
        ring = Zmod(modulus)
        for degree in range(dimension + 1):
            here = cohomology(complex_, ZZ, degree)
            there = cohomology(complex_, ZZ, degree + 1)
            predicted = modulus**here.free_rank
            for t in here.torsion_orders + there.torsion_orders:
                predicted *= math.gcd(t, modulus)
            actual = cohomology(complex_, ring, degree).order
            checker.check(
                "universal_coefficients", actual == predicted, ring=str(ring), degree=degree
            )

    for n in range(1, n_max + 1):
        ring = Zmod(2**n)
        integral, bockstein = SesSpec("B", n), SesSpec("A", n)
        for degree in range(dimension + 1):
            group = cohomology(complex_, ring, degree)
            context = {"n": n, "degree": degree}
            for x in group.generator_classes():
                tilde = connecting(integral, x)
                beta = connecting(bockstein, x)
                checker.check(
                    "bockstein_is_reduced_integral",
                    beta == change_coeffs(tilde, ring),
                    coords=x.coords,
                    **context,
                )
                checker.check(
                    "bockstein_squared_zero",
                    connecting(bockstein, beta).is_zero(),
                    coords=x.coords,
                    **context,
                )
            reductions = [
                change_coeffs(g, ring).coords
                for g in cohomology(complex_, ZZ, degree).generator_classes()
            ]
            kernel = cycles(complex_, n, degree, 1) if group.rank else ()
            # ker β̃ and the image of reduction, compared by order and containment.
            exact = all(
                in_subgroup(group.orders, list(kernel), r) for r in reductions
            ) and subgroup_order(group.orders, list(kernel)) == subgroup_order(
                group.orders, reductions
            )
            checker.check("exact_at_quotient", exact, **context)


def axioms_suite(complex_: SimplicialComplex, *, n_max: int = 3, **_) -> SuiteResult:
    checker = Checker("axioms", complex_)
    _check_squares(checker, complex_)
    _check_cartan(checker, complex_)
    _check_generalized_squares(checker, complex_, n_max)
    if complex_.dimension <= STABILITY_MAX_DIMENSION:
        _check_stability(checker, complex_)
    cover = known_cover(complex_)
    if cover is not None:
        _check_naturality(checker, cover)
    _check_coefficients(checker, complex_, n_max)
    return checker.result


# Cochain-level identities


def _cup_i_or_zero(u: Cochain, v: Cochain, i: int) -> Cochain:
    if i < 0:
        return Cochain.zero(u.complex, u.degree + v.degree - i, u.ring)
    return cup_i(u, v, i)


def cup_i_coboundary_holds(u: Cochain, v: Cochain, i: int) -> bool:
    """
    δ(u ⌣ᵢ v) = (−1)ⁱ δu ⌣ᵢ v + (−1)^{i+p} u ⌣ᵢ δv − (−1)ⁱ u ⌣ᵢ₋₁ v − (−1)^{pq} v ⌣ᵢ₋₁ u
    """
    p, q = u.degree, v.degree
    sign = (-1) ** i
    left = coboundary(cup_i(u, v, i))
    right = (
        sign * cup_i(coboundary(u), v, i)
        + (sign * (-1) ** p) * cup_i(u, coboundary(v), i)
        - sign * _cup_i_or_zero(u, v, i - 1)
        - ((-1) ** (p * q)) * _cup_i_or_zero(v, u, i - 1)
    )
    return left == right


def leibniz_holds(u: Cochain, v: Cochain) -> bool:
    left = coboundary(cup(u, v))
    right = cup(coboundary(u), v) + ((-1) ** u.degree) * cup(u, coboundary(v))
    return left == right


def cochain_identities_suite(
    complex_: SimplicialComplex, *, seed: int = 0, pairs: int = 50, **_
) -> SuiteResult:
    checker = Checker("cochain-identities", complex_)
    dimension = complex_.dimension
    for ring in CHECK_RINGS:
        rng = random.Random(f"{seed}:{ring.modulus}")
        one = Cochain.constant(complex_, 0, ring)
        checker.check("unit_is_cocycle", coboundary(one).is_zero(), ring=str(ring))
        for degree in range(dimension + 1):
            for index in range(pairs):
                other = rng.randrange(dimension + 1)
                i = index % 5
                u = Cochain.random(complex_, degree, ring, rng)
                v = Cochain.random(complex_, other, ring, rng)
                context = {
                    "ring": str(ring),
                    "degrees": (degree, other),
                    "seed": seed,
                    "pair": index,
                }
                if index == 0:
                    checker.check("unit_is_neutral", cup(one, u) == u == cup(u, one), **context)
                checker.check("leibniz", leibniz_holds(u, v), **context)
                checker.check("cup_i_coboundary", cup_i_coboundary_holds(u, v, i), i=i, **context)
                if i == 0:
                    checker.check("cup_zero_is_cup", cup_i(u, v, 0) == cup(u, v), **context)
    return checker.result


# Pairings on odd-dimensional manifolds


def _max_two_exponent(complex_: SimplicialComplex, degree: int) -> int:
    orders = cohomology(complex_, ZZ, degree).torsion_orders
    exponents = [(o & -o).bit_length() - 1 for o in orders]
    return max(exponents, default=0)


def _check_middle_pairing(checker: Checker, complex_: SimplicialComplex, n: int) -> None:
    middle = (complex_.dimension - 1) // 2
    ring = Zmod(2**n)
    bockstein = SesSpec("A", n)
    pairing = aux_pairing(complex_, n)
    checker.check("skew_symmetric", pairing.is_skew_symmetric(), n=n, gram=pairing.gram)
    for g in cohomology(complex_, ring, complex_.dimension - 1).generator_classes():
        checker.check(
            "top_bockstein_vanishes", connecting(bockstein, g).is_zero(), n=n, coords=g.coords
        )
    for x in _classes(complex_, ring, middle):
        y = connecting(bockstein, x)
        checker.check(
            "cup_with_bockstein_is_square",
            cup_classes(x, y) == gen_sq(middle, y),
            n=n,
            coords=x.coords,
        )
    if pairing.is_alternating():

        def descends() -> bool:
            linking = linking_form(complex_, n)
            return all(linking.gram[i][i] == 0 for i in range(linking.size))

        checker.guarded("alternating_descends", descends, n=n)


def _check_beta2_identity(checker: Checker, complex_: SimplicialComplex, n: int) -> None:
    ring = Zmod(2**n)
    bockstein = SesSpec("A", n)
    for half in range(0, complex_.dimension // 4 + 1):
        degree = 2 * half
        if 2 * degree + 1 > complex_.dimension:
            break
        for x in _classes(complex_, ring, degree):
            y = connecting(bockstein, x)
            square = (2 ** (n - 1)) * cup_classes(x, x)
            expected = cup_classes(x, y) - gen_sq(degree, y)
            checker.guarded(
                "secondary_bockstein_of_square",
                lambda: beta2(square, n).contains(expected),
                n=n,
                degree=degree,
                coords=x.coords,
            )


def pairing_suite(complex_: SimplicialComplex, *, n_max: int = 3, **_) -> SuiteResult:
    if complex_.dimension % 2 == 0:
        raise ParityError(
            f"Pairing suite needs an odd-dimensional manifold, {complex_.name} has dimension {complex_.dimension}"
        )
    checker = Checker("pairing", complex_)
    middle = (complex_.dimension - 1) // 2
    for ring in [ZZ] + [Zmod(2**n) for n in range(1, n_max + 1)]:
        checker.guarded(
            "duality_certificate",
            lambda: duality_certificate(complex_, ring) is not None,
            ring=str(ring),
        )
    if not checker.result.ok:
        return checker.result

    for n in range(1, n_max + 1):
        checker.guarded(
            "linking_pipelines_agree", lambda: linking_form(complex_, n) is not None, n=n
        )
        if complex_.dimension % 4 == 1:
            _check_middle_pairing(checker, complex_, n)
            if n <= 2:
                _check_beta2_identity(checker, complex_, n)

    top = max(1, _max_two_exponent(complex_, middle + 1))
    form = linking_form(complex_, top)
    checker.check("linking_nondegenerate", form.is_nondegenerate(), n=top, gram=str(form.gram))
    if complex_.dimension % 4 == 3:
        checker.check("linking_symmetric", form.is_symmetric(), n=top)

    w = sw_from_wu(complex_)
    checker.check("wu_first", w.v1_equals_w1)
    checker.check("wu_second", w.v2_equals_w2_plus_w1_squared)
    return checker.result


# Bockstein spectral sequence


def _expected_length(complex_: SimplicialComplex, degree: int, n: int, r: int) -> int:
    # A ℤ/2ᵉ summand has lost min(e, n) − max(e − s, 0) of its ℤ/2ⁿ length by
    # s = nr; d_r takes what is lost between n(r−1) and nr.
    def killed(e: int, s: int) -> int:
        return max(0, min(e, n) - max(e - s, 0))

    total = 0
    for order in cohomology(complex_, ZZ, degree).torsion_orders:
        e = (order & -order).bit_length() - 1
        total += killed(e, n * r) - killed(e, n * (r - 1))
    return total


def _check_page(checker: Checker, complex_: SimplicialComplex, n: int, r: int) -> None:
    page = bss_page(complex_, n, r)
    dimension = complex_.dimension
    for degree in range(dimension + 1):
        piece = page.piece(degree)
        context = {"n": n, "r": r, "degree": degree}
        checker.check(
            "matches_integral_torsion",
            page.differential_length(degree) == _expected_length(complex_, degree + 1, n, r),
            **context,
        )
        if degree + 1 > dimension:
            continue
        target = page.piece(degree + 1)
        base = list(target.boundaries)
        for z, image in zip(piece.cycles, piece.differential):
            twice = differential(complex_, n, r, degree + 1, image)
            checker.check(
                "differential_squared_zero",
                degree + 2 > dimension
                or in_subgroup(page.piece(degree + 2).orders, list(boundaries(complex_, n, degree + 2, r - 1)), twice),
                cycle=z,
                **context,
            )
            if not in_subgroup(target.orders, base, image):
                order = integral_differential(complex_, n, r, degree, z).order()
                checker.check(
                    "differential_order",
                    2 ** (n * (r - 1)) < order and (2 ** (n * r)) % order == 0,
                    cycle=z,
                    order=order,
                    **context,
                )

        # ker d_r = Z_r and B_r = im d_r + B_{r−1}, by orders and containment.
        after = cycles(complex_, n, degree, r)
        checker.check(
            "kernel_is_next_cycles",
            all(in_subgroup(target.orders, base, differential(complex_, n, r, degree, z)) for z in after)
            and subgroup_order(piece.orders, list(piece.cycles)) * subgroup_order(target.orders, base)
            == subgroup_order(piece.orders, list(after))
            * subgroup_order(target.orders, base + list(piece.differential)),
            **context,
        )
        image = base + list(piece.differential)
        next_boundaries = list(boundaries(complex_, n, degree + 1, r))
        checker.check(
            "image_is_next_boundaries",
            all(in_subgroup(target.orders, next_boundaries, g) for g in image)
            and subgroup_order(target.orders, image)
            == subgroup_order(target.orders, next_boundaries),
            **context,
        )


def _check_second_differential(checker: Checker, complex_: SimplicialComplex, n: int) -> None:
    ring = Zmod(2**n)
    bockstein = SesSpec("A", n)
    for half in range(0, complex_.dimension // 4 + 1):
        degree = 2 * half
        if 2 * degree + 1 > complex_.dimension:
            break
        base = list(boundaries(complex_, n, 2 * degree + 1, 1))
        target = cohomology(complex_, ring, 2 * degree + 1)
        for x in _classes(complex_, ring, degree):
            y = connecting(bockstein, x)
            square = (2 ** (n - 1)) * cup_classes(x, x)
            image = target.element(differential(complex_, n, 2, 2 * degree, square.coords))
            expected = cup_classes(x, y) + gen_sq(degree, y)
            checker.check(
                "second_differential_of_square",
                in_subgroup(target.orders, base, (image - expected).coords),
                n=n,
                degree=degree,
                coords=x.coords,
            )


def bss_suite(complex_: SimplicialComplex, *, max_page: int = 4, **_) -> SuiteResult:
    checker = Checker("bss", complex_)
    for n in (1, 2):
        for r in range(1, max_page + 1):
            _check_page(checker, complex_, n, r)
        _check_second_differential(checker, complex_, n)
    return checker.result


# The lifting criterion


def theorem73_suite(complex_: SimplicialComplex, *, n_max: int = 3, **_) -> SuiteResult:
    checker = Checker("theorem73", complex_)
    checker.guarded(
        "verdict", lambda: theorem73_verdict(complex_, n_max).consistent, n_max=n_max
    )
    for n in range(1, n_max + 1):
        lift = wu_lift_obstruction(complex_, n)
        checker.check(
            "finite_obstruction_is_reduced",
            lift.finite_bockstein == change_coeffs(lift.integral_bockstein, Zmod(2**n)),
            n=n,
        )
        if lift.lifts:
            checker.check("lift_kills_finite_obstruction", lift.finite_bockstein.is_zero(), n=n)
        for coords, name, holds in computation_chain(complex_, n):
            checker.check(name, holds, n=n, coords=coords)
    return checker.result


SUITE_FUNCTIONS: dict[str, Callable[..., SuiteResult]] = {
    "axioms": axioms_suite,
    "cochain-identities": cochain_identities_suite,
    "pairing": pairing_suite,
    "bss": bss_suite,
    "theorem73": theorem73_suite,
}


def applicable_suites(complex_: SimplicialComplex) -> tuple[str, ...]:
    dimension = complex_.dimension
    result = []
    for suite in SUITES:
        if suite == "pairing" and dimension % 2 == 0:
            continue
        if suite == "theorem73" and dimension % 4 != 1:
            continue
        result.append(suite)
    return tuple(result)


def run_suite(
    complex_: SimplicialComplex,
    suite: str,
    *,
    seed: int = 0,
    pairs: int = 50,
    n_max: int = 3,
    max_page: int = 4,
) -> list[SuiteResult]:
    if suite == "all":
        names = applicable_suites(complex_)
    elif suite in SUITE_FUNCTIONS:
        names = (suite,)
    else:
        raise ValueError(f"Unknown suite {suite!r}")
    results = []
    for name in names:
        logger.info("Running suite %s on %s", name, complex_.name)
        result = SUITE_FUNCTIONS[name](
            complex_, seed=seed, pairs=pairs, n_max=n_max, max_page=max_page
        )
        logger.info(
            "Suite %s on %s: %d passed, %d failed",
            name,
            complex_.name,
            result.passed,
            result.failed,
        )
        results.append(result)
    return results
