"""Bundled corpus of known results, run by `realforms selftest`."""

from __future__ import annotations

import logging
import re
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from .cohomology import MapFn, cohomology_dims, realization_cohomology, verify_complex
from .exceptions import InvalidSpecException, RealFormsException
from .forms import SpinCountQuery, o_components, spin_invariant_rank
from .galois import cocycles, h1, strong_involutions, twisting_bijection_check
from .groups import center, load_group, make_subgroup, mod2_abelianization_rank
from .matrices import CASES, run_case
from .stacks import (
    compare_groupoids,
    fixed_point_groupoid,
    induced_action,
    point_action,
    quotient_action,
    regular_action,
)

logger = logging.getLogger(__name__)

SPIN_ODD = [1, 1, 3, 4, 3, 3, 5, 6]
SPIN_EVEN = [1, 1, 1, 5, 3, 3, 3, 7]
# area/result, lowercase, e.g. "galois/twisting" or "witness/o11"
SOURCE_PATTERN = re.compile(r"[a-z][a-z0-9-]*(/[a-z0-9][a-z0-9-]*)+")


@dataclass(frozen=True)
class Claim:
    claim: str
    source: str
    expected: Any
    compute: Callable[[], Any]

    def __post_init__(self) -> None:
        if not SOURCE_PATTERN.fullmatch(self.source):
            raise InvalidSpecException(f"claim {self.claim!r} has a malformed source key {self.source!r}")


@dataclass(frozen=True)
class ClaimResult:
    claim: str
    source: str
    expected: Any
    actual: Any
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim": self.claim,
            "source": self.source,
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
        }


def _stabilizer_orders(spec: str) -> list[int]:
    return [c.stabilizer_order for c in h1(load_group(spec)).classes]


def _twisting_all(spec: str) -> bool:
    group = load_group(spec)
    return all(twisting_bijection_check(group, g0).ok for g0 in cocycles(group))


def _strong_matches_h1(spec: str) -> bool:
    group = load_group(spec)
    strong = [c.representative for c in strong_involutions(group).trivial_invariant_classes()]
    return strong == [c.representative for c in h1(group).classes]


def _point_matches_h1(spec: str) -> bool:
    group = load_group(spec)
    report = fixed_point_groupoid(point_action(group))
    return [(c.representative[0], c.automorphisms.members) for c in report.components] == [
        (c.representative, c.stabilizer.members) for c in h1(group).classes
    ]


def _induction_from_center(spec: str) -> bool:
    group = load_group(spec)
    z = center(group)
    action = point_action(z.to_group())
    return compare_groupoids(
        fixed_point_groupoid(action), fixed_point_groupoid(induced_action(group, z, action))
    ).equivalent


def _quotient_of_regular(spec: str, members: list[int]) -> bool:
    action = regular_action(load_group(spec))
    n = make_subgroup(action.group, members)
    return compare_groupoids(fixed_point_groupoid(action), fixed_point_groupoid(quotient_action(action, n))).equivalent


def _abelianization_matches(spec: str) -> bool:
    group = load_group(spec)
    return cohomology_dims(group, 1).dims[1] == mod2_abelianization_rank(group)


def _claims() -> list[Claim]:
    claims = [
        Claim("C2 trivial involution: stabilizer orders of H^1", "realization/mu2", [2, 2],
              lambda: _stabilizer_orders("builtin:cyclic:2")),
        Claim("C2 trivial involution: F2 Betti numbers of the realization to degree 4", "realization/mu2",
              [2, 2, 2, 2, 2], lambda: list(realization_cohomology(load_group("builtin:cyclic:2"), 4).dims)),
    ]
    for n in (3, 5, 7):
        claims.append(Claim(f"C{n} with inversion: one class, trivial stabilizer", "realization/mu-n", [1],
                            lambda n=n: _stabilizer_orders(f"builtin:cyclic:{n}:inversion")))
    for n in (4, 6, 8):
        claims.append(Claim(f"C{n} with inversion: two classes with stabilizers of order 2", "realization/mu-n",
                            [2, 2], lambda n=n: _stabilizer_orders(f"builtin:cyclic:{n}:inversion")))
    for n in (1, 2, 3, 4):
        claims.append(Claim(f"C{2 * n} trivial involution: two classes, full stabilizers", "realization/cyclic-2n",
                            [2 * n, 2 * n], lambda n=n: _stabilizer_orders(f"builtin:cyclic:{2 * n}")))
    claims += [
        Claim("D8 trivial involution: conjugacy classes of involutions", "realization/involution-classes", 4,
              lambda: h1(load_group("builtin:dihedral:8")).count),
        Claim("Q8 trivial involution: conjugacy classes of involutions", "realization/involution-classes", 2,
              lambda: h1(load_group("builtin:quaternion:8")).count),
        Claim("O(n) realization has n+1 components for n <= 10", "orthogonal/signatures", list(range(2, 12)),
              lambda: [len(o_components(n)) for n in range(1, 11)]),
        Claim("O(2) components are the signatures (2,0), (1,1), (0,2)", "orthogonal/signatures",
              [[2, 0], [1, 1], [0, 2]], lambda: [[c.p, c.q] for c in o_components(2)]),
        Claim("Spin(n, n+1) invariant ranks for n = 1..8", "spin/closed-form", SPIN_ODD,
              lambda: [spin_invariant_rank(SpinCountQuery("odd", n)) for n in range(1, 9)]),
        Claim("Spin(n, n) invariant ranks for n = 1..8", "spin/closed-form", SPIN_EVEN,
              lambda: [spin_invariant_rank(SpinCountQuery("even", n)) for n in range(1, 9)]),
    ]
    for case in CASES:
        claims.append(Claim(f"witness suite {case} passes", f"witness/{case}", True,
                            lambda case=case: run_case(case).passed))
    for spec in ("builtin:dihedral:8", "builtin:quaternion:8", "builtin:cyclic:6:inversion", "builtin:symmetric:3"):
        claims += [
            Claim(f"{spec}: twisting bijection for every cocycle", "galois/twisting", True,
                  lambda spec=spec: _twisting_all(spec)),
            Claim(f"{spec}: strong involutions with trivial invariant match H^1", "galois/strong-involutions", True,
                  lambda spec=spec: _strong_matches_h1(spec)),
            Claim(f"{spec}: fixed-point groupoid of a point matches H^1", "groupoids/point", True,
                  lambda spec=spec: _point_matches_h1(spec)),
        ]
    claims += [
        Claim("D8: induction from the center is an equivalence", "groupoids/induction", True,
              lambda: _induction_from_center("builtin:dihedral:8")),
        Claim("C4 regular action modulo the order-2 subgroup is an equivalence", "groupoids/quotient", True,
              lambda: _quotient_of_regular("builtin:cyclic:4", [0, 2])),
        Claim("C2 F2 cohomology through degree 5", "cohomology/known-groups", [1, 1, 1, 1, 1, 1],
              lambda: list(cohomology_dims(load_group("builtin:cyclic:2"), 5).dims)),
        Claim("C3 F2 cohomology vanishes in positive degrees", "cohomology/known-groups", [1, 0, 0, 0, 0],
              lambda: list(cohomology_dims(load_group("builtin:cyclic:3"), 4).dims)),
        Claim("C2xC2 F2 cohomology has dimension k+1 in degree k", "cohomology/known-groups", [1, 2, 3, 4, 5],
              lambda: list(cohomology_dims(load_group("builtin:dihedral:4"), 4).dims)),
        Claim("bar complexes of Q8 square to zero", "cohomology/complex", True,
              lambda: all(verify_complex(load_group("builtin:quaternion:8"), 3).values())),
    ]
    for spec in ("builtin:cyclic:2", "builtin:cyclic:3", "builtin:cyclic:4", "builtin:dihedral:4",
                 "builtin:dihedral:8", "builtin:quaternion:8"):
        claims.append(Claim(f"{spec}: dim H^1 equals the mod-2 abelianization rank", "cohomology/abelianization", True,
                            lambda spec=spec: _abelianization_matches(spec)))
    return claims


def _evaluate(claim: Claim) -> ClaimResult:
    try:
        actual = claim.compute()
    except RealFormsException as ex:
        actual = f"{type(ex).__name__}: {ex}"
    return ClaimResult(claim.claim, claim.source, claim.expected, actual, actual == claim.expected)


def run_selftest(map_fn: MapFn = map) -> list[ClaimResult]:
    """Evaluate every bundled claim; rows come back in corpus order."""
    results = list(map_fn(_evaluate, _claims()))
    logger.debug(f"run_selftest() claims={len(results)} failed={sum(not r.passed for r in results)}")
    return results
