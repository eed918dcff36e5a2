from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from types import TracebackType
from typing import Any, Union

from .cohomology import (
    DEFAULT_LOW_DEGREE_ORDER_CAP,
    DEFAULT_MAX_DEGREE,
    DEFAULT_MEMORY_LIMIT,
    cohomology_dims,
    realization_cohomology,
    verify_complex,
)
from .cohomology import DEFAULT_ORDER_CAP as DEFAULT_COHOMOLOGY_ORDER_CAP
from .exceptions import InvalidSpecException
from .forms import (
    SpinCountQuery,
    matching_signatures,
    o_components,
    so_assumption_holds,
    so_components,
    spin_comparison,
    spin_invariant_rank,
    witt_rank,
)
from .galois import (
    character_components,
    h1,
    inner_class_cardinalities,
    make_character,
    realize_diagonal_form,
    strong_involutions,
    twisting_bijection_check,
    two_torsion_characters,
)
from .groups import DEFAULT_ORDER_CAP, FiniteGroupWithInvolution, load_group, make_subgroup
from .matrices import run_case
from .selftest import run_selftest
from .stacks import (
    DEFAULT_OBJECT_CAP,
    EquivariantAction,
    compare_groupoids,
    fixed_point_groupoid,
    induced_action,
    load_action,
    point_action,
    quotient_action,
)

logger = logging.getLogger("realforms.RealForms")

GroupSource = Union[str, dict[str, Any], FiniteGroupWithInvolution]
ActionSource = Union[str, dict[str, Any], EquivariantAction]


class RealForms:
    """Components and stabilizers of real realizations of classifying spaces and quotient stacks."""

    _executor: ThreadPoolExecutor = ThreadPoolExecutor()

    def __init__(
        self,
        order_cap: int = DEFAULT_ORDER_CAP,
        cohomology_order_cap: int = DEFAULT_COHOMOLOGY_ORDER_CAP,
        cohomology_low_degree_cap: int = DEFAULT_LOW_DEGREE_ORDER_CAP,
        max_degree: int = DEFAULT_MAX_DEGREE,
        object_cap: int = DEFAULT_OBJECT_CAP,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
        max_workers: int | None = None,
    ) -> None:
        """Initialize the RealForms object.

        Args:
            order_cap: largest group order accepted when loading groups. Defaults to 5000.
            cohomology_order_cap: largest stabilizer order for cohomology in degree >= 4. Defaults to 24.
            cohomology_low_degree_cap: largest stabilizer order for cohomology in degree <= 3. Defaults to 64.
            max_degree: largest cohomological degree. Defaults to 6.
            object_cap: largest |G| * |X| scanned for fixed-point groupoids. Defaults to 1_000_000.
            memory_limit: bytes a single cohomology run may use. Defaults to 2 GiB.
            max_workers: worker threads for a private executor; None shares the class executor.
        """
        caps = {
            "order_cap": order_cap,
            "cohomology_order_cap": cohomology_order_cap,
            "cohomology_low_degree_cap": cohomology_low_degree_cap,
            "max_degree": max_degree,
            "object_cap": object_cap,
            "memory_limit": memory_limit,
        }
        for name, value in caps.items():
            if not isinstance(value, int) or value < 1:
                raise InvalidSpecException(f"{name} must be a positive integer, got {value!r}")
        self.order_cap = order_cap
        self.cohomology_order_cap = cohomology_order_cap
        self.cohomology_low_degree_cap = cohomology_low_degree_cap
        self.max_degree = max_degree
        self.object_cap = object_cap
        self.memory_limit = memory_limit
        self._own_executor = ThreadPoolExecutor(max_workers=max_workers) if max_workers else None

    def __enter__(self) -> RealForms:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None = None,
        exc_val: BaseException | None = None,
        exc_tb: TracebackType | None = None,
    ) -> None:
        if self._own_executor is not None:
            self._own_executor.shutdown(wait=True)

    @property
    def executor(self) -> ThreadPoolExecutor:
        return self._own_executor or self._executor

    def group(self, source: GroupSource) -> FiniteGroupWithInvolution:
        """Load a group from a document, builtin shorthand or path, honouring order_cap."""
        if isinstance(source, FiniteGroupWithInvolution):
            return source
        return load_group(source, self.order_cap)

    def action(self, source: ActionSource) -> EquivariantAction:
        if isinstance(source, EquivariantAction):
            return source
        return load_action(source, self.order_cap)

    def h1(self, group: GroupSource) -> dict[str, Any]:
        """H^1(C2, G) as twisted-conjugacy classes with their stabilizers K_g.

        Returns:
            Report with count, stabilizer orders, exact mass and one entry per class.
        """
        return h1(self.group(group)).to_dict()

    def components(self, group: GroupSource) -> list[dict[str, Any]]:
        """One record per component B(K_g) of the real realization of BG."""
        report = h1(self.group(group))
        return [
            {
                "representative": c.representative,
                "label": report.group.label(c.representative),
                "orbit_size": c.orbit_size,
                "stabilizer_order": c.stabilizer_order,
                "stabilizer_shape": d["stabilizer_shape"],
            }
            for c, d in zip(report.classes, report.to_dict()["classes"])
        ]

    def witt_invariant_rank(self, group: GroupSource) -> int:
        return h1(self.group(group)).count

    def strong_involutions(self, group: GroupSource) -> dict[str, Any]:
        return strong_involutions(self.group(group)).to_dict()

    def twist_check(self, group: GroupSource, g0: int | None = None) -> list[dict[str, Any]]:
        """Twisting bijection for one cocycle g0, or for every cocycle when g0 is None."""
        g = self.group(group)
        if g0 is not None:
            return [twisting_bijection_check(g, g0).to_dict()]
        cocycles = [c for cls in h1(g).classes for c in cls.orbit]
        return [r.to_dict() for r in self.executor.map(lambda c: twisting_bijection_check(g, c), sorted(cocycles))]

    def characters(self, group: GroupSource) -> list[list[int]]:
        """Every sigma-equivariant +-1 character, trivial first."""
        return [list(chi.values) for chi in two_torsion_characters(self.group(group))]

    def character(self, group: GroupSource, values: Sequence[Sequence[int]]) -> dict[str, Any]:
        """Restriction of each character to each stabilizer, plus the realized diagonal form.

        Raises:
            NotACharacterException: values do not define a +-1 homomorphism.
            NotEquivariantException: a character is not sigma-invariant.
        """
        g = self.group(group)
        characters = [make_character(g, v) for v in values]
        return {
            "characters": [
                {"values": list(chi.values), "components": [c.to_dict() for c in character_components(g, chi)]}
                for chi in characters
            ],
            "realized_forms": [
                {"representative": rep, **form.to_dict()} for rep, form in realize_diagonal_form(g, characters)
            ],
        }

    def inner_forms(self, group: GroupSource) -> dict[str, Any]:
        """|H^1| for each strong inner twist; reports whether it varies across the inner class."""
        g = self.group(group)
        counts = inner_class_cardinalities(g)
        return {
            "group": g.name,
            "twists": [
                {
                    "representative": c.representative,
                    "label": g.label(c.representative),
                    "central_invariant": c.central_invariant,
                    "h1_count": c.h1_count,
                }
                for c in counts
            ],
            "varies": len({c.h1_count for c in counts}) > 1,
        }

    def stack(self, action: ActionSource) -> dict[str, Any]:
        return fixed_point_groupoid(self.action(action), self.object_cap).to_dict()

    def induce(self, group: GroupSource, members: Sequence[int], action: ActionSource | None = None) -> dict[str, Any]:
        """Induce an action of H (the point when omitted) up to G and compare fixed-point groupoids."""
        g = self.group(group)
        subgroup = make_subgroup(g, members)
        base = self.action(action) if action is not None else point_action(subgroup.to_group())
        induced = induced_action(g, subgroup, base)
        comparison = compare_groupoids(
            fixed_point_groupoid(base, self.object_cap), fixed_point_groupoid(induced, self.object_cap)
        )
        return {"action": induced.to_dict(), "comparison": comparison.to_dict()}

    def quotient(self, action: ActionSource, members: Sequence[int]) -> dict[str, Any]:
        a = self.action(action)
        result = quotient_action(a, make_subgroup(a.group, members))
        comparison = compare_groupoids(
            fixed_point_groupoid(a, self.object_cap), fixed_point_groupoid(result, self.object_cap)
        )
        return {"action": result.to_dict(), "comparison": comparison.to_dict()}

    def compare(self, first: ActionSource, second: ActionSource) -> dict[str, Any]:
        reports = list(self.executor.map(lambda a: fixed_point_groupoid(self.action(a), self.object_cap),
                                         (first, second)))
        return compare_groupoids(*reports).to_dict()

    def forms_o(self, n: int) -> list[dict[str, Any]]:
        return [c.to_dict() for c in o_components(n)]

    def forms_so(self, p: int, q: int) -> dict[str, Any]:
        return {
            "p": p,
            "q": q,
            "assumption_holds": so_assumption_holds(p, q),
            "components": [c.to_dict() for c in so_components(p, q)],
        }

    def forms_match(self, n: int, disc_sign: int, hasse_sign: int) -> list[dict[str, Any]]:
        return [c.to_dict() for c in matching_signatures(n, disc_sign, hasse_sign)]

    def spin(self, parity: str, n: int, compare: bool = False) -> dict[str, Any]:
        query = SpinCountQuery(parity, n)  # type: ignore[arg-type]
        if compare:
            return spin_comparison(query)
        return {"parity": parity, "n": n, "invariant_rank": spin_invariant_rank(query)}

    def witt_rank(self, kind: str, params: Sequence[int] = ()) -> int:
        return witt_rank(kind, tuple(params))

    def witness(self, case: str) -> dict[str, Any]:
        return run_case(case).to_dict()

    def cohomology(self, group: GroupSource, kmax: int = 4, verify: bool = False) -> dict[str, Any]:
        """dim H^k(BG; F2) for k <= kmax, optionally with the d o d = 0 check per degree."""
        g = self.group(group)
        profile = cohomology_dims(
            g, kmax, self.cohomology_order_cap, self.cohomology_low_degree_cap, self.max_degree, self.memory_limit
        )
        result = profile.to_dict()
        if verify:
            result["complex_ok"] = verify_complex(g, kmax, self.memory_limit)
        return result

    def realization_cohomology(self, source: GroupSource | ActionSource, kmax: int = 4) -> dict[str, Any]:
        """F2 Betti numbers of the real realization, summed over components computed in parallel.

        A document with an "action" or "points" entry (or an EquivariantAction) is read as an action;
        anything else is read as a group.
        """
        target: FiniteGroupWithInvolution | EquivariantAction
        if isinstance(source, (EquivariantAction, FiniteGroupWithInvolution)):
            target = source
        elif isinstance(source, dict) and ("action" in source or "points" in source):
            target = self.action(source)
        else:
            target = self.group(source)
        return realization_cohomology(
            target,
            kmax,
            self.cohomology_order_cap,
            self.cohomology_low_degree_cap,
            self.max_degree,
            self.memory_limit,
            self.object_cap,
            map_fn=self.executor.map,
        ).to_dict()

    def selftest(self) -> list[dict[str, Any]]:
        rows = [r.to_dict() for r in run_selftest(map_fn=self.executor.map)]
        logger.debug(f"selftest() passed={sum(r['passed'] for r in rows)}/{len(rows)}")
        return rows
