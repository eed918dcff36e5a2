"""Nonabelian Galois cohomology H^1(C2, G) of a finite group with involution.

The twisted conjugation is h.g = sigma(h) g h^-1; its orbits on the cocycles
Z^1 = {g : g sigma(g) = 1} are the classes of H^1 and the stabilizer of g is
K_g = {h : sigma(h) g = g h}, the fixed group of sigma_g = int(g) o sigma.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .exceptions import (
    NotACharacterException,
    NotACocycleException,
    NotAStrongInvolutionException,
    NotEquivariantException,
)
from .forms import SignatureClass, classify_form
from .groups import (
    FiniteGroupWithInvolution,
    Subgroup,
    center,
    coset_projection,
    element_orders,
    subgroup_generated,
)
from .utils import histogram_items

logger = logging.getLogger(__name__)


def describe_shape(order: int, histogram: dict[int, int]) -> str | None:
    """Name small groups from their order and element-order histogram, when that determines them."""
    if order == 1:
        return "1"
    if histogram.get(order):
        return f"C{order}"
    if order == 4:
        return "C2xC2"
    known = {
        (8, ((1, 1), (2, 7))): "C2xC2xC2",
        (8, ((1, 1), (2, 3), (4, 4))): "C4xC2",
        (8, ((1, 1), (2, 5), (4, 2))): "D8",
        (8, ((1, 1), (2, 1), (4, 6))): "Q8",
        (6, ((1, 1), (2, 3), (3, 2))): "S3",
    }
    return known.get((order, tuple(sorted(histogram.items()))))


@dataclass(frozen=True)
class CocycleClass:
    """One class of H^1(C2, G): least representative, orbit and stabilizer K_g."""

    representative: int
    orbit: tuple[int, ...]
    stabilizer: Subgroup
    histogram: dict[int, int] = field(compare=False)

    @property
    def orbit_size(self) -> int:
        return len(self.orbit)

    @property
    def stabilizer_order(self) -> int:
        return self.stabilizer.order

    def to_dict(self) -> dict[str, Any]:
        labels = self.stabilizer.group.labels
        return {
            "representative": self.representative,
            "label": labels[self.representative],
            "orbit": list(self.orbit),
            "orbit_labels": [labels[g] for g in self.orbit],
            "orbit_size": self.orbit_size,
            "stabilizer": list(self.stabilizer.members),
            "stabilizer_order": self.stabilizer_order,
            "stabilizer_histogram": histogram_items(self.histogram),
            "stabilizer_shape": describe_shape(self.stabilizer_order, self.histogram),
        }


@dataclass(frozen=True)
class ComponentsReport:
    """Classes of H^1(C2, G); each class is one component B(K_g) of the realization."""

    group: FiniteGroupWithInvolution = field(repr=False)
    classes: tuple[CocycleClass, ...]
    cocycle_count: int

    @property
    def count(self) -> int:
        return len(self.classes)

    def mass(self) -> Fraction:
        return sum((Fraction(1, c.stabilizer_order) for c in self.classes), Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "group": self.group.name,
            "order": self.group.order,
            "cocycles": self.cocycle_count,
            "count": self.count,
            "stabilizer_orders": [c.stabilizer_order for c in self.classes],
            "mass": self.mass(),
            "classes": [c.to_dict() for c in self.classes],
        }


def cocycles(group: FiniteGroupWithInvolution) -> tuple[int, ...]:
    """Z^1 = {g : g sigma(g) = 1}, sorted."""
    return tuple(np.flatnonzero(group.table[np.arange(group.order), group.sigma] == 0).tolist())


def twisted_orbit(group: FiniteGroupWithInvolution, g: int) -> tuple[int, ...]:
    """{sigma(h) g h^-1 : h in G}."""
    return tuple(np.unique(group.table[group.table[group.sigma, g], group.inverse]).tolist())


def twisted_stabilizer(group: FiniteGroupWithInvolution, g: int) -> Subgroup:
    """K_g = {h : sigma(h) g = g h}."""
    return Subgroup(group, tuple(np.flatnonzero(group.table[group.sigma, g] == group.table[g, :]).tolist()))


def _orbit_partition(elements: Sequence[int], orbit_of: Any) -> list[tuple[int, tuple[int, ...]]]:
    assigned: set[int] = set()
    parts = []
    for g in elements:
        if g not in assigned:
            orbit = orbit_of(g)
            assigned.update(orbit)
            parts.append((g, orbit))
    return parts


def h1(group: FiniteGroupWithInvolution) -> ComponentsReport:
    """Partition Z^1 into twisted-conjugacy classes and attach the stabilizers K_g.

    Classes are sorted by their least representative.
    """
    z1 = cocycles(group)
    orders = element_orders(group)
    classes = []
    for rep, orbit in _orbit_partition(z1, lambda g: twisted_orbit(group, g)):
        stabilizer = twisted_stabilizer(group, rep)
        values, counts = np.unique(orders[stabilizer.array()], return_counts=True)
        histogram = {int(v): int(c) for v, c in zip(values, counts)}
        classes.append(CocycleClass(rep, orbit, stabilizer, histogram))
    logger.debug(f"h1() {group.name} cocycles={len(z1)} classes={len(classes)}")
    return ComponentsReport(group, tuple(classes), len(z1))


def witt_invariant_rank(group: FiniteGroupWithInvolution) -> int:
    """|H^1(C2, G)|, the rank of degree-0 Witt-sheaf cohomology up to torsion."""
    return h1(group).count


@dataclass(frozen=True)
class StrongInvolutionClass:
    representative: int
    orbit: tuple[int, ...]
    central_invariant: int
    reduced_invariant: int

    @property
    def reduced_trivial(self) -> bool:
        return self.reduced_invariant == 0


@dataclass(frozen=True)
class StrongInvolutionReport:
    """Strong involutions g (g sigma(g) in Z(G)^sigma) up to g ~ h g sigma(h)^-1.

    The reduced invariant of a class is the least element of the coset of its
    central invariant in Z(G)^sigma / (1+sigma)Z(G).
    """

    group: FiniteGroupWithInvolution = field(repr=False)
    center: tuple[int, ...]
    center_fixed: tuple[int, ...]
    norm_subgroup: tuple[int, ...]
    classes: tuple[StrongInvolutionClass, ...]

    @property
    def tate_order(self) -> int:
        return len(self.center_fixed) // len(self.norm_subgroup)

    def trivial_invariant_classes(self) -> list[StrongInvolutionClass]:
        """Classes with central invariant exactly the identity, by representative."""
        return sorted((c for c in self.classes if c.central_invariant == 0), key=lambda c: c.representative)

    def to_dict(self) -> dict[str, Any]:
        labels = self.group.labels
        return {
            "group": self.group.name,
            "center": list(self.center),
            "center_fixed": list(self.center_fixed),
            "norm_subgroup": list(self.norm_subgroup),
            "tate_order": self.tate_order,
            "classes": [
                {
                    "representative": c.representative,
                    "label": labels[c.representative],
                    "orbit": list(c.orbit),
                    "central_invariant": c.central_invariant,
                    "central_invariant_label": labels[c.central_invariant],
                    "reduced_invariant": c.reduced_invariant,
                    "reduced_trivial": c.reduced_trivial,
                }
                for c in self.classes
            ],
        }


def strong_involutions(group: FiniteGroupWithInvolution) -> StrongInvolutionReport:
    t, sigma, inv = group.table, group.sigma, group.inverse
    z = center(group).array()
    z_fixed = z[sigma[z] == z]
    norm = np.unique(t[z, sigma[z]])
    invariants = t[np.arange(group.order), sigma]
    strong = np.flatnonzero(np.isin(invariants, z_fixed)).tolist()

    def orbit_of(g: int) -> tuple[int, ...]:
        # h g sigma(h)^-1 for all h
        return tuple(np.unique(t[t[:, g], inv[sigma]]).tolist())

    classes = []
    for rep, orbit in _orbit_partition(strong, orbit_of):
        zg = int(invariants[rep])
        classes.append(StrongInvolutionClass(rep, orbit, zg, int(t[zg, norm].min())))
    classes.sort(key=lambda c: (c.reduced_invariant, c.representative))
    logger.debug(f"strong_involutions() {group.name} strong={len(strong)} classes={len(classes)}")
    return StrongInvolutionReport(
        group, tuple(z.tolist()), tuple(z_fixed.tolist()), tuple(norm.tolist()), tuple(classes)
    )


def is_strong_involution(group: FiniteGroupWithInvolution, g: int) -> bool:
    zg = int(group.table[g, group.sigma[g]])
    return bool(zg in center(group) and group.sigma[zg] == zg)


def twist(group: FiniteGroupWithInvolution, g0: int, require_cocycle: bool = True) -> FiniteGroupWithInvolution:
    """Same group with the twisted involution sigma_g0(x) = g0 sigma(x) g0^-1.

    Args:
        group: the group with involution.
        g0: a cocycle, or (with require_cocycle=False) any strong involution.
        require_cocycle: insist on g0 sigma(g0) = 1. Defaults to True.

    Raises:
        NotACocycleException: g0 sigma(g0) != 1 while require_cocycle is set.
        NotAStrongInvolutionException: g0 sigma(g0) is not in Z(G)^sigma, so sigma_g0 is no involution.
    """
    zg = int(group.table[g0, group.sigma[g0]])
    if require_cocycle and zg != 0:
        raise NotACocycleException(
            f"twist() {group.label(g0)} sigma({group.label(g0)}) = {group.label(zg)} != 1; "
            "sigma_g squares to conjugation by g sigma(g), an involution only when g sigma(g) lies in Z(G)^sigma"
        )
    if not is_strong_involution(group, g0):
        raise NotAStrongInvolutionException(f"twist() {group.label(g0)} sigma(g) = {group.label(zg)} is not central")
    sigma = group.table[group.table[g0, group.sigma], group.inverse[g0]]
    return group.with_sigma(sigma, name=f"{group.name}^{group.label(g0)}" if g0 else group.name)


@dataclass(frozen=True)
class TwistingReport:
    """Result of comparing H^1 for sigma_g0 against H^1 for sigma via c -> c g0."""

    g0: int
    bijective: bool
    descends: bool
    stabilizers_match: bool
    pairing: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return self.bijective and self.descends and self.stabilizers_match

    def to_dict(self) -> dict[str, Any]:
        return {
            "g0": self.g0,
            "ok": self.ok,
            "bijective": self.bijective,
            "descends": self.descends,
            "stabilizers_match": self.stabilizers_match,
            "pairing": [list(p) for p in self.pairing],
        }


def twisting_bijection_check(group: FiniteGroupWithInvolution, g0: int) -> TwistingReport:
    """Check that c -> c g0 maps Z^1(sigma_g0) onto Z^1(sigma) and matches the H^1 classes.

    Stabilizers of matched classes are compared by order and element-order histogram.

    Raises:
        NotACocycleException: g0 is not a cocycle for sigma.
    """
    twisted = twist(group, g0)
    base, other = h1(group), h1(twisted)
    z1 = set(cocycles(group))
    shifted = [int(group.table[c, g0]) for c in cocycles(twisted)]
    bijective = len(set(shifted)) == len(shifted) and set(shifted) == z1

    class_of = {g: i for i, cls in enumerate(base.classes) for g in cls.orbit}
    pairing = []
    descends = True
    stabilizers_match = True
    for cls in other.classes:
        images = {class_of.get(int(group.table[c, g0]), -1) for c in cls.orbit}
        if len(images) != 1 or -1 in images:
            descends = False
            continue
        target = base.classes[images.pop()]
        pairing.append((cls.representative, target.representative))
        if cls.stabilizer_order != target.stabilizer_order or cls.histogram != target.histogram:
            stabilizers_match = False
    if len({p[1] for p in pairing}) != len(base.classes) or len(pairing) != len(other.classes):
        descends = False
    logger.debug(f"twisting_bijection_check() {group.name} g0={g0} pairs={len(pairing)}")
    return TwistingReport(g0, bijective, descends, stabilizers_match, tuple(pairing))


@dataclass(frozen=True)
class TwoTorsionCharacter:
    """A sigma-equivariant homomorphism G -> {+1, -1}."""

    values: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.values[g]

    def is_trivial_on(self, members: Iterable[int]) -> bool:
        return all(self.values[g] == 1 for g in members)


def make_character(group: FiniteGroupWithInvolution, values: Sequence[int]) -> TwoTorsionCharacter:
    """Validate a +-1 valued map as a sigma-equivariant character.

    Raises:
        NotACharacterException: wrong length, values other than +-1, or not a homomorphism.
        NotEquivariantException: chi(sigma(x)) != chi(x) for some x.
    """
    v = np.array(values, dtype=np.int64)
    if v.shape != (group.order,) or not np.isin(v, (1, -1)).all():
        raise NotACharacterException(f"expected {group.order} values in {{+1, -1}}")
    if not np.array_equal(np.multiply.outer(v, v), v[group.table]):
        raise NotACharacterException("values do not define a homomorphism")
    if not np.array_equal(v[group.sigma], v):
        raise NotEquivariantException("character is not invariant under the involution")
    return TwoTorsionCharacter(tuple(v.tolist()))


def two_torsion_characters(group: FiniteGroupWithInvolution) -> list[TwoTorsionCharacter]:
    """All sigma-equivariant +-1 characters, trivial character first.

    They factor through G / <[G,G], G^2, x sigma(x)^-1>, an elementary abelian 2-group.
    """
    t, inv, n = group.table, group.inverse, group.order
    commutators = np.unique(t[t[t, inv[:, None]], inv[None, :]])
    squares = t[np.arange(n), np.arange(n)]
    defects = t[np.arange(n), inv[group.sigma]]
    kernel = subgroup_generated(group, np.union1d(np.union1d(commutators, squares), defects).tolist())
    projection, reps = coset_projection(group, kernel)
    coordinates = {0: 0}
    rank = 0
    for c in range(len(reps)):
        if c in coordinates:
            continue
        for e, mask in list(coordinates.items()):
            coordinates[int(projection[t[reps[e], reps[c]]])] = mask | (1 << rank)
        rank += 1
    coords = np.array([coordinates[int(p)] for p in projection], dtype=np.int64)
    characters = []
    for subset in range(1 << rank):
        parity = np.array([bin(int(x) & subset).count("1") % 2 for x in coords])
        characters.append(TwoTorsionCharacter(tuple((1 - 2 * parity).tolist())))
    return characters


@dataclass(frozen=True)
class CharacterComponent:
    representative: int
    stabilizer_order: int
    trivial: bool
    form_sign: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "representative": self.representative,
            "stabilizer_order": self.stabilizer_order,
            "trivial": self.trivial,
            "form_sign": self.form_sign,
        }


def character_components(group: FiniteGroupWithInvolution, chi: TwoTorsionCharacter) -> list[CharacterComponent]:
    """Restrict chi to each stabilizer K_g: is the local system trivial on that component?

    form_sign is chi(g): the realized symmetric line bundle carries the form <chi(g)>.
    """
    make_character(group, chi.values)
    return [
        CharacterComponent(c.representative, c.stabilizer_order, chi.is_trivial_on(c.stabilizer.members),
                           chi(c.representative))
        for c in h1(group).classes
    ]


def realize_diagonal_form(
    group: FiniteGroupWithInvolution, characters: Sequence[TwoTorsionCharacter]
) -> list[tuple[int, SignatureClass]]:
    """Signature of the diagonal symmetric representation sum(chi_i) on each H^1 component."""
    for chi in characters:
        make_character(group, chi.values)
    result = []
    for c in h1(group).classes:
        signs = Counter(chi(c.representative) for chi in characters)
        result.append((c.representative, classify_form(signs[1], signs[-1])))
    return result


@dataclass(frozen=True)
class InnerFormCount:
    representative: int
    central_invariant: int
    h1_count: int


def inner_class_cardinalities(group: FiniteGroupWithInvolution) -> list[InnerFormCount]:
    """|H^1(C2, G)| for the involution sigma_g of every strong-involution class g."""
    counts = []
    for cls in strong_involutions(group).classes:
        twisted = twist(group, cls.representative, require_cocycle=False)
        counts.append(InnerFormCount(cls.representative, cls.central_invariant, h1(twisted).count))
    return counts


def mass_formula_holds(report: ComponentsReport) -> bool:
    """Sum of 1/|K_g| over classes equals |Z^1| / |G|."""
    return report.mass() == Fraction(report.cocycle_count, report.group.order)
