"""Fixed-point groupoids of finite equivariant actions G acting on X.

Objects are pairs (g, x) with g sigma(g) = 1 and g.x = sigmaX(x); a morphism h
sends (g, x) to (sigma(h) g h^-1, h.x). This groupoid is the finite model of the
real points of the quotient stack [G\\X].
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import (
    CapExceededException,
    InvalidSpecException,
    NotAnInvolutionException,
    NotEquivariantException,
    NotFreeException,
    NotNormalException,
    NotSigmaStableException,
)
from .groups import (
    DEFAULT_ORDER_CAP,
    FiniteGroupWithInvolution,
    IntArray,
    Subgroup,
    coset_projection,
    is_normal,
    load_group,
    make_subgroup,
    order_histogram,
    quotient,
)
from .utils import histogram_items, json_loads

logger = logging.getLogger(__name__)

DEFAULT_OBJECT_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class EquivariantAction:
    """A left action of G on points 0..m-1 with an involution sigmaX compatible with sigma.

    act[g, x] is g.x. Construction checks the action law, sigmaX^2 = id and
    sigmaX(g.x) = sigma(g).sigmaX(x).
    """

    group: FiniteGroupWithInvolution
    act: IntArray
    sigma_x: IntArray
    name: str = ""

    def __post_init__(self) -> None:
        act = np.array(self.act, dtype=np.int64)
        sigma_x = np.array(self.sigma_x, dtype=np.int64)
        act.flags.writeable = False
        sigma_x.flags.writeable = False
        object.__setattr__(self, "act", act)
        object.__setattr__(self, "sigma_x", sigma_x)
        if not self.name:
            object.__setattr__(self, "name", f"{self.group.name}|X{act.shape[-1] if act.ndim == 2 else 0}")
        n = self.group.order
        if act.ndim != 2 or act.shape[0] != n or act.shape[1] == 0:
            raise InvalidSpecException(f"action table must have shape ({n}, m) with m >= 1, got {act.shape}")
        m = act.shape[1]
        if act.min() < 0 or act.max() >= m:
            raise InvalidSpecException(f"action table entries must be points 0..{m - 1}")
        if not np.array_equal(act[0], np.arange(m)):
            raise InvalidSpecException("the identity must act trivially")
        for g in range(n):
            # (g h).x against g.(h.x) for all h, x
            if not np.array_equal(act[self.group.table[g]], act[g][act]):
                raise InvalidSpecException(f"action law fails at g={g}")
        if sigma_x.shape != (m,) or not np.array_equal(np.sort(sigma_x), np.arange(m)):
            raise InvalidSpecException("sigmaX must be a permutation of the points")
        if not np.array_equal(sigma_x[sigma_x], np.arange(m)):
            raise NotAnInvolutionException("sigmaX does not square to the identity")
        if not np.array_equal(sigma_x[act], act[self.group.sigma][:, sigma_x]):
            raise NotEquivariantException("sigmaX(g.x) != sigma(g).sigmaX(x) for some g, x")

    @property
    def points(self) -> int:
        return int(self.act.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "group": self.group.to_dict(),
            "points": self.points,
            "action": self.act.tolist(),
            "sigmaX": self.sigma_x.tolist(),
        }


def point_action(group: FiniteGroupWithInvolution) -> EquivariantAction:
    return EquivariantAction(group, np.zeros((group.order, 1), dtype=np.int64), np.zeros(1, dtype=np.int64),
                             f"{group.name}|pt")


def regular_action(group: FiniteGroupWithInvolution) -> EquivariantAction:
    """G acting on itself by left multiplication, sigmaX = sigma."""
    return EquivariantAction(group, group.table, group.sigma, f"{group.name}|{group.name}")


def relabel_points(action: EquivariantAction, perm: IntArray | list[int]) -> EquivariantAction:
    """Transport the action along the bijection x -> perm[x]."""
    perm = np.array(perm, dtype=np.int64)
    inverse = np.argsort(perm)
    return EquivariantAction(action.group, perm[action.act][:, inverse], perm[action.sigma_x][inverse], action.name)


def load_action(source: str | dict[str, Any], cap: int = DEFAULT_ORDER_CAP) -> EquivariantAction:
    """Build an EquivariantAction from a document {"group", "points", "action", "sigmaX"} or a path to one.

    A relative group path inside an action file is resolved against the file's directory.
    """
    base = None
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        if not path.is_file():
            raise InvalidSpecException(f"action document {source!r} not found")
        doc = json_loads(path.read_bytes())
        base = path.parent
    if not isinstance(doc, dict) or "group" not in doc:
        raise InvalidSpecException("action document must be an object with a 'group' entry")
    group_spec = doc["group"]
    relative = isinstance(group_spec, str) and not group_spec.startswith("builtin:") and not Path(group_spec).is_file()
    if base and relative:
        group_spec = str(base / group_spec)
    group = load_group(group_spec, cap)
    points = int(doc.get("points", 1))
    act = doc.get("action")
    if act is None:
        act = np.zeros((group.order, points), dtype=np.int64) + np.arange(points)
    sigma_x = doc.get("sigmaX", list(range(points)))
    if np.array(sigma_x).shape != (points,):
        raise InvalidSpecException(f"sigmaX must list {points} points")
    return EquivariantAction(group, act, sigma_x, doc.get("name", ""))


@dataclass(frozen=True)
class GroupoidComponent:
    """One isomorphism class of objects; Aut is taken at the least object."""

    representative: tuple[int, int]
    size: int
    automorphisms: Subgroup
    histogram: dict[int, int] = field(compare=False)

    @property
    def aut_order(self) -> int:
        return self.automorphisms.order

    def signature(self) -> tuple[int, tuple[tuple[int, int], ...]]:
        return self.aut_order, tuple(sorted(self.histogram.items()))

    def to_dict(self) -> dict[str, Any]:
        g, x = self.representative
        return {
            "representative": [g, x],
            "label": self.automorphisms.group.labels[g],
            "objects": self.size,
            "automorphisms": list(self.automorphisms.members),
            "aut_order": self.aut_order,
            "aut_histogram": histogram_items(self.histogram),
        }


@dataclass(frozen=True)
class FixedPointGroupoidReport:
    action: EquivariantAction = field(repr=False)
    objects: tuple[tuple[int, int], ...]
    components: tuple[GroupoidComponent, ...]

    @property
    def count(self) -> int:
        return len(self.components)

    def mass(self) -> Fraction:
        return sum((Fraction(1, c.aut_order) for c in self.components), Fraction(0))

    def signatures(self) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
        return sorted(c.signature() for c in self.components)

    def to_dict(self) -> dict[str, Any]:
        return {
            "action": self.action.name,
            "order": self.action.group.order,
            "points": self.action.points,
            "objects": len(self.objects),
            "count": self.count,
            "mass": self.mass(),
            "components": [c.to_dict() for c in self.components],
        }


def fixed_point_groupoid(action: EquivariantAction, object_cap: int = DEFAULT_OBJECT_CAP) -> FixedPointGroupoidReport:
    """Enumerate objects over G x X and split them into isomorphism classes.

    Raises:
        CapExceededException: |G| * |X| is larger than object_cap.
    """
    group = action.group
    n, m = group.order, action.points
    if n * m > object_cap:
        raise CapExceededException(f"fixed_point_groupoid() {n}x{m} pairs exceed the object cap {object_cap}")
    t, sigma, inv = group.table, group.sigma, group.inverse
    is_cocycle = t[np.arange(n), sigma] == 0
    mask = is_cocycle[:, None] & (action.act == action.sigma_x[None, :])
    objects = [(int(g), int(x)) for g, x in np.argwhere(mask)]

    assigned = np.zeros(n * m, dtype=bool)
    components = []
    for g, x in objects:
        if assigned[g * m + x]:
            continue
        targets_g = t[t[sigma, g], inv]
        targets_x = action.act[:, x]
        assigned[targets_g * m + targets_x] = True
        aut = Subgroup(group, tuple(np.flatnonzero((targets_g == g) & (targets_x == x)).tolist()))
        size = len(np.unique(targets_g * m + targets_x))
        components.append(GroupoidComponent((g, x), size, aut, order_histogram(group, aut.members)))
    logger.debug(f"fixed_point_groupoid() {action.name} objects={len(objects)} components={len(components)}")
    return FixedPointGroupoidReport(action, tuple(objects), tuple(components))


def induced_action(
    group: FiniteGroupWithInvolution, subgroup: Subgroup, action: EquivariantAction
) -> EquivariantAction:
    """G x_H X for a sigma-stable H <= G and an action of H (given on subgroup.to_group()).

    Points are pairs (c, x) of a least left-coset representative c and x in X,
    numbered coset_index * |X| + x.

    Raises:
        NotASubgroupException: subgroup is not closed.
        NotSigmaStableException: sigma(H) != H.
        InvalidSpecException: the action is not over the relabelled subgroup.
    """
    subgroup = make_subgroup(group, subgroup.members)
    if not subgroup.is_sigma_stable():
        raise NotSigmaStableException(f"induced_action() {subgroup.members} is not sigma-stable")
    if action.group != subgroup.to_group():
        raise InvalidSpecException("induced_action() the action must be over subgroup.to_group()")
    t, inv = group.table, group.inverse
    m = action.points
    projection, reps = coset_projection(group, subgroup)
    position = np.full(group.order, -1, dtype=np.int64)
    position[subgroup.array()] = np.arange(subgroup.order)

    def normalize(products: IntArray, xs: IntArray) -> IntArray:
        # products = c_j h0 with h0 in H; (c_j h0, x) ~ (c_j, h0.x)
        j = projection[products]
        h0 = position[t[inv[reps[j]], products]]
        return j * m + action.act[h0, xs]

    shifted = t[:, reps]
    act = normalize(shifted[:, :, None], np.arange(m)[None, None, :]).reshape(group.order, -1)
    sigma_x = normalize(group.sigma[reps][:, None], action.sigma_x[None, :]).reshape(-1)
    logger.debug(f"induced_action() {group.name} index={len(reps)} points={len(reps) * m}")
    return EquivariantAction(group, act, sigma_x, f"{group.name}x_H({action.name})")


def quotient_action(action: EquivariantAction, subgroup: Subgroup) -> EquivariantAction:
    """The action of G/N on the orbit set N\\X, orbits numbered by least member.

    Raises:
        NotNormalException: N is not normal.
        NotSigmaStableException: sigma(N) != N.
        NotFreeException: some nonidentity element of N fixes a point.
    """
    group = action.group
    subgroup = make_subgroup(group, subgroup.members)
    if not is_normal(group, subgroup):
        raise NotNormalException(f"quotient_action() {subgroup.members} is not normal")
    if not subgroup.is_sigma_stable():
        raise NotSigmaStableException(f"quotient_action() {subgroup.members} is not sigma-stable")
    members = subgroup.array()
    if (action.act[members[1:]] == np.arange(action.points)).any():
        raise NotFreeException(f"quotient_action() {subgroup.members} does not act freely")
    orbit_of = np.full(action.points, -1, dtype=np.int64)
    orbit_reps = []
    for x in range(action.points):
        if orbit_of[x] < 0:
            orbit_of[action.act[members, x]] = len(orbit_reps)
            orbit_reps.append(x)
    reps_x = np.array(orbit_reps, dtype=np.int64)
    target = quotient(group, subgroup)
    _, reps_g = coset_projection(group, subgroup)
    act = orbit_of[action.act[np.ix_(reps_g, reps_x)]]
    sigma_x = orbit_of[action.sigma_x[reps_x]]
    return EquivariantAction(target, act, sigma_x, f"({action.name})/N{subgroup.order}")


@dataclass(frozen=True)
class GroupoidComparison:
    equivalent: bool
    counts: tuple[int, int]
    signatures: tuple[list[Any], list[Any]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "equivalent": self.equivalent,
            "counts": list(self.counts),
            "aut_signatures": [
                [[order, [list(p) for p in hist]] for order, hist in side] for side in self.signatures
            ],
        }


def compare_groupoids(first: FixedPointGroupoidReport, second: FixedPointGroupoidReport) -> GroupoidComparison:
    """Equivalent iff the component counts and the multisets of (|Aut|, order histogram) agree."""
    left, right = first.signatures(), second.signatures()
    equivalent = first.count == second.count and Counter(left) == Counter(right)
    return GroupoidComparison(equivalent, (first.count, second.count), (left, right))
