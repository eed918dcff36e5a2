"""Finite groups with involution.

Elements are indices 0..n-1 into a Cayley table, with the identity pinned to
index 0. The involution sigma is stored as a permutation of the indices.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from .exceptions import (
    InvalidSpecException,
    InversionOnNonabelianException,
    NotAGroupException,
    NotAnAutomorphismException,
    NotAnInvolutionException,
    NotASubgroupException,
    NotNormalException,
    NotSigmaStableException,
    OrderCapExceededException,
)
from .utils import json_loads

logger = logging.getLogger(__name__)

IntArray = npt.NDArray[np.int64]

DEFAULT_ORDER_CAP = 5000
EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 256
BUILTINS = ("cyclic", "dihedral", "quaternion", "symmetric")


def _frozen(values: Any) -> IntArray:
    arr = np.array(values, dtype=np.int64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FiniteGroupWithInvolution:
    """Cayley-table group with an automorphism sigma of order dividing 2.

    Construction validates the group axioms and the involution, raising
    NotAGroupException, NotAnAutomorphismException or NotAnInvolutionException.
    """

    table: IntArray
    sigma: IntArray
    labels: tuple[str, ...] = ()
    name: str = ""
    inverse: IntArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        table = _frozen(self.table)
        sigma = _frozen(self.sigma)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "sigma", sigma)
        _check_table(table)
        n = table.shape[0]
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        elif len(self.labels) != n:
            raise InvalidSpecException(f"expected {n} labels, got {len(self.labels)}")
        else:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "inverse", _frozen(np.argmin(table, axis=1)))
        _check_sigma(table, sigma)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def label(self, a: int) -> str:
        return self.labels[a]

    def with_sigma(self, sigma: Sequence[int] | IntArray, name: str | None = None) -> FiniteGroupWithInvolution:
        """Same (already validated) table, new involution; only the involution is checked."""
        group = object.__new__(FiniteGroupWithInvolution)
        for attr in ("table", "labels", "inverse"):
            object.__setattr__(group, attr, getattr(self, attr))
        object.__setattr__(group, "sigma", _frozen(sigma))
        object.__setattr__(group, "name", self.name if name is None else name)
        _check_sigma(group.table, group.sigma)
        return group

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "labels": list(self.labels),
            "involution": self.sigma.tolist(),
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroupWithInvolution):
            return NotImplemented
        return np.array_equal(self.table, other.table) and np.array_equal(self.sigma, other.sigma)

    def __hash__(self) -> int:
        return hash((self.table.tobytes(), self.sigma.tobytes()))


@dataclass(frozen=True)
class Subgroup:
    """Sorted set of element indices closed under products and inverses."""

    group: FiniteGroupWithInvolution = field(compare=False, repr=False)
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: object) -> bool:
        return g in self._member_set

    @property
    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def array(self) -> IntArray:
        return np.array(self.members, dtype=np.int64)

    def is_sigma_stable(self) -> bool:
        return set(self.group.sigma[list(self.members)].tolist()) == set(self.members)

    def to_group(self, restrict_involution: bool = True, name: str | None = None) -> FiniteGroupWithInvolution:
        """Relabel the subgroup as a standalone group; member i becomes index i.

        Args:
            restrict_involution: restrict sigma to the subgroup (requires sigma-stability);
                if False the standalone group gets the trivial involution.
            name: name of the new group. Defaults to "<parent>|H".

        Raises:
            NotSigmaStableException: restrict_involution is set and sigma(H) != H.
        """
        members = self.array()
        position = {g: i for i, g in enumerate(self.members)}
        table = np.vectorize(position.__getitem__, otypes=[np.int64])(self.group.table[np.ix_(members, members)])
        if restrict_involution:
            if not self.is_sigma_stable():
                raise NotSigmaStableException(f"to_group() {self.members=} is not sigma-stable")
            sigma = np.array([position[int(self.group.sigma[g])] for g in self.members], dtype=np.int64)
        else:
            sigma = np.arange(len(members), dtype=np.int64)
        labels = tuple(self.group.labels[g] for g in self.members)
        return FiniteGroupWithInvolution(table, sigma, labels, name or f"{self.group.name}|H")

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "members": list(self.members),
            "labels": [self.group.labels[g] for g in self.members],
        }


def _check_table(table: IntArray) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise NotAGroupException(f"table must be a nonempty square array, got shape {table.shape}")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise NotAGroupException("table entries must be element indices 0..n-1")
    identity = np.arange(n)
    if not (np.array_equal(table[0], identity) and np.array_equal(table[:, 0], identity)):
        raise NotAGroupException("index 0 must be the identity")
    if not (np.all(np.sort(table, axis=1) == identity) and np.all(np.sort(table, axis=0) == identity[:, None])):
        raise NotAGroupException("every row and column of the table must be a permutation")
    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        for x in range(n):
            # (x*y)*z against x*(y*z) for all y, z
            if not np.array_equal(table[table[x]], table[x][table]):
                raise NotAGroupException(f"multiplication is not associative at x={x}")
    else:
        rng = np.random.default_rng(n)
        remaining = 10 * n * n
        while remaining > 0:
            size = min(remaining, 1_000_000)
            x, y, z = rng.integers(0, n, size=(3, size))
            if not np.array_equal(table[table[x, y], z], table[x, table[y, z]]):
                raise NotAGroupException("multiplication is not associative (sampled)")
            remaining -= size


def _check_sigma(table: IntArray, sigma: IntArray) -> None:
    n = table.shape[0]
    if sigma.shape != (n,) or not np.array_equal(np.sort(sigma), np.arange(n)):
        raise NotAnAutomorphismException("involution must be a permutation of the elements")
    if not np.array_equal(sigma[table], table[np.ix_(sigma, sigma)]):
        raise NotAnAutomorphismException("involution does not respect multiplication")
    if not np.array_equal(sigma[sigma], np.arange(n)):
        raise NotAnInvolutionException("involution does not square to the identity")


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise OrderCapExceededException(f"group order {n} exceeds the cap {cap}")


def _cycle_label(perm: Sequence[int]) -> str:
    seen: set[int] = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append("(" + " ".join(str(c) for c in cycle) + ")")
    return "".join(cycles) or "()"


def _power_label(base: str, k: int) -> str:
    if k == 0:
        return ""
    return base if k == 1 else f"{base}^{k}"


def cyclic_table(n: int) -> tuple[IntArray, tuple[str, ...]]:
    if n < 1:
        raise InvalidSpecException(f"cyclic group order must be positive, got {n}")
    table = np.add.outer(np.arange(n), np.arange(n)) % n
    labels = tuple(_power_label("g", k) or "1" for k in range(n))
    return table, labels


def dihedral_table(order: int) -> tuple[IntArray, tuple[str, ...]]:
    """Dihedral group of the given order 2n: r^k s^e is index e*n + k."""
    if order < 2 or order % 2:
        raise InvalidSpecException(f"dihedral group order must be even and positive, got {order}")
    n = order // 2
    table = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        e, k = divmod(a, n)
        for b in range(order):
            f, m = divmod(b, n)
            table[a, b] = ((e + f) % 2) * n + (k + (-m if e else m)) % n
    labels = tuple((_power_label("r", k) + ("s" if e else "")) or "1" for e in range(2) for k in range(n))
    return table, labels


def quaternion_table(order: int) -> tuple[IntArray, tuple[str, ...]]:
    """Dicyclic group of order 4m: a^k x^e is index e*2m + k, x^2 = a^m, x a x^-1 = a^-1."""
    if order < 8 or order % 4:
        raise InvalidSpecException(f"quaternion group order must be a multiple of 4 and at least 8, got {order}")
    m = order // 4
    half = 2 * m
    table = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        e, k = divmod(a, half)
        for b in range(order):
            f, j = divmod(b, half)
            if not e:
                table[a, b] = f * half + (k + j) % half
            elif not f:
                table[a, b] = half + (k - j) % half
            else:
                table[a, b] = (k - j + m) % half
    if order == 8:
        labels: tuple[str, ...] = ("1", "i", "-1", "-i", "j", "k", "-j", "-k")
    else:
        labels = tuple((_power_label("a", k) + ("x" if e else "")) or "1" for e in range(2) for k in range(half))
    return table, labels


def symmetric_table(n: int, cap: int = DEFAULT_ORDER_CAP) -> tuple[IntArray, tuple[str, ...]]:
    if n < 1:
        raise InvalidSpecException(f"symmetric group degree must be positive, got {n}")
    order = 1
    for k in range(2, n + 1):
        order *= k
    _check_cap(order, cap)
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(order, n)
    index = {p.tobytes(): i for i, p in enumerate(perms)}
    table = np.array([[index[perms[a][perms[b]].tobytes()] for b in range(order)] for a in range(order)])
    labels = tuple(_cycle_label(p.tolist()) for p in perms)
    return table, labels


def permutation_closure(
    generators: Sequence[Sequence[int]], cap: int = DEFAULT_ORDER_CAP
) -> tuple[IntArray, tuple[str, ...]]:
    """Close permutation generators into a Cayley table by breadth-first product enumeration.

    Elements are numbered in discovery order with the identity first; x*y is the
    composition x(y(i)).
    """
    if not generators:
        raise InvalidSpecException("permutation_closure() needs at least one generator")
    degree = len(generators[0])
    gens = [np.array(g, dtype=np.int64) for g in generators]
    for g in gens:
        if g.shape != (degree,) or not np.array_equal(np.sort(g), np.arange(degree)):
            raise InvalidSpecException(f"generator {g.tolist()} is not a permutation of {degree} points")
    elements = [np.arange(degree, dtype=np.int64)]
    index = {elements[0].tobytes(): 0}
    parent: list[tuple[int, int]] = [(-1, -1)]
    right: list[list[int]] = [[] for _ in gens]
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, g in enumerate(gens):
            y = elements[x][g]
            key = y.tobytes()
            if key not in index:
                index[key] = len(elements)
                _check_cap(len(elements) + 1, cap)
                elements.append(y)
                parent.append((x, s))
                queue.append(index[key])
            right[s].append(index[key])
    n = len(elements)
    # right[s][x] was appended in queue order, which is index order
    right_mult = [np.array(r, dtype=np.int64) for r in right]
    table = np.empty((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    for b in range(1, n):
        p, s = parent[b]
        table[:, b] = right_mult[s][table[:, p]]
    labels = tuple(_cycle_label(e.tolist()) for e in elements)
    return table, labels


def is_abelian(group: FiniteGroupWithInvolution) -> bool:
    return bool(np.array_equal(group.table, group.table.T))


def _involution_from_spec(table: IntArray, inverse: IntArray, spec: Any) -> IntArray:
    n = table.shape[0]
    if spec in (None, "trivial"):
        return np.arange(n, dtype=np.int64)
    if spec == "inversion":
        if not np.array_equal(table, table.T):
            raise InversionOnNonabelianException("the inversion involution is only an automorphism of abelian groups")
        return inverse
    if isinstance(spec, dict) and "permutation" in spec:
        return np.array(spec["permutation"], dtype=np.int64)
    if isinstance(spec, (list, tuple)):
        return np.array(spec, dtype=np.int64)
    raise InvalidSpecException(f"unknown involution spec {spec!r}")


def parse_group_shorthand(text: str) -> dict[str, Any]:
    """Parse "builtin:<name>:<n>[:<involution>]" into a group document."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or parts[0] != "builtin":
        raise InvalidSpecException(f"expected builtin:<name>:<n>[:<involution>], got {text!r}")
    try:
        n = int(parts[2])
    except ValueError as ex:
        raise InvalidSpecException(f"group parameter must be an integer, got {parts[2]!r}") from ex
    return {"kind": "builtin", "builtin": parts[1], "n": n, "involution": parts[3] if len(parts) == 4 else "trivial"}


def read_group_document(source: str | dict[str, Any]) -> dict[str, Any]:
    """A group document from a dict, a builtin shorthand or a JSON file path."""
    if isinstance(source, dict):
        return source
    if source.startswith("builtin:"):
        return parse_group_shorthand(source)
    path = Path(source)
    if not path.is_file():
        raise InvalidSpecException(f"{source!r} is neither a builtin shorthand nor a file")
    doc = json_loads(path.read_bytes())
    if not isinstance(doc, dict):
        raise InvalidSpecException(f"{source!r} does not contain a JSON object")
    return doc


def load_group(spec: str | dict[str, Any], cap: int = DEFAULT_ORDER_CAP) -> FiniteGroupWithInvolution:
    """Compile a group document into a validated FiniteGroupWithInvolution.

    Args:
        spec: group document, builtin shorthand or path to a JSON document.
        cap: maximum group order. Defaults to 5000.

    Returns:
        The validated group.

    Raises:
        InvalidSpecException: malformed document.
        NotAGroupException, NotAnAutomorphismException, NotAnInvolutionException: axioms fail.
        OrderCapExceededException: the group is larger than cap.
        InversionOnNonabelianException: "inversion" requested on a nonabelian group.
    """
    doc = read_group_document(spec)
    kind = doc.get("kind", "builtin" if "builtin" in doc else None)
    if kind == "table":
        table = np.array(doc.get("table", []), dtype=np.int64)
        _check_cap(int(table.shape[0]) if table.ndim else 0, cap)
        labels: tuple[str, ...] = ()
        name = doc.get("name", f"T{table.shape[0] if table.ndim else 0}")
    elif kind == "permutation":
        table, labels = permutation_closure(doc.get("generators", []), cap)
        name = doc.get("name", f"P{table.shape[0]}")
    elif kind == "builtin":
        builtin, n = doc.get("builtin"), int(doc.get("n", 0))
        if builtin == "cyclic":
            _check_cap(n, cap)
            table, labels = cyclic_table(n)
            name = f"C{n}"
        elif builtin == "dihedral":
            _check_cap(n, cap)
            table, labels = dihedral_table(n)
            name = f"D{n}"
        elif builtin == "quaternion":
            _check_cap(n, cap)
            table, labels = quaternion_table(n)
            name = f"Q{n}"
        elif builtin == "symmetric":
            table, labels = symmetric_table(n, cap)
            name = f"S{n}"
        else:
            raise InvalidSpecException(f"unknown builtin {builtin!r}, expected one of {BUILTINS}")
    else:
        raise InvalidSpecException(f"unknown group kind {kind!r}")
    if doc.get("labels"):
        labels = tuple(doc["labels"])
    involution = doc.get("involution", "trivial")
    if isinstance(involution, str) and involution != "trivial":
        name = f"{name}({involution})"
    base = FiniteGroupWithInvolution(table, np.arange(len(table)), labels, doc.get("name", name))
    group = base.with_sigma(_involution_from_spec(base.table, base.inverse, involution))
    logger.debug(f"load_group() {group.name} order={group.order}")
    return group


def trivial_group() -> FiniteGroupWithInvolution:
    return FiniteGroupWithInvolution(np.zeros((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64), ("1",), "C1")


def make_subgroup(group: FiniteGroupWithInvolution, members: Iterable[int]) -> Subgroup:
    """Validate an element set as a subgroup.

    Raises:
        NotASubgroupException: identity missing, or not closed under products and inverses.
    """
    arr = np.unique(np.array(list(members), dtype=np.int64))
    if arr.size == 0 or arr[0] != 0:
        raise NotASubgroupException("a subgroup must contain the identity 0")
    if arr[-1] >= group.order:
        raise NotASubgroupException(f"element index {int(arr[-1])} out of range")
    if not np.isin(group.table[np.ix_(arr, arr)], arr).all() or not np.isin(group.inverse[arr], arr).all():
        raise NotASubgroupException(f"{arr.tolist()} is not closed under multiplication and inverses")
    return Subgroup(group, tuple(arr.tolist()))


def subgroup_generated(group: FiniteGroupWithInvolution, generators: Iterable[int]) -> Subgroup:
    gens = sorted(set(int(g) for g in generators))
    members = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(group.table[x, g])
            if y not in members:
                members.add(y)
                queue.append(y)
    return Subgroup(group, tuple(sorted(members)))


def element_orders(group: FiniteGroupWithInvolution) -> IntArray:
    n = group.order
    orders = np.zeros(n, dtype=np.int64)
    current = np.arange(n)
    k = 1
    while not orders.all():
        orders[(current == 0) & (orders == 0)] = k
        current = group.table[current, np.arange(n)]
        k += 1
    return orders


def order_histogram(group: FiniteGroupWithInvolution, members: Iterable[int]) -> dict[int, int]:
    """Histogram of element orders over the given members (orders computed in the group)."""
    orders = element_orders(group)[np.array(list(members), dtype=np.int64)]
    values, counts = np.unique(orders, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def conjugacy_class(group: FiniteGroupWithInvolution, g: int) -> tuple[int, ...]:
    return tuple(np.unique(group.table[group.table[:, g], group.inverse]).tolist())


def conjugacy_classes(group: FiniteGroupWithInvolution) -> list[tuple[int, ...]]:
    """Partition of the elements into conjugacy classes, sorted by least member."""
    assigned = np.zeros(group.order, dtype=bool)
    classes = []
    for g in range(group.order):
        if not assigned[g]:
            cls = conjugacy_class(group, g)
            assigned[list(cls)] = True
            classes.append(cls)
    return classes


def centralizer(group: FiniteGroupWithInvolution, g: int) -> Subgroup:
    return Subgroup(group, tuple(np.flatnonzero(group.table[:, g] == group.table[g, :]).tolist()))


def center(group: FiniteGroupWithInvolution) -> Subgroup:
    return Subgroup(group, tuple(np.flatnonzero(np.all(group.table == group.table.T, axis=1)).tolist()))


def is_normal(group: FiniteGroupWithInvolution, subgroup: Subgroup) -> bool:
    members = subgroup.array()
    conjugates = group.table[group.table[:, members], group.inverse[:, None]]
    return bool(np.isin(conjugates, members).all())


def coset_projection(group: FiniteGroupWithInvolution, subgroup: Subgroup) -> tuple[IntArray, IntArray]:
    """Left cosets gN numbered by least member.

    Returns:
        (projection, representatives): projection[g] is the coset index of g and
        representatives[i] the least element of coset i.
    """
    members = subgroup.array()
    projection = np.full(group.order, -1, dtype=np.int64)
    reps = []
    for g in range(group.order):
        if projection[g] < 0:
            projection[group.table[g, members]] = len(reps)
            reps.append(g)
    return projection, np.array(reps, dtype=np.int64)


def quotient(group: FiniteGroupWithInvolution, subgroup: Subgroup) -> FiniteGroupWithInvolution:
    """The quotient G/N with the induced involution.

    Raises:
        NotNormalException: N is not normal.
        NotSigmaStableException: sigma(N) != N.
    """
    if not is_normal(group, subgroup):
        raise NotNormalException(f"quotient() {subgroup.members} is not normal in {group.name}")
    if not subgroup.is_sigma_stable():
        raise NotSigmaStableException(f"quotient() {subgroup.members} is not sigma-stable")
    projection, reps = coset_projection(group, subgroup)
    table = projection[group.table[np.ix_(reps, reps)]]
    sigma = projection[group.sigma[reps]]
    labels = tuple(group.labels[r] + ("N" if subgroup.order > 1 else "") for r in reps)
    return FiniteGroupWithInvolution(table, sigma, labels, f"{group.name}/N{subgroup.order}")


def mod2_abelianization_rank(group: FiniteGroupWithInvolution) -> int:
    """Rank over F2 of G/([G,G] G^2)."""
    t, inv = group.table, group.inverse
    # [x, y] = x y x^-1 y^-1 at position (x, y)
    commutators = t[t[t, inv[:, None]], inv[None, :]]
    squares = t[np.arange(group.order), np.arange(group.order)]
    generators = np.union1d(np.unique(commutators), squares)
    index = group.order // subgroup_generated(group, generators.tolist()).order
    return index.bit_length() - 1
