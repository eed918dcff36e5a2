"""Mod-2 cohomology of finite groups from the normalized bar complex.

A normalized k-cochain is a function on k-tuples of nonidentity elements; the
tuples are numbered in mixed radix base |K|-1. Differentials are kept as
sparse F2 entries and reduced as packed bit rows.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
import numpy.typing as npt

from .exceptions import CapExceededException, InvalidSpecException
from .galois import h1
from .groups import FiniteGroupWithInvolution, IntArray, mod2_abelianization_rank
from .stacks import DEFAULT_OBJECT_CAP, EquivariantAction, fixed_point_groupoid

logger = logging.getLogger(__name__)

DEFAULT_ORDER_CAP = 24
DEFAULT_LOW_DEGREE_ORDER_CAP = 64
LOW_DEGREE_LIMIT = 3
DEFAULT_MAX_DEGREE = 6
DEFAULT_MEMORY_LIMIT = 2 << 30
MEMORY_WARNING = 256 << 20

MapFn = Callable[[Callable[[Any], Any], Iterable[Any]], Iterator[Any]]


def _tuples(base: int, length: int) -> IntArray:
    """Every normalized tuple of the given length as element indices, in index order."""
    index = np.arange(base**length, dtype=np.int64)
    powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (index[:, None] // powers[None, :]) % base + 1


def _encode(columns: list[IntArray], base: int, size: int) -> IntArray:
    code = np.zeros(size, dtype=np.int64)
    for column in columns:
        code = code * base + (column - 1)
    return code


def cochain_dimension(order: int, k: int) -> int:
    return (order - 1) ** k if order > 1 or k == 0 else 0


@dataclass(frozen=True, eq=False)
class F2CochainLayer:
    """Degree-k cochains and the differential d_k into degree k+1.

    rows and cols list the nonzero entries of d_k: row indexes a (k+1)-tuple,
    col a k-tuple.
    """

    degree: int
    dimension: int
    target_dimension: int
    rows: IntArray = field(repr=False)
    cols: IntArray = field(repr=False)

    def dense(self) -> npt.NDArray[np.float32]:
        matrix = np.zeros((self.target_dimension, self.dimension), dtype=np.float32)
        matrix[self.rows, self.cols] = 1
        return matrix

    def packed_transpose(self) -> npt.NDArray[np.uint8]:
        """d_k^T as packed bit rows: one row per k-tuple."""
        packed = np.zeros((self.dimension, (self.target_dimension + 7) // 8), dtype=np.uint8)
        np.bitwise_or.at(packed, (self.cols, self.rows >> 3), (0x80 >> (self.rows & 7)).astype(np.uint8))
        return packed

    def rank(self) -> int:
        if not self.rows.size:
            return 0
        return gf2_rank(self.packed_transpose(), self.target_dimension)


def cochain_layer(group: FiniteGroupWithInvolution, k: int) -> F2CochainLayer:
    """The inhomogeneous differential restricted to normalized cochains.

    (df)(g1..g_{k+1}) = f(g2..g_{k+1}) + sum_i f(.., g_i g_{i+1}, ..) + f(g1..g_k); merged
    terms whose product is the identity vanish.
    """
    base = group.order - 1
    dim, target = cochain_dimension(group.order, k), cochain_dimension(group.order, k + 1)
    if base == 0:
        empty = np.zeros(0, dtype=np.int64)
        return F2CochainLayer(k, dim, target, empty, empty)
    tau = _tuples(base, k + 1)
    every = np.arange(target, dtype=np.int64)
    row_parts = [every, every]
    col_parts = [
        _encode([tau[:, j] for j in range(1, k + 1)], base, target),
        _encode([tau[:, j] for j in range(k)], base, target),
    ]
    for i in range(1, k + 1):
        product = group.table[tau[:, i - 1], tau[:, i]]
        keep = product != 0
        merged = [tau[keep, j] for j in range(i - 1)] + [product[keep]] + [tau[keep, j] for j in range(i + 1, k + 1)]
        row_parts.append(every[keep])
        col_parts.append(_encode(merged, base, int(keep.sum())))
    keys = np.concatenate(row_parts) * dim + np.concatenate(col_parts)
    values, counts = np.unique(keys, return_counts=True)
    rows, cols = np.divmod(values[counts % 2 == 1], dim)
    return F2CochainLayer(k, dim, target, rows, cols)


def gf2_rank(packed: npt.NDArray[np.uint8], ncols: int) -> int:
    """Rank over F2 of a matrix stored as packed bit rows (most significant bit first)."""
    rows = packed.copy()
    nrows = rows.shape[0]
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        byte, mask = col >> 3, np.uint8(0x80 >> (col & 7))
        candidates = np.flatnonzero(rows[rank:, byte] & mask)
        if not candidates.size:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        below = rank + 1 + np.flatnonzero(rows[rank + 1 :, byte] & mask)
        if below.size:
            rows[below] ^= rows[rank]
        rank += 1
    return rank


def memory_estimate(order: int, kmax: int) -> int:
    """Peak bytes for building and reducing the differentials up to degree kmax."""
    peak = 0
    for k in range(kmax + 1):
        dim, target = cochain_dimension(order, k), cochain_dimension(order, k + 1)
        packed = dim * ((target + 7) // 8)
        sparse = 8 * (k + 2) * (k + 3) * target
        peak = max(peak, 2 * packed + sparse)
    return peak


@dataclass(frozen=True)
class F2CohomologyProfile:
    """dim H^k(BK; F2) for k = 0..kmax."""

    label: str
    order: int
    dims: tuple[int, ...]

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    def to_dict(self) -> dict[str, Any]:
        return {"group": self.label, "order": self.order, "dims": list(self.dims)}


def check_caps(
    group: FiniteGroupWithInvolution,
    kmax: int,
    order_cap: int = DEFAULT_ORDER_CAP,
    low_degree_cap: int = DEFAULT_LOW_DEGREE_ORDER_CAP,
    max_degree: int = DEFAULT_MAX_DEGREE,
    memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> int:
    """Validate degree, order and memory caps; returns the memory estimate.

    Raises:
        CapExceededException: a cap is exceeded; the message names the group.
    """
    if kmax < 0 or kmax > max_degree:
        raise CapExceededException(f"degree {kmax} outside 0..{max_degree}")
    cap = low_degree_cap if kmax <= LOW_DEGREE_LIMIT else order_cap
    if group.order > cap:
        raise CapExceededException(f"{group.name} has order {group.order} above the cap {cap} for degree {kmax}")
    estimate = memory_estimate(group.order, kmax)
    if estimate > memory_limit:
        raise CapExceededException(
            f"{group.name} to degree {kmax} needs about {estimate >> 20} MiB, above the limit {memory_limit >> 20} MiB"
        )
    if estimate > MEMORY_WARNING:
        logger.warning(f"cohomology_dims() {group.name} kmax={kmax} needs about {estimate >> 20} MiB")
    return estimate


def cohomology_dims(
    group: FiniteGroupWithInvolution,
    kmax: int,
    order_cap: int = DEFAULT_ORDER_CAP,
    low_degree_cap: int = DEFAULT_LOW_DEGREE_ORDER_CAP,
    max_degree: int = DEFAULT_MAX_DEGREE,
    memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> F2CohomologyProfile:
    """dim H^k(BK; F2) = nullity(d_k) - rank(d_{k-1}) for k <= kmax. The involution is ignored.

    Args:
        group: the finite group K.
        kmax: top degree.
        order_cap: largest |K| when kmax >= 4. Defaults to 24.
        low_degree_cap: largest |K| when kmax <= 3. Defaults to 64.
        max_degree: largest allowed kmax. Defaults to 6.
        memory_limit: refuse runs whose estimate exceeds this many bytes. Defaults to 2 GiB.

    Raises:
        CapExceededException: order, degree or memory caps exceeded.
    """
    check_caps(group, kmax, order_cap, low_degree_cap, max_degree, memory_limit)
    ranks = [cochain_layer(group, k).rank() for k in range(kmax + 1)]
    dims = []
    for k in range(kmax + 1):
        nullity = cochain_dimension(group.order, k) - ranks[k]
        dims.append(nullity - (ranks[k - 1] if k else 0))
    logger.debug(f"cohomology_dims() {group.name} dims={dims}")
    return F2CohomologyProfile(group.name, group.order, tuple(dims))


def verify_estimate(order: int, kmax: int) -> int:
    """Peak bytes for verify_complex: the layer builds plus the index join of d_{k+1} and d_k."""
    peak = memory_estimate(order, kmax)
    for k in range(kmax):
        # at most (k+2)(k+3) joined terms per (k+2)-tuple, five int64 arrays each, next to the upper layer
        join = 8 * (k + 3) * (5 * (k + 2) + 2) * cochain_dimension(order, k + 2)
        peak = max(peak, join)
    return peak


def compose_layers(lower: F2CochainLayer, upper: F2CochainLayer) -> tuple[IntArray, IntArray]:
    """Nonzero entries (rows, cols) of d_{k+1} d_k over F2, joined on the shared (k+1)-tuple index."""
    if lower.target_dimension != upper.dimension:
        raise InvalidSpecException(f"layers do not compose: {lower.target_dimension} != {upper.dimension}")
    order = np.argsort(upper.cols, kind="stable")
    middle, targets = upper.cols[order], upper.rows[order]
    start = np.searchsorted(middle, lower.rows, side="left")
    counts = np.searchsorted(middle, lower.rows, side="right") - start
    total = int(counts.sum())
    if not total:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    offsets = np.cumsum(counts) - counts
    positions = np.arange(total, dtype=np.int64) - np.repeat(offsets - start, counts)
    keys = targets[positions] * lower.dimension + np.repeat(lower.cols, counts)
    values, hits = np.unique(keys, return_counts=True)
    rows, cols = np.divmod(values[hits % 2 == 1], lower.dimension)
    return rows, cols


def verify_complex(
    group: FiniteGroupWithInvolution, kmax: int, memory_limit: int = DEFAULT_MEMORY_LIMIT
) -> dict[int, bool]:
    """d_{k+1} d_k = 0 over F2 for every k < kmax, composed on the sparse entries.

    Raises:
        CapExceededException: the estimated working set exceeds memory_limit.
    """
    estimate = verify_estimate(group.order, kmax)
    if estimate > memory_limit:
        raise CapExceededException(
            f"verifying {group.name} to degree {kmax} needs about {estimate >> 20} MiB, "
            f"above the limit {memory_limit >> 20} MiB"
        )
    result: dict[int, bool] = {}
    lower = cochain_layer(group, 0)
    for k in range(kmax):
        upper = cochain_layer(group, k + 1)
        rows, _ = compose_layers(lower, upper)
        result[k] = not rows.size
        lower = upper
    return result


def check_abelianization(group: FiniteGroupWithInvolution) -> bool:
    """dim H^1(K; F2) equals the F2-rank of K/([K,K] K^2)."""
    return cohomology_dims(group, 1).dims[1] == mod2_abelianization_rank(group)


@dataclass(frozen=True)
class RealizationComponent:
    representative: tuple[int, int]
    profile: F2CohomologyProfile

    def to_dict(self) -> dict[str, Any]:
        return {"representative": list(self.representative), **self.profile.to_dict()}


@dataclass(frozen=True)
class RealizationProfile:
    """H^k of the real realization: the sum over components B(Aut) of dim H^k(B Aut; F2)."""

    name: str
    components: tuple[RealizationComponent, ...]
    dims: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "components": [c.to_dict() for c in self.components],
            "dims": list(self.dims),
        }


def realization_cohomology(
    source: Union[FiniteGroupWithInvolution, EquivariantAction],
    kmax: int,
    order_cap: int = DEFAULT_ORDER_CAP,
    low_degree_cap: int = DEFAULT_LOW_DEGREE_ORDER_CAP,
    max_degree: int = DEFAULT_MAX_DEGREE,
    memory_limit: int = DEFAULT_MEMORY_LIMIT,
    object_cap: int = DEFAULT_OBJECT_CAP,
    map_fn: MapFn = map,
) -> RealizationProfile:
    """Per-degree F2 Betti numbers of the real realization of BG (or [G\\X]).

    Components come from h1 for a bare group and from the fixed-point groupoid for
    an action. Caps are checked for every stabilizer before any complex is built.

    Args:
        map_fn: order-preserving map used to run the components, e.g. an executor's map.

    Raises:
        CapExceededException: a stabilizer exceeds a cap; the message names it.
    """
    if isinstance(source, FiniteGroupWithInvolution):
        name = source.name
        stabilizers = [((c.representative, 0), c.stabilizer) for c in h1(source).classes]
    else:
        name = source.name
        report = fixed_point_groupoid(source, object_cap)
        stabilizers = [(c.representative, c.automorphisms) for c in report.components]
    groups = []
    for (g, x), subgroup in stabilizers:
        label = f"K[{subgroup.group.labels[g]}]" + (f"@{x}" if x else "")
        stabilizer = subgroup.to_group(restrict_involution=False, name=label)
        try:
            check_caps(stabilizer, kmax, order_cap, low_degree_cap, max_degree, memory_limit)
        except CapExceededException as ex:
            raise CapExceededException(f"stabilizer of {name} component {label}: {ex}") from ex
        groups.append(stabilizer)

    profiles = list(
        map_fn(lambda k: cohomology_dims(k, kmax, order_cap, low_degree_cap, max_degree, memory_limit), groups)
    )
    components = tuple(RealizationComponent(rep, p) for (rep, _), p in zip(stabilizers, profiles))
    dims = tuple(int(sum(p.dims[k] for p in profiles)) for k in range(kmax + 1))
    logger.debug(f"realization_cohomology() {name} components={len(components)} dims={list(dims)}")
    return RealizationProfile(name, components, dims)
