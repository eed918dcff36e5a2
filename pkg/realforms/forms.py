"""Real quadratic forms and the component counts of orthogonal and spin groups."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Literal

from .exceptions import EmptyFormException, InvalidSpecException, UnknownKindException

logger = logging.getLogger(__name__)

WITT_KINDS = ("O", "SO", "Spin-odd", "Spin-even", "G2", "F4", "E6-inner", "E6-outer")
# strong real forms with trivial central invariant of the split exceptional groups
EXCEPTIONAL_RANKS = {"G2": 2, "F4": 3, "E6-inner": 2, "E6-outer": 3}


def hilbert_symbol(a: int, b: int) -> int:
    """(a, b) over the reals for a, b in {+1, -1}."""
    return -1 if a < 0 and b < 0 else 1


@dataclass(frozen=True, order=True)
class SignatureClass:
    """Isometry class of a nondegenerate real quadratic form <1,...,1,-1,...,-1>."""

    p: int
    q: int

    @property
    def rank(self) -> int:
        return self.p + self.q

    @property
    def disc_sign(self) -> int:
        return -1 if self.q % 2 else 1

    @property
    def hasse_sign(self) -> int:
        return -1 if (self.q * (self.q - 1) // 2) % 2 else 1

    def diagonal(self) -> list[int]:
        return [1] * self.p + [-1] * self.q

    def pairwise_hasse(self) -> int:
        """Product of (a_i, a_j) over i < j, the definition the closed form abbreviates."""
        sign = 1
        for a, b in combinations(self.diagonal(), 2):
            sign *= hilbert_symbol(a, b)
        return sign

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "q": self.q, "rank": self.rank, "disc": self.disc_sign, "hasse": self.hasse_sign}


def classify_form(p: int, q: int) -> SignatureClass:
    """
    Raises:
        EmptyFormException: p + q == 0.
        InvalidSpecException: negative p or q.
    """
    if p < 0 or q < 0:
        raise InvalidSpecException(f"classify_form() {p=} {q=} must be nonnegative")
    if p + q == 0:
        raise EmptyFormException("classify_form() the zero form has no signature class")
    return SignatureClass(p, q)


def o_components(n: int) -> list[SignatureClass]:
    """Components of the real realization of BO(n): one per signature, descending p."""
    if n < 1:
        raise EmptyFormException(f"o_components() {n=} must be positive")
    return [SignatureClass(p, n - p) for p in range(n, -1, -1)]


def so_assumption_holds(p: int, q: int) -> bool:
    """q = pq (mod 2), the regime where s = pq and s = q agree."""
    return (q - p * q) % 2 == 0


def so_components(p: int, q: int) -> list[SignatureClass]:
    """Signatures (r, s) of rank p+q with s = q (mod 2), i.e. the discriminant of (p, q).

    When q = pq (mod 2) this is the set s = pq (mod 2); the agreement is asserted.
    """
    base = classify_form(p, q)
    result = [c for c in o_components(base.rank) if c.disc_sign == base.disc_sign]
    if so_assumption_holds(p, q):
        assert result == [c for c in o_components(base.rank) if (c.q - p * q) % 2 == 0]
    return result


def matching_signatures(n: int, disc_sign: int, hasse_sign: int) -> list[SignatureClass]:
    return [c for c in o_components(n) if c.disc_sign == disc_sign and c.hasse_sign == hasse_sign]


@dataclass(frozen=True)
class SpinCountQuery:
    parity: Literal["odd", "even"]
    n: int

    def __post_init__(self) -> None:
        if self.parity not in ("odd", "even"):
            raise InvalidSpecException(f"SpinCountQuery parity must be 'odd' or 'even', got {self.parity!r}")
        if self.n < 1:
            raise InvalidSpecException(f"SpinCountQuery {self.n=} must be positive")

    @property
    def split_signature(self) -> SignatureClass:
        """Spin(n, n+1) or Spin(n, n)."""
        return SignatureClass(self.n + 1, self.n) if self.parity == "odd" else SignatureClass(self.n, self.n)


_ODD_CORRECTION = {0: 2, 1: 1, 2: 0, 3: 2}
_EVEN_CORRECTION = {0: 3, 1: 1, 2: 0, 3: 0}


def spin_invariant_rank(query: SpinCountQuery) -> int:
    """Rank of degree-0 Witt-sheaf cohomology of B Spin for the split real forms."""
    n = query.n
    if query.parity == "odd":
        return (2 * n + 1) // 4 + _ODD_CORRECTION[n % 4]
    return n // 2 + _EVEN_CORRECTION[n % 4]


def spin_comparison(query: SpinCountQuery) -> dict[str, Any]:
    """spin_invariant_rank next to the signatures sharing rank, discriminant and Hasse sign.

    Strong real forms of Spin appear with multiplicity, so no relation between the two numbers is implied.
    """
    split = query.split_signature
    matches = matching_signatures(split.rank, split.disc_sign, split.hasse_sign)
    return {
        "parity": query.parity,
        "n": query.n,
        "invariant_rank": spin_invariant_rank(query),
        "matching_signatures": [[c.p, c.q] for c in matches],
        "matching_count": len(matches),
    }


def witt_rank(kind: str, params: tuple[int, ...] = ()) -> int:
    """Rank of degree-0 Witt-sheaf cohomology of the classifying stack of a classical group.

    Args:
        kind: one of O, SO, Spin-odd, Spin-even, G2, F4, E6-inner, E6-outer.
        params: (n,) for O and Spin, (p, q) for SO, nothing for the exceptional kinds.

    Raises:
        UnknownKindException: kind is not recognised.
        InvalidSpecException: wrong number of parameters.
    """
    expected = {"O": 1, "SO": 2, "Spin-odd": 1, "Spin-even": 1}.get(kind, 0)
    if kind not in WITT_KINDS:
        raise UnknownKindException(f"witt_rank() unknown kind {kind!r}, expected one of {WITT_KINDS}")
    if len(params) != expected:
        raise InvalidSpecException(f"witt_rank() {kind} takes {expected} parameter(s), got {len(params)}")
    if kind == "O":
        result = len(o_components(params[0]))
    elif kind == "SO":
        result = len(so_components(params[0], params[1]))
    elif kind in ("Spin-odd", "Spin-even"):
        result = spin_invariant_rank(SpinCountQuery("odd" if kind == "Spin-odd" else "even", params[0]))
    else:
        result = EXCEPTIONAL_RANKS[kind]
    logger.debug(f"witt_rank() {kind}{params} = {result}")
    return result
