"""Exact matrices over the Gaussian rationals Q(i) and scripted witness suites.

No floating point is used anywhere: entries are pairs of Fractions.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Literal, Union

from .exceptions import CaseNotFoundException, InvalidSpecException, SingularException
from .utils import json_loads

logger = logging.getLogger(__name__)

CASES = ("normalizer-sl2", "o11", "orthogonal-diag")
ASSERTIONS = (
    "cocycle",
    "connects",
    "not-connects",
    "stabilizer-member",
    "stabilizer-nonmember",
    "order",
    "product-signature",
    "in-group",
    "not-in-group",
)
AMBIENT_KINDS = ("general-linear", "orthogonal", "torus-normalizer")


@dataclass(frozen=True)
class GaussianRational:
    """re + im*i with exact rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Scalar) -> GaussianRational:
        return value if isinstance(value, GaussianRational) else cls(Fraction(value))

    @classmethod
    def from_parts(cls, parts: Sequence[int]) -> GaussianRational:
        """From [re_num, re_den, im_num, im_den]."""
        if len(parts) != 4:
            raise InvalidSpecException(f"expected [re_num, re_den, im_num, im_den], got {parts!r}")
        try:
            return cls(Fraction(parts[0], parts[1]), Fraction(parts[2], parts[3]))
        except (ZeroDivisionError, TypeError) as ex:
            raise InvalidSpecException(f"{type(ex).__name__}: {ex}") from ex

    def to_parts(self) -> list[int]:
        return [self.re.numerator, self.re.denominator, self.im.numerator, self.im.denominator]

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other: Scalar) -> GaussianRational:
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> GaussianRational:
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: Scalar) -> GaussianRational:
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Scalar) -> GaussianRational:
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> GaussianRational:
        o = GaussianRational.coerce(other)
        n = o.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other: Scalar) -> GaussianRational:
        return GaussianRational.coerce(other) / self

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


Scalar = Union[int, Fraction, GaussianRational]

ZERO = GaussianRational()
ONE = GaussianRational(Fraction(1))
IMAG = GaussianRational(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class ExactMatrix:
    """Square matrix with GaussianRational entries."""

    rows: tuple[tuple[GaussianRational, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(GaussianRational.coerce(x) for x in row) for row in self.rows)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise InvalidSpecException(f"expected a nonempty square matrix, got {len(rows)} rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[Scalar]]) -> ExactMatrix:
        return cls(tuple(tuple(GaussianRational.coerce(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, size: int) -> ExactMatrix:
        return cls.diagonal([ONE] * size)

    @classmethod
    def diagonal(cls, entries: Sequence[Scalar]) -> ExactMatrix:
        return cls.of([[entries[i] if i == j else ZERO for j in range(len(entries))] for i in range(len(entries))])

    @classmethod
    def from_json(cls, rows: Sequence[Sequence[Sequence[int]]]) -> ExactMatrix:
        return cls(tuple(tuple(GaussianRational.from_parts(x) for x in row) for row in rows))

    def to_json(self) -> list[list[list[int]]]:
        return [[x.to_parts() for x in row] for row in self.rows]

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: tuple[int, int]) -> GaussianRational:
        return self.rows[index[0]][index[1]]

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if other.size != self.size:
            raise InvalidSpecException(f"size mismatch {self.size} vs {other.size}")
        columns = list(zip(*other.rows))
        return ExactMatrix(
            tuple(tuple(sum((a * b for a, b in zip(row, col)), ZERO) for col in columns) for row in self.rows)
        )

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix(tuple(tuple(-x for x in row) for row in self.rows))

    def conjugate(self) -> ExactMatrix:
        return ExactMatrix(tuple(tuple(x.conjugate() for x in row) for row in self.rows))

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(tuple(zip(*self.rows)))

    def is_identity(self) -> bool:
        return self == ExactMatrix.identity(self.size)

    def is_real(self) -> bool:
        return all(not x.im for row in self.rows for x in row)

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.size) for j in range(self.size) if i != j)

    def is_antidiagonal(self) -> bool:
        n = self.size
        return all(not self.rows[i][j] for i in range(n) for j in range(n) if i + j != n - 1)

    def _reduce(self, augment: bool) -> tuple[GaussianRational, list[list[GaussianRational]]]:
        # Gauss-Jordan, first nonzero pivot
        n = self.size
        work = [list(row) for row in self.rows]
        if augment:
            for i, row in enumerate(work):
                row.extend(ONE if i == j else ZERO for j in range(n))
        det = ONE
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col]), None)
            if pivot is None:
                return ZERO, work
            if pivot != col:
                work[col], work[pivot] = work[pivot], work[col]
                det = -det
            p = work[col][col]
            det = det * p
            work[col] = [x / p for x in work[col]]
            for r in range(n):
                if r != col and work[r][col]:
                    factor = work[r][col]
                    work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
        return det, work

    def determinant(self) -> GaussianRational:
        if self.size == 2:
            return self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
        return self._reduce(augment=False)[0]

    def inverse(self) -> ExactMatrix:
        """
        Raises:
            SingularException: the determinant is zero.
        """
        if self.size == 2:
            det = self.determinant()
            if not det:
                raise SingularException("matrix is singular")
            (a, b), (c, d) = self.rows
            return ExactMatrix(((d / det, -b / det), (-c / det, a / det)))
        det, work = self._reduce(augment=True)
        if not det:
            raise SingularException("matrix is singular")
        return ExactMatrix(tuple(tuple(row[self.size :]) for row in work))

    def power(self, k: int) -> ExactMatrix:
        result = ExactMatrix.identity(self.size)
        for _ in range(k):
            result = result @ self
        return result

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.rows) + "]"


@dataclass(frozen=True)
class InvolutionSpec:
    """sigma(M) = conj(M), or J conj(M) J^-1 for J with J conj(J) = 1."""

    mode: Literal["conjugate", "conjugate-by-J"] = "conjugate"
    J: ExactMatrix | None = None
    _j_inverse: ExactMatrix | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.mode == "conjugate":
            return
        if self.mode != "conjugate-by-J":
            raise InvalidSpecException(f"unknown involution mode {self.mode!r}")
        if self.J is None:
            raise InvalidSpecException("conjugate-by-J needs a matrix J")
        if not (self.J @ self.J.conjugate()).is_identity():
            raise InvalidSpecException("J conj(J) must be the identity for sigma to be an involution")
        object.__setattr__(self, "_j_inverse", self.J.inverse())

    def apply(self, m: ExactMatrix) -> ExactMatrix:
        if self.J is None or self._j_inverse is None:
            return m.conjugate()
        return self.J @ m.conjugate() @ self._j_inverse


@dataclass(frozen=True)
class AmbientGroup:
    """The complex group a case draws its matrices from.

    general-linear: invertible matrices.
    orthogonal: M^T Q M = Q for the form Q, the identity when no form is given.
    torus-normalizer: the normalizer of the diagonal torus in SL2, i.e. determinant one and
    diagonal or antidiagonal.
    """

    kind: str = "general-linear"
    form: ExactMatrix | None = None

    def __post_init__(self) -> None:
        if self.kind not in AMBIENT_KINDS:
            raise InvalidSpecException(f"unknown ambient group {self.kind!r}, expected one of {AMBIENT_KINDS}")
        if self.form is not None and self.kind != "orthogonal":
            raise InvalidSpecException(f"ambient group {self.kind} takes no form")

    def contains(self, m: ExactMatrix) -> bool:
        if self.kind == "orthogonal":
            form = self.form if self.form is not None else ExactMatrix.identity(m.size)
            return m.transpose() @ form @ m == form
        if self.kind == "torus-normalizer":
            return m.size == 2 and m.determinant() == ONE and (m.is_diagonal() or m.is_antidiagonal())
        return bool(m.determinant())


def is_cocycle(m: ExactMatrix, inv: InvolutionSpec) -> bool:
    """M sigma(M) = 1.

    Raises:
        SingularException: M is not invertible.
    """
    m.inverse()
    return (m @ inv.apply(m)).is_identity()


def connects(h: ExactMatrix, g: ExactMatrix, g_prime: ExactMatrix, inv: InvolutionSpec) -> bool:
    """g' = sigma(h) g h^-1.

    Arguments that are not cocycles are logged at warning level and still compared.
    """
    h_inverse = h.inverse()
    for name, m in (("g", g), ("g_prime", g_prime)):
        if not is_cocycle(m, inv):
            logger.warning(f"connects() {name}={m} is not a cocycle")
    return inv.apply(h) @ g @ h_inverse == g_prime


def in_twisted_stabilizer(h: ExactMatrix, g: ExactMatrix, inv: InvolutionSpec) -> bool:
    """sigma(h) g = g h."""
    h.inverse()
    return inv.apply(h) @ g == g @ h


def matrix_order(m: ExactMatrix, bound: int = 64) -> int | None:
    """Least k <= bound with M^k = 1, else None."""
    current = m
    for k in range(1, bound + 1):
        if current.is_identity():
            return k
        current = current @ m
    return None


def diagonal_signature(m: ExactMatrix) -> tuple[int, int] | None:
    """(p, q) of a real diagonal matrix with entries +-1, None otherwise."""
    if not (m.is_diagonal() and m.is_real()):
        return None
    entries = [m[i, i].re for i in range(m.size)]
    if any(x not in (1, -1) for x in entries):
        return None
    return entries.count(1), entries.count(-1)


@dataclass(frozen=True)
class AssertionResult:
    index: int
    kind: str
    claim: str
    passed: bool
    detail: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "assert": self.kind, "claim": self.claim, "passed": self.passed, **self.detail}


@dataclass(frozen=True)
class CaseReport:
    case_id: str
    description: str
    results: tuple[AssertionResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[AssertionResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case_id,
            "description": self.description,
            "passed": self.passed,
            "assertions": len(self.results),
            "failures": len(self.failures()),
            "results": [r.to_dict() for r in self.results],
        }


def read_case(case: str) -> dict[str, Any]:
    """Case document by bundled id or by file path.

    Raises:
        CaseNotFoundException: neither a bundled case nor an existing file.
    """
    if case in CASES:
        data = resources.files("realforms").joinpath("cases", f"{case}.json").read_bytes()
    elif Path(case).is_file():
        data = Path(case).read_bytes()
    else:
        raise CaseNotFoundException(f"unknown case {case!r}, expected one of {CASES} or a case file")
    doc = json_loads(data)
    if not isinstance(doc, dict):
        raise InvalidSpecException(f"case {case!r} is not a JSON object")
    return doc


def _involution(doc: dict[str, Any], matrices: dict[str, ExactMatrix]) -> InvolutionSpec:
    mode = doc.get("mode", "conjugate")
    j = doc.get("J")
    if isinstance(j, str):
        j = matrices[j]
    elif j is not None:
        j = ExactMatrix.from_json(j)
    return InvolutionSpec(mode, j)


def _ambient(doc: dict[str, Any], matrices: dict[str, ExactMatrix]) -> AmbientGroup:
    form = doc.get("form")
    if isinstance(form, str):
        form = matrices[form]
    elif form is not None:
        form = ExactMatrix.from_json(form)
    return AmbientGroup(doc.get("kind", "general-linear"), form)


def _check(
    kind: str, spec: dict[str, Any], m: dict[str, ExactMatrix], inv: InvolutionSpec, ambient: AmbientGroup
) -> tuple[bool, dict]:
    if kind in ("in-group", "not-in-group"):
        member = ambient.contains(m[spec["matrix"]])
        return member == (kind == "in-group"), {"ambient": ambient.kind, "member": member}
    if kind == "cocycle":
        return is_cocycle(m[spec["matrix"]], inv), {"matrix": m[spec["matrix"]].to_json()}
    if kind == "connects":
        h, g, target = m[spec["h"]], m[spec["g"]], m[spec["target"]]
        image = inv.apply(h) @ g @ h.inverse()
        return connects(h, g, target, inv), {"h": h.to_json(), "g": g.to_json(), "image": image.to_json()}
    if kind == "not-connects":
        g, target = m[spec["g"]], m[spec["target"]]
        hits = [name for name in spec["samples"] if connects(m[name], g, target, inv)]
        return not hits, {"samples": list(spec["samples"]), "connecting": hits}
    if kind in ("stabilizer-member", "stabilizer-nonmember"):
        h, g = m[spec["h"]], m[spec["g"]]
        member = in_twisted_stabilizer(h, g, inv)
        return member == (kind == "stabilizer-member"), {"h": h.to_json(), "g": g.to_json(), "member": member}
    if kind == "order":
        order = matrix_order(m[spec["matrix"]], int(spec.get("bound", 64)))
        return order == spec["order"], {"order": order}
    if kind == "product-signature":
        product = m[spec["left"]] @ m[spec["right"]]
        signature = diagonal_signature(product)
        return signature == tuple(spec["signature"]), {
            "product": product.to_json(),
            "signature": list(signature) if signature else None,
        }
    raise InvalidSpecException(f"unknown assertion {kind!r}, expected one of {ASSERTIONS}")


def run_case(case: str) -> CaseReport:
    """Execute the scripted assertions of a witness case.

    Args:
        case: bundled case id (normalizer-sl2, o11, orthogonal-diag) or a path to a case file.

    Returns:
        CaseReport with one AssertionResult per assertion, carrying the exact matrices involved.

    Raises:
        CaseNotFoundException: unknown case.
        InvalidSpecException: malformed case document.
    """
    doc = read_case(case)
    try:
        matrices = {name: ExactMatrix.from_json(rows) for name, rows in doc["matrices"].items()}
        default = _involution(doc.get("involution", {}), matrices)
        ambient = _ambient(doc.get("ambient", {}), matrices)
        results = []
        for i, spec in enumerate(doc["assertions"]):
            kind = spec["assert"]
            inv = _involution(spec["involution"], matrices) if "involution" in spec else default
            try:
                passed, detail = _check(kind, spec, matrices, inv, ambient)
            except SingularException as ex:
                passed, detail = False, {"error": f"{type(ex).__name__}: {ex}"}
            results.append(AssertionResult(i, kind, spec.get("claim", ""), passed, detail))
    except KeyError as ex:
        raise InvalidSpecException(f"case {case!r} is missing {ex}") from ex
    report = CaseReport(doc.get("id", case), doc.get("description", ""), tuple(results))
    logger.debug(f"run_case() {report.case_id} assertions={len(results)} failures={len(report.failures())}")
    return report
