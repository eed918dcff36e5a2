import json
from fractions import Fraction

import numpy as np
import pytest

from realforms.exceptions import CaseNotFoundException, InvalidSpecException, SingularException
from realforms.matrices import (
    CASES,
    IMAG,
    ONE,
    AmbientGroup,
    ExactMatrix,
    GaussianRational,
    InvolutionSpec,
    connects,
    diagonal_signature,
    in_twisted_stabilizer,
    is_cocycle,
    matrix_order,
    read_case,
    run_case,
)

CONJUGATE = InvolutionSpec()


def test_gaussian_arithmetic():
    z = GaussianRational(1, 1)
    assert z * z.conjugate() == GaussianRational(2)
    assert IMAG * IMAG == GaussianRational(-1)
    assert ONE / z == GaussianRational(Fraction(1, 2), Fraction(-1, 2))
    assert 1 - IMAG == GaussianRational(1, -1)
    assert z.norm() == 2
    assert str(GaussianRational(Fraction(1, 2), -3)) == "1/2-3i"
    with pytest.raises(ZeroDivisionError):
        z / 0


def test_from_parts():
    assert GaussianRational.from_parts([3, 5, -4, 5]) == GaussianRational(Fraction(3, 5), Fraction(-4, 5))
    assert GaussianRational.from_parts([3, 5, -4, 5]).to_parts() == [3, 5, -4, 5]
    with pytest.raises(InvalidSpecException):
        GaussianRational.from_parts([1, 0, 0, 1])
    with pytest.raises(InvalidSpecException):
        GaussianRational.from_parts([1, 1])


def test_matrix_inverse():
    m = ExactMatrix.of([[2, 0, 0], [0, 1, 1], [0, 0, 1]])
    assert m.inverse() == ExactMatrix.of([[Fraction(1, 2), 0, 0], [0, 1, -1], [0, 0, 1]])
    assert (m @ m.inverse()).is_identity()
    z = ExactMatrix.of([[IMAG, 1], [0, 1]])
    assert (z.inverse() @ z).is_identity()


def test_singular():
    with pytest.raises(SingularException):
        ExactMatrix.of([[1, 2], [2, 4]]).inverse()
    with pytest.raises(SingularException):
        ExactMatrix.of([[1, 2, 3], [4, 5, 6], [7, 8, 9]]).inverse()


def test_determinant():
    assert ExactMatrix.diagonal([2, 3, 5]).determinant() == GaussianRational(30)
    swap = ExactMatrix.of([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert swap.determinant() == GaussianRational(-1)
    assert ExactMatrix.of([[IMAG, 0], [0, IMAG]]).determinant() == GaussianRational(-1)


def test_non_square():
    with pytest.raises(InvalidSpecException):
        ExactMatrix.of([[1, 2]])


def test_matrix_order():
    rotation = ExactMatrix.of([[0, -1], [1, 0]])
    assert matrix_order(rotation) == 4
    assert matrix_order(ExactMatrix.identity(3)) == 1
    assert matrix_order(ExactMatrix.diagonal([2, 1])) is None


def test_involution_spec():
    j = ExactMatrix.of([[0, 1], [1, 0]])
    swap = InvolutionSpec("conjugate-by-J", j)
    m = ExactMatrix.of([[IMAG, 2], [0, 1]])
    assert swap.apply(m) == ExactMatrix.of([[1, 0], [2, -IMAG]])
    assert swap.apply(swap.apply(m)) == m
    with pytest.raises(InvalidSpecException):
        InvolutionSpec("conjugate-by-J", ExactMatrix.diagonal([2, 1]))
    with pytest.raises(InvalidSpecException):
        InvolutionSpec("conjugate-by-J")
    with pytest.raises(InvalidSpecException):
        InvolutionSpec("transpose")  # type: ignore[arg-type]


def test_cocycles_and_connections():
    assert is_cocycle(ExactMatrix.diagonal([1, -1]), CONJUGATE)
    assert is_cocycle(ExactMatrix.diagonal([IMAG, 1]), CONJUGATE)
    assert not is_cocycle(ExactMatrix.diagonal([2, 1]), CONJUGATE)
    h = ExactMatrix.diagonal([IMAG, 1])
    # conj(h) h^-1 = diag(-1, 1)
    assert connects(h, ExactMatrix.identity(2), ExactMatrix.diagonal([-1, 1]), CONJUGATE)
    assert not connects(ExactMatrix.identity(2), ExactMatrix.identity(2), ExactMatrix.diagonal([-1, 1]), CONJUGATE)


def test_twisted_stabilizer_membership():
    g = ExactMatrix.diagonal([1, -1])
    assert in_twisted_stabilizer(ExactMatrix.diagonal([2, 3]), g, CONJUGATE)
    assert not in_twisted_stabilizer(ExactMatrix.of([[1, 1], [0, 1]]), g, CONJUGATE)


def test_diagonal_signature():
    assert diagonal_signature(ExactMatrix.diagonal([1, -1, -1])) == (1, 2)
    assert diagonal_signature(ExactMatrix.diagonal([1, 2])) is None
    assert diagonal_signature(ExactMatrix.diagonal([IMAG, 1])) is None


@pytest.mark.parametrize("case", CASES)
def test_bundled_cases_pass(case):
    report = run_case(case)
    assert report.case_id == case
    assert report.passed, [r.to_dict() for r in report.failures()]
    result = report.to_dict()
    assert result["failures"] == 0
    assert result["assertions"] == len(result["results"]) > 0


def test_unknown_case():
    with pytest.raises(CaseNotFoundException):
        run_case("nope")


def test_case_file(tmp_path):
    zero = [[0, 1, 0, 1], [0, 1, 0, 1]]
    one = [[1, 1, 0, 1], [0, 1, 0, 1]]
    doc = {
        "id": "custom",
        "matrices": {"S": [zero, zero], "I": [one, [[0, 1, 0, 1], [1, 1, 0, 1]]]},
        "assertions": [
            {"assert": "cocycle", "claim": "singular", "matrix": "S"},
            {"assert": "order", "claim": "identity", "matrix": "I", "order": 1},
        ],
    }
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(doc))
    report = run_case(str(path))
    assert [r.passed for r in report.results] == [False, True]
    assert "SingularException" in report.results[0].detail["error"]


def test_malformed_case_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"matrices": {}}))
    with pytest.raises(InvalidSpecException):
        run_case(str(path))
    path.write_text(json.dumps({"matrices": {}, "assertions": [{"assert": "bogus"}]}))
    with pytest.raises(InvalidSpecException):
        run_case(str(path))


def test_transpose_and_antidiagonal():
    m = ExactMatrix.of([[1, IMAG], [3, 4]])
    assert m.transpose() == ExactMatrix.of([[1, 3], [IMAG, 4]])
    assert ExactMatrix.of([[0, 2], [IMAG, 0]]).is_antidiagonal()
    assert not m.is_antidiagonal()


def test_ambient_group_membership():
    rotation = ExactMatrix.of([[0, -1], [1, 0]])
    boost = ExactMatrix.of([[Fraction(5, 4), Fraction(3, 4)], [Fraction(3, 4), Fraction(5, 4)]])
    orthogonal = AmbientGroup("orthogonal")
    assert orthogonal.contains(rotation)
    assert not orthogonal.contains(boost)
    lorentz = AmbientGroup("orthogonal", ExactMatrix.diagonal([1, -1]))
    assert lorentz.contains(boost)
    assert not lorentz.contains(rotation)
    normalizer = AmbientGroup("torus-normalizer")
    assert normalizer.contains(rotation)
    assert normalizer.contains(ExactMatrix.diagonal([2, Fraction(1, 2)]))
    assert not normalizer.contains(ExactMatrix.of([[1, 1], [0, 1]]))
    assert not normalizer.contains(ExactMatrix.diagonal([2, 1]))
    assert not normalizer.contains(ExactMatrix.identity(3))
    assert AmbientGroup().contains(boost)
    assert not AmbientGroup().contains(ExactMatrix.of([[1, 2], [2, 4]]))
    with pytest.raises(InvalidSpecException):
        AmbientGroup("unitary")
    with pytest.raises(InvalidSpecException):
        AmbientGroup("torus-normalizer", ExactMatrix.identity(2))


@pytest.mark.parametrize("case", ["o11", "normalizer-sl2"])
def test_every_case_matrix_lies_in_the_ambient_group(case):
    doc = read_case(case)
    checked = {a["matrix"] for a in doc["assertions"] if a["assert"] == "in-group"}
    assert checked == set(doc["matrices"])
    report = run_case(case)
    members = [r for r in report.results if r.kind == "in-group"]
    assert len(members) == len(doc["matrices"])
    assert all(r.passed and r.detail["member"] for r in members)


def test_orthogonal_case_membership():
    report = run_case("orthogonal-diag")
    outside = [r for r in report.results if r.kind == "not-in-group"]
    assert [r.detail["member"] for r in outside] == [False]
    assert all(r.detail["ambient"] == "orthogonal" for r in report.results if r.kind.endswith("in-group"))


def _gaussian(rng):
    num = rng.integers(-9, 10, size=2)
    den = rng.integers(1, 7, size=2)
    return GaussianRational(Fraction(int(num[0]), int(den[0])), Fraction(int(num[1]), int(den[1])))


def _matrix(rng, size):
    return ExactMatrix.of([[_gaussian(rng) for _ in range(size)] for _ in range(size)])


def _invertible(rng, size):
    while True:
        m = _matrix(rng, size)
        if m.determinant():
            return m


INVOLUTIONS = [
    CONJUGATE,
    InvolutionSpec("conjugate-by-J", ExactMatrix.of([[0, 1], [1, 0]])),
    InvolutionSpec("conjugate-by-J", ExactMatrix.of([[0, IMAG], [IMAG, 0]])),
]


def test_random_gaussian_field_axioms():
    rng = np.random.default_rng(101)
    for _ in range(300):
        a, b, c = _gaussian(rng), _gaussian(rng), _gaussian(rng)
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a - a == GaussianRational()
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()
        if a:
            assert a * (ONE / a) == ONE
            assert (b / a) * a == b


@pytest.mark.parametrize("inv", INVOLUTIONS)
def test_random_involution_is_multiplicative(inv):
    rng = np.random.default_rng(103)
    for _ in range(40):
        m, n = _matrix(rng, 2), _invertible(rng, 2)
        assert inv.apply(m @ n) == inv.apply(m) @ inv.apply(n)
        assert inv.apply(inv.apply(m)) == m
        assert inv.apply(n.inverse()) == inv.apply(n).inverse()


def _cocycles(inv):
    if inv is CONJUGATE:
        return [ExactMatrix.identity(2), ExactMatrix.diagonal([1, -1]), ExactMatrix.diagonal([-1, -1])]
    return [ExactMatrix.identity(2)]


@pytest.mark.parametrize("inv", INVOLUTIONS)
def test_random_connects_groupoid_laws(inv):
    rng = np.random.default_rng(107)
    for g in _cocycles(inv):
        assert connects(ExactMatrix.identity(2), g, g, inv)
        for _ in range(10):
            h1, h2 = _invertible(rng, 2), _invertible(rng, 2)
            g1 = inv.apply(h1) @ g @ h1.inverse()
            g2 = inv.apply(h2) @ g1 @ h2.inverse()
            assert is_cocycle(g1, inv) and is_cocycle(g2, inv)
            assert connects(h1, g, g1, inv)
            assert connects(h2, g1, g2, inv)
            assert connects(h2 @ h1, g, g2, inv)
            assert connects(h1.inverse(), g1, g, inv)


def _stabilizer_element(rng, g, inv):
    # X + g^-1 sigma(X) g always satisfies sigma(h) g = g h
    g_inverse = g.inverse()
    while True:
        x = _matrix(rng, g.size)
        y = g_inverse @ inv.apply(x) @ g
        h = ExactMatrix.of([[x[i, j] + y[i, j] for j in range(g.size)] for i in range(g.size)])
        if h.determinant():
            return h


@pytest.mark.parametrize("inv", INVOLUTIONS)
def test_random_twisted_stabilizer_is_a_subgroup(inv):
    rng = np.random.default_rng(109)
    for base in _cocycles(inv):
        h0 = _invertible(rng, 2)
        for g in (base, inv.apply(h0) @ base @ h0.inverse()):
            for _ in range(8):
                h1, h2 = _stabilizer_element(rng, g, inv), _stabilizer_element(rng, g, inv)
                assert in_twisted_stabilizer(h1, g, inv)
                assert in_twisted_stabilizer(h2, g, inv)
                assert in_twisted_stabilizer(h1 @ h2, g, inv)
                assert in_twisted_stabilizer(h1.inverse(), g, inv)
