from fractions import Fraction

import numpy as np
import pytest

from realforms.exceptions import (
    NotACharacterException,
    NotACocycleException,
    NotAStrongInvolutionException,
    NotEquivariantException,
)
from realforms.forms import SignatureClass
from realforms.galois import (
    character_components,
    cocycles,
    describe_shape,
    h1,
    inner_class_cardinalities,
    is_strong_involution,
    make_character,
    mass_formula_holds,
    realize_diagonal_form,
    strong_involutions,
    twist,
    twisted_orbit,
    twisted_stabilizer,
    twisting_bijection_check,
    two_torsion_characters,
    witt_invariant_rank,
)
from realforms.groups import FiniteGroupWithInvolution, centralizer, conjugacy_classes, load_group


def test_c2_trivial():
    report = h1(load_group("builtin:cyclic:2"))
    assert report.count == 2
    assert [c.stabilizer_order for c in report.classes] == [2, 2]
    assert report.mass() == Fraction(1)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_odd_cyclic_inversion(n):
    report = h1(load_group(f"builtin:cyclic:{n}:inversion"))
    assert report.cocycle_count == n
    assert [c.stabilizer_order for c in report.classes] == [1]


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_even_cyclic_inversion(n):
    report = h1(load_group(f"builtin:cyclic:{n}:inversion"))
    assert [c.stabilizer_order for c in report.classes] == [2, 2]
    assert [c.representative for c in report.classes] == [0, 1]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_even_cyclic_trivial(n):
    report = h1(load_group(f"builtin:cyclic:{2 * n}"))
    assert [c.stabilizer_order for c in report.classes] == [2 * n, 2 * n]
    assert [c.representative for c in report.classes] == [0, n]


def test_d8_trivial():
    report = h1(load_group("builtin:dihedral:8"))
    assert [c.representative for c in report.classes] == [0, 2, 4, 5]
    assert [c.stabilizer_order for c in report.classes] == [8, 8, 4, 4]
    assert [c.orbit for c in report.classes] == [(0,), (2,), (4, 6), (5, 7)]
    assert report.to_dict()["classes"][2]["stabilizer_shape"] == "C2xC2"
    assert report.to_dict()["classes"][0]["stabilizer_shape"] == "D8"
    assert report.mass() == Fraction(3, 4)


def test_q8_trivial():
    report = h1(load_group("builtin:quaternion:8"))
    assert [c.representative for c in report.classes] == [0, 2]
    assert [c.stabilizer_order for c in report.classes] == [8, 8]
    assert report.to_dict()["classes"][0]["stabilizer_shape"] == "Q8"


def test_trivial_group():
    group = FiniteGroupWithInvolution(np.zeros((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64))
    assert witt_invariant_rank(group) == 1


@pytest.mark.parametrize(
    "spec",
    [
        "builtin:cyclic:6",
        "builtin:cyclic:12:inversion",
        "builtin:dihedral:12",
        "builtin:quaternion:16",
        "builtin:symmetric:4",
    ],
)
def test_orbits_partition_cocycles(spec):
    group = load_group(spec)
    report = h1(group)
    members = sorted(g for c in report.classes for g in c.orbit)
    assert members == list(cocycles(group))
    for c in report.classes:
        assert c.orbit_size * c.stabilizer_order == group.order
    assert mass_formula_holds(report)


def test_random_involutions_satisfy_orbit_stabilizer():
    rng = np.random.default_rng(7)
    s4 = load_group("builtin:symmetric:4")
    for _ in range(5):
        # inner involutions: conjugation by a random element of order <= 2
        candidates = [g for g in range(s4.order) if s4.mul(g, g) == 0]
        x = int(rng.choice(candidates))
        sigma = s4.table[s4.table[x], s4.inverse[x]]
        group = s4.with_sigma(sigma)
        for g in cocycles(group):
            assert len(twisted_orbit(group, g)) * twisted_stabilizer(group, g).order == group.order


def test_describe_shape():
    assert describe_shape(1, {1: 1}) == "1"
    assert describe_shape(3, {1: 1, 3: 2}) == "C3"
    assert describe_shape(4, {1: 1, 2: 3}) == "C2xC2"
    assert describe_shape(8, {1: 1, 2: 1, 4: 6}) == "Q8"
    assert describe_shape(6, {1: 1, 2: 3, 3: 2}) == "S3"
    assert describe_shape(12, {1: 1, 2: 7, 3: 2, 6: 2}) is None


def test_strong_involutions_c4():
    report = strong_involutions(load_group("builtin:cyclic:4"))
    assert report.norm_subgroup == (0, 2)
    assert report.tate_order == 2
    assert [c.representative for c in report.classes] == [0, 1, 2, 3]
    assert [c.central_invariant for c in report.classes] == [0, 2, 0, 2]
    assert all(c.reduced_trivial for c in report.classes)
    assert [c.representative for c in report.trivial_invariant_classes()] == [0, 2]


@pytest.mark.parametrize(
    "spec", ["builtin:dihedral:8", "builtin:quaternion:8", "builtin:cyclic:6:inversion", "builtin:symmetric:3"]
)
def test_trivial_invariant_classes_match_h1(spec):
    group = load_group(spec)
    strong = strong_involutions(group).trivial_invariant_classes()
    assert [c.representative for c in strong] == [c.representative for c in h1(group).classes]
    assert [c.orbit for c in strong] == [c.orbit for c in h1(group).classes]


def test_is_strong_involution():
    s3 = load_group("builtin:symmetric:3")
    assert is_strong_involution(s3, 1)
    assert not is_strong_involution(s3, 3)


def test_twist_by_cocycle():
    c2 = load_group("builtin:cyclic:2")
    assert twist(c2, 1).name == "C2^g"
    assert twist(c2, 0).name == "C2"
    d8 = load_group("builtin:dihedral:8")
    # conjugation by s fixes s and r^2 s, inverts r
    assert twist(d8, 4).sigma.tolist() == [0, 3, 2, 1, 4, 7, 6, 5]


def test_twist_rejections():
    c4 = load_group("builtin:cyclic:4")
    with pytest.raises(NotACocycleException, match="Z\\(G\\)"):
        twist(c4, 1)
    assert twist(c4, 1, require_cocycle=False).sigma.tolist() == [0, 1, 2, 3]
    s3 = load_group("builtin:symmetric:3")
    with pytest.raises(NotAStrongInvolutionException):
        twist(s3, 3, require_cocycle=False)


@pytest.mark.parametrize(
    "spec", ["builtin:dihedral:8", "builtin:quaternion:8", "builtin:cyclic:6:inversion", "builtin:symmetric:3"]
)
def test_twisting_bijection(spec):
    group = load_group(spec)
    for g0 in cocycles(group):
        report = twisting_bijection_check(group, g0)
        assert report.ok, report
        assert len(report.pairing) == h1(group).count


def test_characters():
    assert [chi.values for chi in two_torsion_characters(load_group("builtin:cyclic:2"))] == [(1, 1), (1, -1)]
    assert len(two_torsion_characters(load_group("builtin:dihedral:8"))) == 4
    assert len(two_torsion_characters(load_group("builtin:quaternion:8"))) == 4
    assert len(two_torsion_characters(load_group("builtin:cyclic:3"))) == 1
    c4 = two_torsion_characters(load_group("builtin:cyclic:4:inversion"))
    assert [chi.values for chi in c4] == [(1, 1, 1, 1), (1, -1, 1, -1)]


def test_characters_are_equivariant_homomorphisms():
    group = load_group({"builtin": "dihedral", "n": 8, "involution": [0, 1, 2, 3, 6, 7, 4, 5]})
    for chi in two_torsion_characters(group):
        assert make_character(group, chi.values) == chi


def test_make_character_errors():
    c2 = load_group("builtin:cyclic:2")
    with pytest.raises(NotACharacterException):
        make_character(c2, [1, 1, -1])
    with pytest.raises(NotACharacterException):
        make_character(c2, [1, 2])
    with pytest.raises(NotACharacterException):
        make_character(load_group("builtin:cyclic:3"), [1, -1, 1])
    v4 = load_group({"builtin": "dihedral", "n": 4, "involution": [0, 2, 1, 3]})
    with pytest.raises(NotEquivariantException):
        make_character(v4, [1, -1, 1, -1])


def test_character_components():
    c2 = load_group("builtin:cyclic:2")
    sign = make_character(c2, [1, -1])
    components = character_components(c2, sign)
    assert [c.trivial for c in components] == [False, False]
    assert [c.form_sign for c in components] == [1, -1]
    trivial = make_character(c2, [1, 1])
    assert all(c.trivial for c in character_components(c2, trivial))


def test_realize_diagonal_form():
    c2 = load_group("builtin:cyclic:2")
    sign, trivial = make_character(c2, [1, -1]), make_character(c2, [1, 1])
    assert realize_diagonal_form(c2, [sign, sign]) == [(0, SignatureClass(2, 0)), (1, SignatureClass(0, 2))]
    assert realize_diagonal_form(c2, [trivial, sign]) == [(0, SignatureClass(2, 0)), (1, SignatureClass(1, 1))]


def test_inner_class_cardinalities_q8():
    counts = inner_class_cardinalities(load_group("builtin:quaternion:8"))
    assert [c.representative for c in counts] == [0, 2, 1, 4, 5]
    assert [c.h1_count for c in counts] == [2, 2, 3, 3, 3]
    assert [c.central_invariant for c in counts] == [0, 0, 2, 2, 2]


def test_random_corpus_orbit_stabilizer_and_mass(group_corpus):
    assert len(group_corpus) >= 100
    for group in group_corpus:
        report = h1(group)
        assert sorted(g for c in report.classes for g in c.orbit) == list(cocycles(group)), group.name
        for c in report.classes:
            assert c.orbit_size * c.stabilizer_order == group.order, group.name
        assert mass_formula_holds(report), group.name
        assert report.mass() == Fraction(len(cocycles(group)), group.order)


def test_random_corpus_twisting_bijection(group_corpus):
    for group in group_corpus:
        for g0 in cocycles(group):
            assert twisting_bijection_check(group, g0).ok, (group.name, g0)


def test_random_corpus_strong_involutions_match_h1(group_corpus):
    for group in group_corpus:
        strong = strong_involutions(group).trivial_invariant_classes()
        assert [c.orbit for c in strong] == [c.orbit for c in h1(group).classes], group.name


@pytest.mark.parametrize(
    "spec",
    ["builtin:cyclic:8", "builtin:dihedral:8", "builtin:dihedral:12", "builtin:quaternion:8", "builtin:symmetric:4"],
)
def test_trivial_involution_matches_conjugacy(spec):
    group = load_group(spec)
    report = h1(group)
    involutions = [cls for cls in conjugacy_classes(group) if group.mul(cls[0], cls[0]) == 0]
    assert [c.orbit for c in report.classes] == involutions
    for c in report.classes:
        assert c.stabilizer.members == centralizer(group, c.representative).members
