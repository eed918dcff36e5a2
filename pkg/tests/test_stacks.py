import json
from fractions import Fraction

import numpy as np
import pytest

from realforms.exceptions import (
    CapExceededException,
    InvalidSpecException,
    NotAnInvolutionException,
    NotEquivariantException,
    NotFreeException,
    NotNormalException,
    NotSigmaStableException,
)
from realforms.galois import h1
from realforms.groups import center, load_group, make_subgroup, trivial_group
from realforms.stacks import (
    EquivariantAction,
    compare_groupoids,
    fixed_point_groupoid,
    induced_action,
    load_action,
    point_action,
    quotient_action,
    regular_action,
    relabel_points,
)

from .randomgroups import random_action, sigma_stable_subgroup


@pytest.mark.parametrize(
    "spec", ["builtin:cyclic:2", "builtin:cyclic:6:inversion", "builtin:dihedral:8", "builtin:quaternion:8"]
)
def test_point_matches_h1(spec):
    group = load_group(spec)
    report = fixed_point_groupoid(point_action(group))
    classes = h1(group).classes
    assert report.count == len(classes)
    assert [c.representative for c in report.components] == [(c.representative, 0) for c in classes]
    assert [c.automorphisms.members for c in report.components] == [c.stabilizer.members for c in classes]
    assert [c.size for c in report.components] == [c.orbit_size for c in classes]


def test_regular_action_is_free():
    report = fixed_point_groupoid(regular_action(load_group("builtin:cyclic:4")))
    assert report.objects == ((0, 0), (0, 1), (0, 2), (0, 3))
    assert report.count == 1
    assert report.components[0].aut_order == 1
    assert report.mass() == Fraction(1)


def test_action_validation():
    c2 = load_group("builtin:cyclic:2")
    with pytest.raises(InvalidSpecException):
        EquivariantAction(c2, np.zeros((3, 1), dtype=np.int64), np.zeros(1, dtype=np.int64))
    with pytest.raises(InvalidSpecException):
        # the generator does not permute the points
        EquivariantAction(c2, np.array([[0, 1], [0, 0]]), np.arange(2))
    with pytest.raises(NotAnInvolutionException):
        EquivariantAction(trivial_group(), np.array([[0, 1, 2]]), np.array([1, 2, 0]))
    with pytest.raises(NotEquivariantException):
        EquivariantAction(c2, np.array([[0, 1, 2], [1, 0, 2]]), np.array([0, 2, 1]))


def test_object_cap():
    with pytest.raises(CapExceededException):
        fixed_point_groupoid(regular_action(load_group("builtin:cyclic:4")), object_cap=8)


def test_induction_from_center():
    d8 = load_group("builtin:dihedral:8")
    z = center(d8)
    base = point_action(z.to_group())
    induced = induced_action(d8, z, base)
    assert induced.points == 4
    comparison = compare_groupoids(fixed_point_groupoid(base), fixed_point_groupoid(induced))
    assert comparison.equivalent
    assert comparison.counts == (2, 2)


@pytest.mark.parametrize(
    ("spec", "members"),
    [
        ("builtin:cyclic:4", [0, 2]),
        ("builtin:cyclic:6:inversion", [0, 2, 4]),
        ("builtin:symmetric:3", [0, 3, 4]),
        ("builtin:quaternion:8", [0, 1, 2, 3]),
    ],
)
def test_induction_is_equivalence(spec, members):
    group = load_group(spec)
    subgroup = make_subgroup(group, members)
    base = regular_action(subgroup.to_group())
    induced = induced_action(group, subgroup, base)
    assert induced.points == group.order
    assert compare_groupoids(fixed_point_groupoid(base), fixed_point_groupoid(induced)).equivalent


def test_induction_rejections():
    v4 = load_group({"builtin": "dihedral", "n": 4, "involution": [0, 2, 1, 3]})
    h = make_subgroup(v4, [0, 1])
    with pytest.raises(NotSigmaStableException):
        induced_action(v4, h, point_action(h.to_group(restrict_involution=False)))
    d8 = load_group("builtin:dihedral:8")
    with pytest.raises(InvalidSpecException):
        induced_action(d8, center(d8), point_action(load_group("builtin:cyclic:3")))


def test_quotient_of_regular():
    action = regular_action(load_group("builtin:cyclic:4"))
    result = quotient_action(action, make_subgroup(action.group, [0, 2]))
    assert result.group.order == 2
    assert result.points == 2
    assert compare_groupoids(fixed_point_groupoid(action), fixed_point_groupoid(result)).equivalent


def test_quotient_rejections():
    c4 = load_group("builtin:cyclic:4")
    with pytest.raises(NotFreeException):
        quotient_action(point_action(c4), make_subgroup(c4, [0, 2]))
    s3 = load_group("builtin:symmetric:3")
    with pytest.raises(NotNormalException):
        quotient_action(regular_action(s3), make_subgroup(s3, [0, 1]))
    v4 = load_group({"builtin": "dihedral", "n": 4, "involution": [0, 2, 1, 3]})
    with pytest.raises(NotSigmaStableException):
        quotient_action(regular_action(v4), make_subgroup(v4, [0, 1]))


def test_relabel_points_preserves_groupoid():
    action = regular_action(load_group("builtin:dihedral:8"))
    rng = np.random.default_rng(3)
    for _ in range(3):
        moved = relabel_points(action, rng.permutation(action.points))
        assert compare_groupoids(fixed_point_groupoid(action), fixed_point_groupoid(moved)).equivalent


def test_load_action(tmp_path):
    (tmp_path / "c2.json").write_text(json.dumps({"kind": "table", "table": [[0, 1], [1, 0]]}))
    doc = {"group": "c2.json", "points": 2, "action": [[0, 1], [1, 0]], "sigmaX": [0, 1], "name": "flip"}
    path = tmp_path / "flip.json"
    path.write_text(json.dumps(doc))
    action = load_action(str(path))
    assert action.name == "flip"
    assert action.group.order == 2
    report = fixed_point_groupoid(action)
    assert report.count == 1
    assert report.to_dict()["components"][0]["aut_order"] == 1


def test_load_action_defaults():
    action = load_action({"group": "builtin:cyclic:2", "points": 3})
    assert action.act.tolist() == [[0, 1, 2], [0, 1, 2]]
    # two components per fixed point
    assert fixed_point_groupoid(action).count == 6
    with pytest.raises(InvalidSpecException):
        load_action({"points": 3})
    with pytest.raises(InvalidSpecException):
        load_action({"group": "builtin:cyclic:2", "points": 2, "sigmaX": [0]})


def test_random_corpus_point_groupoid_matches_h1(group_corpus):
    for group in group_corpus:
        report = fixed_point_groupoid(point_action(group))
        classes = h1(group).classes
        assert [c.representative for c in report.components] == [(c.representative, 0) for c in classes]
        assert [c.automorphisms.members for c in report.components] == [c.stabilizer.members for c in classes]


def test_random_induction_equivalences(group_corpus):
    rng = np.random.default_rng(31)
    for group in group_corpus[:30]:
        subgroup = sigma_stable_subgroup(rng, group)
        base = random_action(rng, subgroup.to_group())
        induced = induced_action(group, subgroup, base)
        assert induced.points == group.order // subgroup.order * base.points
        comparison = compare_groupoids(fixed_point_groupoid(base), fixed_point_groupoid(induced))
        assert comparison.equivalent, (group.name, subgroup.members)


def test_random_quotient_equivalences(group_corpus):
    rng = np.random.default_rng(37)
    for group in group_corpus[:30]:
        normal = sigma_stable_subgroup(rng, group, normal=True)
        action = random_action(rng, group, free=True)
        action = relabel_points(action, rng.permutation(action.points))
        result = quotient_action(action, normal)
        assert result.group.order == group.order // normal.order
        assert result.points == action.points // normal.order
        comparison = compare_groupoids(fixed_point_groupoid(action), fixed_point_groupoid(result))
        assert comparison.equivalent, (group.name, normal.members)
