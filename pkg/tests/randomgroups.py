from math import gcd

import numpy as np

from realforms.groups import FiniteGroupWithInvolution, center, conjugacy_class, load_group, subgroup_generated
from realforms.stacks import EquivariantAction, point_action, regular_action

FAMILIES = (
    ("cyclic", tuple(range(2, 13))),
    ("dihedral", tuple(range(4, 17, 2))),
    ("quaternion", (8, 12, 16)),
    ("symmetric", (3, 4)),
)


def _power_map(group, family, u):
    # r^k s^e -> r^(uk) s^e; index e*half + k for dihedral and dicyclic tables
    half = group.order if family == "cyclic" else group.order // 2
    index = np.arange(group.order)
    return (index // half) * half + (u * (index % half)) % half


def random_group(rng):
    """A builtin group with sigma = (conjugation by t) o (power automorphism x -> x^u), t fixed by the power map."""
    family, sizes = FAMILIES[int(rng.integers(len(FAMILIES)))]
    base = load_group({"builtin": family, "n": int(rng.choice(sizes))})
    if family == "symmetric":
        power, u = np.arange(base.order), 1
    else:
        half = base.order if family == "cyclic" else base.order // 2
        units = [u for u in range(1, half + 1) if gcd(u, half) == 1 and (u * u) % half == 1 % half]
        u = int(rng.choice(units))
        power = _power_map(base, family, u)
    z = center(base)
    candidates = [t for t in range(base.order) if power[t] == t and base.mul(t, t) in z]
    t = int(rng.choice(candidates))
    sigma = base.table[base.table[t, power], base.inverse[t]]
    return base.with_sigma(sigma, name=f"{base.name}[u={u},t={base.label(t)}]")


def regular_copies(group: FiniteGroupWithInvolution, swap: bool) -> EquivariantAction:
    """Two copies of the regular action; sigmaX swaps the copies when swap is set."""
    n = group.order
    act = np.hstack([group.table, group.table + n])
    sigma_x = np.concatenate([group.sigma + n, group.sigma] if swap else [group.sigma, group.sigma + n])
    return EquivariantAction(group, act, sigma_x)


def random_action(rng, group, free=False):
    choice = int(rng.integers(3 if free else 4))
    if choice == 0:
        return regular_action(group)
    if choice in (1, 2):
        return regular_copies(group, swap=choice == 2)
    return point_action(group)


def sigma_stable_subgroup(rng, group, normal=False):
    x = int(rng.integers(group.order))
    generators = [x, int(group.sigma[x])]
    if normal:
        generators = sorted(set(conjugacy_class(group, generators[0])) | set(conjugacy_class(group, generators[1])))
    return subgroup_generated(group, generators)
