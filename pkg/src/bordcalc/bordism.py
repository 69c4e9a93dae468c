"""Equivariant surface bordism groups assembled from the subgroup lattice.

For each conjugacy class (K) the report collects: one Z summand in the
unitary flavor (the trivial-action part), free summands counted by orbits
of faithful circle characters of cyclic K under the Weyl action (and
complex conjugation in the oriented flavor), and the torsion contribution
of the Weyl group's toral homology quotient. The torsion part is the same
in both flavors. Alongside the assembled groups this module exposes the
fixed shape tables for adjacent families in dimensions 2 and 3 and the
two cut-and-paste corollaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional

from .bogomolov import BogomolovResult, bogomolov_auto
from .errors import InputError, PreconditionError
from .groups import FiniteGroup, SpecialShape, classify_special, conj_action_on_cyclic, subgroup_as_group
from .lattice import Lattice, SubgroupClass, subgroup_classes
from .smith import AbelianGroupDescriptor, TRIVIAL_GROUP

FLAVOR_U = "U"
FLAVOR_SO = "SO"


def _euler_phi(k: int) -> int:
    out, n, d = 1, k, 2
    while d * d <= n:
        if n % d == 0:
            out *= d - 1
            n //= d
            while n % d == 0:
                out *= d
                n //= d
        d += 1
    if n > 1:
        out *= n - 1
    return out


def _unit_subgroup_with_minus_one(k: int, units) -> int:
    """Order of <A, -1> inside (Z/k)^x."""
    elems = {1}
    gens = set(int(u) % k for u in units) | {(k - 1) % k}
    frontier = [1]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = (x * g) % k
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(elems)


def hominj_orbit_counts(k: int, units) -> tuple[int, int]:
    """Orbit counts of faithful characters of Z/k under a unit subgroup.

    Returns (u_count, so_count): orbits of the phi(k) faithful characters
    under A, and under <A, -1> (conjugation-folded), with the conventions
    that k = 1 contributes nothing and k <= 2 contributes nothing oriented.
    Both are exact because translation inside a group acts freely.
    """
    if k < 1:
        raise InputError("cyclic order must be positive")
    units = tuple(int(u) % k for u in units) if k > 1 else (0,)
    if k == 1:
        return (0, 0)
    phi = _euler_phi(k)
    aset = set(units)
    if not aset or any(gcd(u, k) != 1 for u in aset):
        raise InputError("units must be invertible mod k")
    # closure check: A must be a subgroup of (Z/k)^x
    for u in aset:
        for v in aset:
            if (u * v) % k not in aset:
                raise InputError("units do not form a subgroup")
    u_count = phi // len(aset)
    if phi % len(aset):
        raise InputError("unit set size must divide phi(k)")
    if k <= 2:
        return (u_count, 0)
    so_count = phi // _unit_subgroup_with_minus_one(k, aset)
    return (u_count, so_count)


@dataclass(frozen=True)
class ClassContribution:
    """Per-conjugacy-class summands of the assembled bordism group."""

    subgroup_order: int
    class_size: int
    shape: SpecialShape
    weyl_order: int
    u_free: int
    so_free: int
    torsion: AbelianGroupDescriptor
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class BordismReport:
    flavor: str
    group: FiniteGroup
    total: AbelianGroupDescriptor
    contributions: tuple[ClassContribution, ...]

    @property
    def free_rank(self) -> int:
        return self.total.free_rank

    @property
    def torsion(self) -> AbelianGroupDescriptor:
        return AbelianGroupDescriptor(0, self.total.invariant_factors)


def _class_data(G: FiniteGroup, cls: SubgroupClass) -> tuple[SpecialShape, int, int, BogomolovResult]:
    Ksub = cls.representative
    Kgrp, _ = subgroup_as_group(G, Ksub)
    shape = classify_special(Kgrp)
    if shape.tag == "cyclic":
        units = conj_action_on_cyclic(G, Ksub)
        u_count, so_count = hominj_orbit_counts(shape.k, units)
    else:
        u_count = so_count = 0
    weyl_result = bogomolov_auto(cls.weyl)
    return shape, u_count, so_count, weyl_result


def omega2(G: FiniteGroup, flavor: str) -> BordismReport:
    """The assembled equivariant surface bordism group for one flavor."""
    if flavor not in (FLAVOR_U, FLAVOR_SO):
        raise InputError("flavor must be 'U' or 'SO'")
    key = ("omega2", flavor)
    if key in G._memo:
        return G._memo[key]
    lat = subgroup_classes(G)
    contributions = []
    free_rank = 0
    torsion_orders: list[int] = []
    for cls in lat.classes:
        shape, u_count, so_count, weyl_result = _class_data(G, cls)
        if weyl_result.descriptor is None:
            raise PreconditionError(
                "torsion contribution has unresolved structure; "
                "rerun with the integral method"
            )
        torsion = weyl_result.descriptor
        u_free = 1 + u_count
        so_free = so_count
        notes = ["Omega_2^U summand"]
        if u_count:
            notes.append(f"{u_count} faithful-character orbit(s)")
        if not torsion.is_trivial():
            notes.append(f"Weyl torsion {torsion}")
        contributions.append(
            ClassContribution(
                subgroup_order=cls.order,
                class_size=cls.class_size,
                shape=shape,
                weyl_order=cls.weyl.order,
                u_free=u_free,
                so_free=so_free,
                torsion=torsion,
                notes=tuple(notes),
            )
        )
        free_rank += u_free if flavor == FLAVOR_U else so_free
        torsion_orders.extend(torsion.invariant_factors)
    total = AbelianGroupDescriptor.from_cyclic_orders(torsion_orders, free_rank)
    report = BordismReport(flavor, G, total, tuple(contributions))
    G._memo[key] = report
    return report


def torsion_omega2(G: FiniteGroup) -> AbelianGroupDescriptor:
    """Direct sum of the Weyl-group toral quotients; flavor-independent."""
    report = omega2(G, FLAVOR_U)
    return report.torsion


# -- adjacent-family tables ------------------------------------------------------------


def adjacent_table_dim2(K: FiniteGroup, flavor: str) -> AbelianGroupDescriptor:
    """Surface bordism of the adjacent pair at (K), by shape lookup."""
    shape = classify_special(K)
    if flavor == FLAVOR_SO:
        if shape.tag == "cyclic" and shape.k == 2:
            return AbelianGroupDescriptor(0, (2,))
        if shape.tag == "cyclic" and shape.k > 2:
            return AbelianGroupDescriptor(_euler_phi(shape.k) // 2, ())
        return TRIVIAL_GROUP
    if flavor == FLAVOR_U:
        if shape.tag == "cyclic":
            # one Z for the trivial-action summand plus phi(k) characters
            extra = _euler_phi(shape.k) if shape.k > 1 else 0
            return AbelianGroupDescriptor(1 + extra, ())
        return AbelianGroupDescriptor(1, ())
    raise InputError("flavor must be 'U' or 'SO'")


def adjacent_table_dim3(K: FiniteGroup, flavor: str) -> AbelianGroupDescriptor:
    """Three-dimensional adjacent-family table; unitary is always zero."""
    if flavor == FLAVOR_U:
        return TRIVIAL_GROUP
    if flavor != FLAVOR_SO:
        raise InputError("flavor must be 'U' or 'SO'")
    shape = classify_special(K)
    if shape.tag == "dihedral":
        tau = _euler_phi(shape.k) // 2 if shape.k > 2 else 1
        return AbelianGroupDescriptor(0, tuple([2] * tau))
    if shape.tag in ("A4", "S4", "A5"):
        return AbelianGroupDescriptor(0, (2,))
    return TRIVIAL_GROUP


# -- cut-and-paste corollaries ----------------------------------------------------------


def sk2(G: FiniteGroup) -> tuple[AbelianGroupDescriptor, AbelianGroupDescriptor]:
    """(SK_2, reduced SK_2) of the classifying space of G."""
    result = bogomolov_auto(G)
    if result.descriptor is None:
        raise PreconditionError("SK_2 needs the resolved quotient structure")
    skbar = result.descriptor
    sk = AbelianGroupDescriptor(1 + skbar.free_rank, skbar.invariant_factors)
    return sk, skbar


def sk_point(n: int) -> tuple[Optional[AbelianGroupDescriptor], Optional[AbelianGroupDescriptor]]:
    """(SK_n, reduced SK_n) of the point.

    Dimensions 0 and 1 fall outside the displayed families and are
    reported as unspecified (None, None).
    """
    if n < 0:
        raise InputError("dimension must be nonnegative")
    if n in (0, 1):
        return (None, None)
    if n % 2 == 1:
        return (TRIVIAL_GROUP, TRIVIAL_GROUP)
    if n % 4 == 2:
        return (AbelianGroupDescriptor(1, ()), TRIVIAL_GROUP)
    return (AbelianGroupDescriptor(2, ()), AbelianGroupDescriptor(1, ()))
