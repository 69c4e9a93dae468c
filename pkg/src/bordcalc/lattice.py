"""Subgroup lattice up to conjugacy, with normalizers and Weyl groups.

Classes are found by cyclic extension: starting from the trivial subgroup,
every known class representative H is extended by closures <H, x> over
coset representatives x, and the results are deduplicated by conjugacy.
Each class carries its normalizer and Weyl group N_G(K)/K. A brute-force
enumerator doubles as the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import PreconditionError, ResourceLimitError
from .groups import (
    FiniteGroup,
    GroupMap,
    SubgroupHandle,
    normalizer,
    weyl_group,
)

BRUTE_FORCE_CAP = 192
LATTICE_CAP = 20000


def _closure_np(T: np.ndarray, seed: Iterable[int]) -> tuple[int, ...]:
    """Subgroup generated by ``seed``, via vectorized product saturation."""
    cur = np.unique(np.asarray(sorted(set(seed) | {0}), dtype=np.int64))
    while True:
        prods = np.unique(T[np.ix_(cur, cur)])
        if prods.shape[0] == cur.shape[0]:
            return tuple(int(x) for x in cur)
        cur = np.unique(np.concatenate([cur, prods]))


def _canonical_conjugate(G: FiniteGroup, elems: tuple[int, ...]) -> tuple[int, ...]:
    """Lexicographically least sorted conjugate of a subgroup element set."""
    T = G.table
    inv = G.inv
    arr = np.asarray(elems, dtype=np.int64)
    best = None
    for g in range(G.order):
        conj = np.sort(T[T[g, arr], inv[g]])
        key = tuple(int(x) for x in conj)
        if best is None or key < best:
            best = key
    return best


@dataclass(frozen=True)
class SubgroupClass:
    """One conjugacy class of subgroups: representative plus Weyl data."""

    representative: SubgroupHandle
    class_size: int
    normalizer: SubgroupHandle
    weyl: FiniteGroup
    weyl_projection: GroupMap

    def __post_init__(self):
        G = self.representative.parent
        if self.class_size != G.order // self.normalizer.order:
            raise PreconditionError("class size must be the normalizer index")
        if self.weyl.order * self.representative.order != self.normalizer.order:
            raise PreconditionError("Weyl order must be |N|/|K|")

    @property
    def order(self) -> int:
        return self.representative.order


@dataclass(frozen=True)
class Lattice:
    group: FiniteGroup
    classes: tuple[SubgroupClass, ...]

    def __post_init__(self):
        orders = [c.order for c in self.classes]
        if 1 not in orders or self.group.order not in orders:
            raise PreconditionError("lattice must contain trivial and full classes")

    @property
    def total_subgroups(self) -> int:
        return sum(c.class_size for c in self.classes)


def subgroup_classes(G: FiniteGroup) -> Lattice:
    """All subgroup conjugacy classes, by cyclic extension with dedup."""
    if G.order > LATTICE_CAP:
        raise ResourceLimitError("group too large for lattice enumeration")
    if "lattice" in G._memo:
        return G._memo["lattice"]
    T = G.table
    trivial = (0,)
    canon_seen = {trivial}
    worklist = [trivial]
    while worklist:
        H = worklist.pop()
        hset = set(H)
        seen_cosets = set(H)
        for x in range(1, G.order):
            if x in seen_cosets:
                continue
            seen_cosets.update(int(T[x, h]) for h in H)
            ext = _closure_np(T, H + (x,))
            canon = _canonical_conjugate(G, ext)
            if canon not in canon_seen:
                canon_seen.add(canon)
                worklist.append(canon)
    classes = []
    for canon in sorted(canon_seen, key=lambda t: (len(t), t)):
        K = SubgroupHandle(G, canon)
        N = normalizer(G, K)
        W, proj = weyl_group(G, K)
        classes.append(
            SubgroupClass(
                representative=K,
                class_size=G.order // N.order,
                normalizer=N,
                weyl=W,
                weyl_projection=proj,
            )
        )
    lat = Lattice(G, tuple(classes))
    G._memo["lattice"] = lat
    return lat


def brute_force_subgroups(G: FiniteGroup) -> list[SubgroupHandle]:
    """Every subgroup, by closing joins until stable (test oracle).

    Starts from all cyclic subgroups and repeatedly joins known subgroups
    with single elements; exact and exhaustive, capped at order 192.
    """
    if G.order > BRUTE_FORCE_CAP:
        raise ResourceLimitError(
            f"brute-force enumeration capped at order {BRUTE_FORCE_CAP}"
        )
    T = G.table
    found = {(0,)}
    work = []
    for x in range(1, G.order):
        c = _closure_np(T, (x,))
        if c not in found:
            found.add(c)
            work.append(c)
    while work:
        H = work.pop()
        hset = set(H)
        for x in range(1, G.order):
            if x in hset:
                continue
            ext = _closure_np(T, H + (x,))
            if ext not in found:
                found.add(ext)
                work.append(ext)
    return [SubgroupHandle(G, t) for t in sorted(found, key=lambda t: (len(t), t))]


def weyl(G: FiniteGroup, K: SubgroupHandle) -> tuple[FiniteGroup, GroupMap]:
    """N_G(K)/K with the projection from the normalizer."""
    return weyl_group(G, K)
