"""Finite group arithmetic on dense element indices.

A group is a complete multiplication table on indices ``0..order-1`` with
the identity fixed at index 0. Element names are positive words in a
declared generating set, found by breadth-first search, so ``names[0]`` is
always ``"e"``. Everything here is immutable after construction and all
operations are pure functions; cache-friendly dense tables beat hashed
element types at the orders this package targets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    InputError,
    InvalidActionError,
    NotNormalError,
    PreconditionError,
    ResourceLimitError,
)

ORDER_CAP = 20000
_CHECK_CAP = 512

_GEN_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def _format_word(word: Sequence[int], labels: Sequence[str]) -> str:
    """Render a positive generator-index word like ``a^2*b``."""
    if not word:
        return "e"
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        lab = labels[word[i]]
        parts.append(lab if j - i == 1 else f"{lab}^{j - i}")
        i = j
    return "*".join(parts)


class FiniteGroup:
    """Immutable multiplication structure on element indices.

    Attributes:
        order: number of elements.
        table: (order, order) int32 array, ``table[a, b] = a*b``.
        inv: int32 array of inverses.
        names: printable word per element, ``names[0] == "e"``.
        generators: indices of the declared generating set.
        gen_labels: printable label per generator.
    """

    __slots__ = (
        "order",
        "table",
        "inv",
        "names",
        "generators",
        "gen_labels",
        "label",
        "_memo",
        "__weakref__",
    )

    def __init__(
        self,
        table,
        *,
        generators: Optional[Sequence[int]] = None,
        gen_labels: Optional[Sequence[str]] = None,
        names: Optional[Sequence[str]] = None,
        label: Optional[str] = None,
        check: bool = True,
    ):
        table = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise InputError("multiplication table must be square")
        n = int(table.shape[0])
        if n == 0:
            raise InputError("a group has at least one element")
        if n > ORDER_CAP:
            raise ResourceLimitError(f"group order {n} exceeds cap {ORDER_CAP}")
        if table.min() < 0 or table.max() >= n:
            raise InputError("table entries out of range")
        self.order = n
        self.table = table
        self.table.setflags(write=False)

        rng = np.arange(n, dtype=np.int32)
        if not (np.array_equal(table[0], rng) and np.array_equal(table[:, 0], rng)):
            raise InputError("index 0 is not a two-sided identity")
        if check:
            # every row and column must be a permutation
            if not (
                np.array_equal(np.sort(table, axis=1), np.tile(rng, (n, 1)))
                and np.array_equal(np.sort(table, axis=0), np.tile(rng, (n, 1)).T)
            ):
                raise InputError("table rows/columns are not permutations")
            if n <= _CHECK_CAP:
                self._check_associative()

        inv = np.empty(n, dtype=np.int32)
        rows, cols = np.nonzero(table == 0)
        inv[rows] = cols
        if check and not np.array_equal(table[rng, inv], np.zeros(n, dtype=np.int32)):
            raise InputError("inverses are not two-sided")
        self.inv = inv
        self.inv.setflags(write=False)

        self.label = label
        self._memo = {}

        if generators is None:
            generators = self._greedy_generators()
        generators = [int(g) for g in generators]
        if gen_labels is None:
            if len(generators) <= len(_GEN_ALPHABET):
                gen_labels = [_GEN_ALPHABET[i] for i in range(len(generators))]
            else:
                gen_labels = [f"x{i}" for i in range(len(generators))]
        if len(gen_labels) != len(generators):
            raise InputError("one label per generator required")
        if len(set(gen_labels)) != len(gen_labels):
            raise InputError("generator labels must be unique")
        self.generators = tuple(generators)
        self.gen_labels = tuple(gen_labels)

        if names is None:
            names = self._bfs_names()
        if len(names) != n or names[0] != "e":
            raise InputError("bad element names")
        self.names = tuple(names)

    # -- construction helpers -------------------------------------------------

    def _check_associative(self):
        T = self.table
        for a in range(self.order):
            if not np.array_equal(T[T[a]], T[a][T]):
                raise InputError(f"table not associative at element {a}")

    def _greedy_generators(self) -> list[int]:
        gens: list[int] = []
        known = {0}
        for x in range(1, self.order):
            if x not in known:
                gens.append(x)
                known = set(closure_indices(self.table, gens))
                if len(known) == self.order:
                    break
        return gens

    def _bfs_names(self) -> list[str]:
        words: dict[int, tuple[int, ...]] = {0: ()}
        queue = [0]
        T = self.table
        while queue:
            nxt = []
            for x in queue:
                for gi, g in enumerate(self.generators):
                    y = int(T[x, g])
                    if y not in words:
                        words[y] = words[x] + (gi,)
                        nxt.append(y)
            queue = nxt
        if len(words) != self.order:
            raise InputError("declared generators do not generate the group")
        return [_format_word(words[i], self.gen_labels) for i in range(self.order)]

    # -- basic arithmetic ------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conj(self, g: int, a: int) -> int:
        """g a g^-1."""
        return int(self.table[self.table[g, a], self.inv[g]])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = int(self.table[x, a])
            k += 1
        return k

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(int(self.inv[a]), -e)
        x = 0
        for _ in range(e):
            x = int(self.table[x, a])
        return x

    def evaluate_word(self, word: Sequence[tuple[int, int]]) -> int:
        """Evaluate a word given as (generator index, exponent) pairs."""
        x = 0
        for gi, e in word:
            if not 0 <= gi < len(self.generators):
                raise InputError(f"generator index {gi} out of range")
            x = int(self.table[x, self.power(self.generators[gi], e)])
        return x

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        if "abelian" not in self._memo:
            self._memo["abelian"] = bool(np.array_equal(self.table, self.table.T))
        return self._memo["abelian"]

    def element_order_histogram(self) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        for x in self.elements():
            o = self.element_order(x)
            counts[o] = counts.get(o, 0) + 1
        return tuple(sorted(counts.items()))

    def commuting_pairs(self) -> Iterator[tuple[int, int]]:
        """Unordered pairs a < b of distinct non-identity commuting elements."""
        T = self.table
        for a in range(1, self.order):
            row = T[a]
            for b in range(a + 1, self.order):
                if row[b] == T[b, a]:
                    yield (a, b)

    def relabel(self, perm: Sequence[int]) -> "FiniteGroup":
        """Transport the group structure along a relabeling with perm[0] == 0."""
        perm = np.asarray(perm, dtype=np.int32)
        if perm[0] != 0 or len(perm) != self.order:
            raise InputError("relabeling must fix the identity index")
        inv_perm = np.empty_like(perm)
        inv_perm[perm] = np.arange(self.order, dtype=np.int32)
        new_table = perm[self.table[np.ix_(inv_perm, inv_perm)]]
        return FiniteGroup(
            new_table,
            generators=[int(perm[g]) for g in self.generators],
            gen_labels=self.gen_labels,
            label=self.label,
        )

    # -- canonical-ish fingerprint --------------------------------------------

    def fingerprint(self) -> str:
        """Digest of a greedily lex-minimized Cayley table.

        Deterministic cache key only, not an isomorphism oracle: colors are
        refined Weisfeiler-Leman style, then the identity-fixing relabeling
        is chosen greedily by (color, partial-row) order.
        """
        if "fingerprint" in self._memo:
            return self._memo["fingerprint"]
        n, T = self.order, self.table
        colors = np.array([self.element_order(x) for x in range(n)], dtype=np.int64)
        for _ in range(n):
            sig = []
            for x in range(n):
                row = np.sort(colors[T[x]] * (n + 1) + colors[T[:, x]])
                sig.append((int(colors[x]),) + tuple(int(v) for v in row))
            uniq = {s: i for i, s in enumerate(sorted(set(sig)))}
            new_colors = np.array([uniq[s] for s in sig], dtype=np.int64)
            if np.array_equal(new_colors, colors):
                break
            colors = new_colors
        chosen = [0]
        remaining = sorted(range(1, n), key=lambda x: (int(colors[x]), x))
        while remaining:
            best = min(
                remaining,
                key=lambda x: (
                    int(colors[x]),
                    tuple(int(colors[T[x, c]]) for c in chosen),
                    tuple(int(colors[T[c, x]]) for c in chosen),
                    x,
                ),
            )
            chosen.append(best)
            remaining.remove(best)
        pos = {g: i for i, g in enumerate(chosen)}
        h = hashlib.sha256()
        for a in chosen:
            h.update(np.asarray([pos[int(v)] for v in T[a, chosen]], dtype=np.int32).tobytes())
        digest = h.hexdigest()
        self._memo["fingerprint"] = digest
        return digest

    def __repr__(self):
        lab = f" {self.label}" if self.label else ""
        return f"<FiniteGroup{lab} order={self.order}>"


# -- subgroups -----------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupHandle:
    """A subgroup of ``parent`` as a sorted tuple of element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]
    _set: frozenset = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        elems = tuple(sorted(int(x) for x in self.elements))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "_set", frozenset(elems))
        if not elems or elems[0] != 0:
            raise PreconditionError("subgroup must contain the identity")
        if self.parent.order % len(elems) != 0:
            raise PreconditionError("subgroup size violates Lagrange")
        T = self.parent.table
        s = self._set
        for a in elems:
            if int(self.parent.inv[a]) not in s:
                raise PreconditionError("subgroup not closed under inverse")
            for b in elems:
                if int(T[a, b]) not in s:
                    raise PreconditionError("subgroup not closed under product")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __len__(self) -> int:
        return len(self.elements)


def closure_indices(table: np.ndarray, seed) -> tuple[int, ...]:
    """Subgroup generated by ``seed``, as sorted indices.

    Positive words suffice in a finite group (inverses are positive powers),
    so a breadth-first walk over right multiplication by the seeds is exact.
    """
    seen = {0}
    gens = sorted({int(x) for x in seed} - {0})
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(table[x, g])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(seen))


def subgroup(G: FiniteGroup, elems) -> SubgroupHandle:
    """Wrap explicit indices as a subgroup (validated)."""
    return SubgroupHandle(G, tuple(int(x) for x in elems))


def generated_subgroup(G: FiniteGroup, seed) -> SubgroupHandle:
    return SubgroupHandle(G, closure_indices(G.table, seed))


def centralizer(G: FiniteGroup, K: SubgroupHandle) -> SubgroupHandle:
    T = G.table
    elems = [
        g
        for g in G.elements()
        if all(int(T[g, a]) == int(T[a, g]) for a in K.elements)
    ]
    return SubgroupHandle(G, tuple(elems))


def center(G: FiniteGroup) -> SubgroupHandle:
    return centralizer(G, SubgroupHandle(G, tuple(G.elements())))


def normalizer(G: FiniteGroup, K: SubgroupHandle) -> SubgroupHandle:
    """Largest subgroup in which K is normal: {g : gKg^-1 = K}."""
    if K.parent is not G:
        raise PreconditionError("subgroup belongs to a different group")
    kset = K._set
    elems = [g for g in G.elements() if all(G.conj(g, a) in kset for a in K.elements)]
    return SubgroupHandle(G, tuple(elems))


def is_normal(G: FiniteGroup, K: SubgroupHandle) -> bool:
    return normalizer(G, K).order == G.order


# -- maps ------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism given by its image on every source index."""

    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", img)
        if len(img) != self.source.order:
            raise PreconditionError("image array has wrong length")
        if img[0] != 0:
            raise PreconditionError("homomorphism must preserve the identity")
        S, T = self.source.table, self.target.table
        for a in self.source.elements():
            for b in self.source.elements():
                if img[int(S[a, b])] != int(T[img[a], img[b]]):
                    raise PreconditionError("image is not multiplicative")

    def __call__(self, x: int) -> int:
        return self.image[x]


# -- quotient / subgroup-as-group -------------------------------------------------


def subgroup_as_group(G: FiniteGroup, K: SubgroupHandle) -> tuple[FiniteGroup, list[int]]:
    """Reindex K as its own FiniteGroup; returns (group, parent index per new index)."""
    elems = list(K.elements)
    pos = {g: i for i, g in enumerate(elems)}
    n = len(elems)
    tab = np.empty((n, n), dtype=np.int32)
    T = G.table
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            tab[i, j] = pos[int(T[a, b])]
    return FiniteGroup(tab), elems


def quotient(G: FiniteGroup, K: SubgroupHandle) -> tuple[FiniteGroup, GroupMap]:
    """Quotient by a normal subgroup, with the projection map.

    Cosets are indexed by their least element, identity coset first.
    """
    if K.parent is not G:
        raise PreconditionError("subgroup belongs to a different group")
    if not is_normal(G, K):
        raise NotNormalError("subgroup is not normal")
    T = G.table
    coset_of = [-1] * G.order
    reps: list[int] = []
    for g in G.elements():
        if coset_of[g] < 0:
            idx = len(reps)
            reps.append(g)
            for a in K.elements:
                coset_of[int(T[g, a])] = idx
    n = len(reps)
    tab = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            tab[i, j] = coset_of[int(T[a, b])]
    # carry over the parent's generators so quotient words stay readable
    gen_imgs: list[int] = []
    gen_labs: list[str] = []
    for g, lab in zip(G.generators, G.gen_labels):
        img = coset_of[g]
        if img != 0 and img not in gen_imgs:
            gen_imgs.append(img)
            gen_labs.append(lab)
    if set(closure_indices(tab, gen_imgs)) != set(range(n)):
        gen_imgs, gen_labs = None, None  # fall back to greedy generators
    Q = FiniteGroup(tab, generators=gen_imgs, gen_labels=gen_labs)
    proj = GroupMap(G, Q, tuple(coset_of))
    return Q, proj


def weyl_group(G: FiniteGroup, K: SubgroupHandle) -> tuple[FiniteGroup, GroupMap]:
    """N_G(K)/K together with the projection from N_G(K) (as its own group)."""
    N = normalizer(G, K)
    NG, nelems = subgroup_as_group(G, N)
    pos = {g: i for i, g in enumerate(nelems)}
    KinN = SubgroupHandle(NG, tuple(pos[a] for a in K.elements))
    return quotient(NG, KinN)


# -- products ------------------------------------------------------------------


def direct_product(A: FiniteGroup, B: FiniteGroup, label: Optional[str] = None) -> FiniteGroup:
    """Pairs (a, b) with componentwise product; index = a*|B| + b."""
    na, nb = A.order, B.order
    ta = A.table.astype(np.int64)
    tb = B.table.astype(np.int64)
    tab = (np.kron(ta, np.ones((nb, nb), dtype=np.int64)) * nb) + np.tile(tb, (na, na))
    gens = [g * nb for g in A.generators] + [g for g in B.generators]
    labs = [f"{l}1" for l in A.gen_labels] + [f"{l}2" for l in B.gen_labels]
    if set(A.gen_labels).isdisjoint(B.gen_labels):
        labs = list(A.gen_labels) + list(B.gen_labels)
    return FiniteGroup(tab, generators=gens, gen_labels=labs, label=label)


def semidirect_product(
    N: FiniteGroup,
    H: FiniteGroup,
    action: Sequence[Sequence[int]],
    label: Optional[str] = None,
) -> FiniteGroup:
    """Semidirect product N x| H for an action of H on N by automorphisms.

    ``action[h]`` maps N-indices; pairs multiply by
    (n1, h1)(n2, h2) = (n1 * action[h1](n2), h1 h2). The action is checked to
    be by automorphisms and to be a homomorphism H -> Aut(N).
    """
    if len(action) != H.order:
        raise InvalidActionError("need one automorphism per element of H")
    act = [np.asarray(a, dtype=np.int32) for a in action]
    TN = N.table
    for h, a in enumerate(act):
        if len(a) != N.order or set(int(x) for x in a) != set(range(N.order)):
            raise InvalidActionError(f"action[{h}] is not a bijection on N")
        if a[0] != 0:
            raise InvalidActionError(f"action[{h}] moves the identity")
        for x in N.elements():
            for y in N.elements():
                if int(a[TN[x, y]]) != int(TN[a[x], a[y]]):
                    raise InvalidActionError(f"action[{h}] is not an automorphism")
    TH = H.table
    for h1 in H.elements():
        for h2 in H.elements():
            if not np.array_equal(act[int(TH[h1, h2])], act[h1][act[h2]]):
                raise InvalidActionError("action is not a homomorphism H -> Aut(N)")
    nn, nh = N.order, H.order
    if nn * nh > ORDER_CAP:
        raise ResourceLimitError("semidirect product exceeds the order cap")
    tab = np.empty((nn * nh, nn * nh), dtype=np.int32)
    for h1 in range(nh):
        a1 = act[h1]
        for n1 in range(nn):
            row = tab[h1 * nn + n1]
            for h2 in range(nh):
                base = int(TH[h1, h2]) * nn
                tn = TN[n1]
                for n2 in range(nn):
                    row[h2 * nn + n2] = base + int(tn[a1[n2]])
    # index (n, h) -> h*nn + n keeps (0, 0) at index 0
    gens = [g for g in N.generators] + [h * nn for h in H.generators]
    labs = list(N.gen_labels) + list(H.gen_labels)
    if len(set(labs)) != len(labs):
        labs = [f"{l}1" for l in N.gen_labels] + [f"{l}2" for l in H.gen_labels]
    return FiniteGroup(tab, generators=gens, gen_labels=labs, label=label)


# -- permutation construction -----------------------------------------------------


def _perm_key(p) -> tuple[int, ...]:
    return tuple(int(x) for x in p)


def from_permutations(
    degree: int,
    generators: Sequence[Sequence[int]],
    labels: Optional[Sequence[str]] = None,
    cap: int = ORDER_CAP,
) -> FiniteGroup:
    """Closure of permutation generators under composition.

    Permutations are 0-based image arrays of length ``degree``; composition
    is (p*q)(x) = p(q(x)). Element names are shortest positive words.
    """
    ident = tuple(range(degree))
    gens = []
    for p in generators:
        t = _perm_key(p)
        if sorted(t) != list(ident):
            raise InputError(f"{p} is not a bijection on {degree} points")
        gens.append(t)
    index = {ident: 0}
    elems = [ident]
    queue = [ident]
    while queue:
        nxt = []
        for p in queue:
            for g in gens:
                q = tuple(p[g[x]] for x in range(degree))
                if q not in index:
                    if len(elems) >= cap:
                        raise ResourceLimitError(
                            f"permutation closure exceeds cap {cap}"
                        )
                    index[q] = len(elems)
                    elems.append(q)
                    nxt.append(q)
        queue = nxt
    n = len(elems)
    tab = np.empty((n, n), dtype=np.int32)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            tab[i, j] = index[tuple(p[q[x]] for x in range(degree))]
    gen_idx = [index[g] for g in gens]
    # drop duplicate/identity generators but keep the first label of each
    seen: dict[int, None] = {}
    kept, kept_labels = [], []
    if labels is None:
        labels = [_GEN_ALPHABET[i] for i in range(len(gens))]
    for gi, lab in zip(gen_idx, labels):
        if gi != 0 and gi not in seen:
            seen[gi] = None
            kept.append(gi)
            kept_labels.append(lab)
    if not kept and n == 1:
        kept, kept_labels = [], []
    return FiniteGroup(tab, generators=kept or None, gen_labels=kept_labels or None)


# -- structural classification -----------------------------------------------------


@dataclass(frozen=True)
class SpecialShape:
    """Isomorphism-invariant shape tag used by the classification tables."""

    tag: str  # "cyclic" | "dihedral" | "A4" | "S4" | "A5" | "other"
    k: int = 0  # cyclic order, or half-order for dihedral

    def __str__(self):
        if self.tag == "cyclic":
            return f"Cyclic({self.k})"
        if self.tag == "dihedral":
            return f"Dihedral({self.k})"
        return self.tag if self.tag != "other" else "Other"


_A4_HIST = ((1, 1), (2, 3), (3, 8))
_S4_HIST = ((1, 1), (2, 9), (3, 8), (4, 6))
_A5_HIST = ((1, 1), (2, 15), (3, 20), (5, 24))


def classify_special(K: FiniteGroup) -> SpecialShape:
    """Detect cyclic, dihedral and platonic shapes, isomorphism-invariantly.

    Cyclic is checked first; dihedral requires an index-2 cyclic subgroup
    inverted by an outer involution (the involution requirement separates
    D_{2k} from Q8 and other cyclic-by-2 groups).
    """
    n = K.order
    orders = [K.element_order(x) for x in K.elements()]
    if n in (1,) or max(orders) == n:
        return SpecialShape("cyclic", n)
    if n % 2 == 0:
        k = n // 2
        for y in K.elements():
            if orders[y] == k and k >= 2:
                C = set(closure_indices(K.table, [y]))
                if len(C) != k:
                    continue
                yinv = K.inverse(y)
                for x in K.elements():
                    if x not in C and orders[x] == 2 and K.conj(x, y) == yinv:
                        return SpecialShape("dihedral", k)
    hist = K.element_order_histogram()
    if n == 12 and hist == _A4_HIST:
        return SpecialShape("A4")
    if n == 24 and hist == _S4_HIST:
        return SpecialShape("S4")
    if n == 60 and hist == _A5_HIST:
        return SpecialShape("A5")
    return SpecialShape("other")


def conj_action_on_cyclic(G: FiniteGroup, K: SubgroupHandle) -> tuple[int, ...]:
    """Units u mod k with n g n^-1 = g^u for some n in the normalizer.

    The generator g is the least index in K of full order; the result is
    independent of that choice and is a subgroup of (Z/k)^x.
    """
    k = K.order
    g = None
    for x in K.elements:
        if G.element_order(x) == k:
            g = x
            break
    if g is None:
        raise PreconditionError("subgroup is not cyclic")
    dlog = {}
    x, e = 0, 0
    while True:
        dlog[x] = e
        x = int(G.table[x, g])
        e += 1
        if x == 0:
            break
    N = normalizer(G, K)
    units = {dlog[G.conj(n, g)] % k if k > 1 else 1 for n in N.elements}
    if k == 1:
        return (1,)
    units = {u % k for u in units}
    for u in units:
        if gcd(u, k) != 1:
            raise PreconditionError("conjugation action left the unit group")
    return tuple(sorted(units))


# -- built-in groups ----------------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise InputError("cyclic group order must be positive")
    tab = (np.arange(n, dtype=np.int32)[:, None] + np.arange(n, dtype=np.int32)) % n
    gens = [1] if n > 1 else None
    return FiniteGroup(tab, generators=gens, gen_labels=["c"] if n > 1 else None,
                       label=f"C{n}")


def dihedral_group(two_k: int) -> FiniteGroup:
    """D_{2k} of order 2k (rotation subgroup Z/k), for 2k >= 2."""
    if two_k < 2 or two_k % 2 != 0:
        raise InputError("dihedral order must be even and >= 2")
    k = two_k // 2
    if k == 1:
        G = cyclic_group(2)
        return FiniteGroup(G.table, generators=G.generators, gen_labels=G.gen_labels,
                           label="D2")
    rot = tuple((i + 1) % k for i in range(k))
    ref = tuple((-i) % k for i in range(k))
    G = from_permutations(k, [rot, ref], labels=["r", "s"])
    return FiniteGroup(G.table, generators=G.generators, gen_labels=G.gen_labels,
                       label=f"D{two_k}")


_Q8_STR = ["e", "i", "j", "k", "-e", "-i", "-j", "-k"]


def quaternion_group() -> FiniteGroup:
    """Q8 with a = i, b = j."""

    def qmul(x, y):
        sx, ux = (x >= 4), x % 4
        sy, uy = (y >= 4), y % 4
        # unit part table for 1,i,j,k with sign
        table = {
            (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
            (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
            (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
            (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
        }
        u, s = table[(ux, uy)]
        sign = (sx ^ sy) ^ bool(s)
        return u + 4 * sign

    tab = np.array([[qmul(x, y) for y in range(8)] for x in range(8)], dtype=np.int32)
    return FiniteGroup(tab, generators=[1, 2], gen_labels=["a", "b"], label="Q8")


def symmetric_group(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise InputError("builtin symmetric groups cover n <= 6")
    if n == 1:
        return cyclic_group(1)
    cyc = tuple(list(range(1, n)) + [0])
    swap = tuple([1, 0] + list(range(2, n)))
    return from_permutations(n, [swap, cyc] if n > 2 else [swap], labels=["s", "t"][: (2 if n > 2 else 1)])


def alternating_group(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise InputError("builtin alternating groups cover n <= 6")
    if n <= 2:
        return cyclic_group(1)
    gens, labs = [], []
    for i in range(2, n):
        img = list(range(n))
        img[0], img[1], img[i] = 1, i, 0  # 3-cycle (0 1 i)
        gens.append(tuple(img))
        labs.append(f"t{i - 1}")
    return from_permutations(n, gens, labels=labs)


def g64_group() -> FiniteGroup:
    """C8 x| Q8 with a.c = c^3, b.c = c^5, (ab).c = c^7 (SmallGroup(64,182))."""
    C8 = cyclic_group(8)
    Q8 = quaternion_group()
    # homomorphism Q8 -> (Z/8)^x: +-i -> 3, +-j -> 5, +-k -> 7, +-e -> 1
    unit_of = {0: 1, 4: 1, 1: 3, 5: 3, 2: 5, 6: 5, 3: 7, 7: 7}
    action = [
        [(x * unit_of[h]) % 8 for x in range(8)]
        for h in range(8)
    ]
    return semidirect_product(C8, Q8, action, label="G64")


def builtin(name: str) -> FiniteGroup:
    """Resolve a builtin group name (C8, D12, Q8, S4, A5, G64, G243, C8:Q8, C2xC4)."""
    name = name.strip()
    if "x" in name:
        parts = name.split("x")
        G = builtin(parts[0])
        for i, p in enumerate(parts[1:]):
            lab = name if i == len(parts) - 2 else None
            G = direct_product(G, builtin(p), label=lab)
        return G
    if name in ("G64", "C8:Q8"):
        return g64_group()
    if name == "G243":
        from .presentation import g243_group

        return g243_group()
    if name == "Q8":
        return quaternion_group()
    if name.startswith("C") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    if name.startswith("D") and name[1:].isdigit():
        return dihedral_group(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    if name.startswith("A") and name[1:].isdigit():
        return alternating_group(int(name[1:]))
    raise InputError(f"unknown builtin group {name!r}")
