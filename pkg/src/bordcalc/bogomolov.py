"""Toral quotients of H2, surface-group witnesses, and an H^1 cross-check.

The homology quotient computed here is H2(G, Z) modulo the span of the
toral classes (a|b) - (b|a) over commuting pairs: the obstruction group
for free surface actions to bound equivariantly. Witness tuples are
homomorphisms from a genus-g surface group, pushed to bar 2-cycles by a
telescoping construction whose cycle property is asserted on every call.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError, PreconditionError
from .groups import FiniteGroup, closure_indices
from .homology import (
    INTEGERS,
    INTEGRAL_ORDER_CAP,
    Cycle2,
    H2Presentation,
    Integers,
    ModPrimePower,
    Ring,
    cycle_check,
    default_modular_ring,
    h1_p_part_order,
    h2,
    quotient_classes,
)
from .smith import AbelianGroupDescriptor

METHOD_INTEGRAL = "integral"
METHOD_ORDER_MODULAR = "order-modular"


def toral_cycles(G: FiniteGroup) -> list[Cycle2]:
    """(a|b) - (b|a) for every unordered distinct commuting pair, a,b != e.

    Pairs with a == b give the zero chain and are skipped; the list order
    is the lexicographic pair order, so it is deterministic.
    """
    return [Cycle2.toral(G, a, b) for a, b in G.commuting_pairs()]


@dataclass(frozen=True)
class BogomolovResult:
    """Order (always) and structure (when known exactly) of the quotient.

    The integral method carries a class evaluator. The order-modular
    method reports the order and an exponent bound, with the descriptor
    filled in only when the order forces it; the modular elementary
    divisors are kept in ``modular_factors`` for reporting.
    """

    group: FiniteGroup
    method: str
    order: int
    descriptor: Optional[AbelianGroupDescriptor]
    exponent_bound: int
    modular_factors: tuple[int, ...]
    presentation: H2Presentation
    notes: tuple[str, ...] = ()

    def is_trivial(self) -> bool:
        return self.order == 1

    def class_is_trivial(self, chain: Cycle2) -> bool:
        return self.presentation.class_is_trivial(chain)

    def class_coordinates(self, chain: Cycle2) -> tuple[int, ...]:
        return self.presentation.class_coordinates(chain)


def _prime_for(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def bogomolov(
    G: FiniteGroup,
    method: str = METHOD_INTEGRAL,
    *,
    allow_large: bool = False,
) -> BogomolovResult:
    """H2(G, Z) modulo toral classes.

    ``integral`` gives the exact descriptor plus an evaluator (gated at
    order 128 unless allow_large). ``order-modular`` runs over Z/p^k with
    p^k >= |G|^2 for a p-group and reports the order, with the structure
    stated only when the order forces it.
    """
    key = ("bogomolov", method)
    cached = G._memo.get(key)
    if cached is not None:
        return cached

    if method == METHOD_INTEGRAL:
        ring: Ring = INTEGERS
        pres = h2(G, ring, allow_large=allow_large)
    elif method == METHOD_ORDER_MODULAR:
        if G.order == 1:
            result = bogomolov(G, METHOD_INTEGRAL)
            G._memo[key] = result
            return result
        ring = default_modular_ring(G)
        pres = h2(G, ring)
    else:
        raise InputError(f"unknown method {method!r}")

    quot = quotient_classes(pres, toral_cycles(G))
    order = quot.torsion_order
    factors = quot.integral_factors
    notes = []
    if method == METHOD_INTEGRAL:
        descriptor = quot.descriptor
        exponent_bound = factors[-1] if factors else 1
    else:
        p = ring.prime
        # universal-coefficient audit: the ring homology order must carry
        # exactly one extra factor of the p-part of the abelianization
        ring_order = quot.descriptor.torsion_order
        h1p = h1_p_part_order(G, p)
        if ring_order != order * h1p:
            raise PreconditionError(
                "order-modular audit failed: UCT bookkeeping is inconsistent"
            )
        notes.append(
            f"order recovered as |H2 x Z/{p}^{ring.exponent} quotient| / |H1({p}-part)|"
            f" = {ring_order}/{h1p}"
        )
        exponent_bound = factors[-1] if factors else 1
        if order == 1:
            descriptor = AbelianGroupDescriptor()
        elif _prime_for(order) == order:
            descriptor = AbelianGroupDescriptor(0, (order,))
            notes.append("structure forced: prime order")
        else:
            descriptor = None
            notes.append(
                "structure not forced by the order; modular elementary"
                f" divisors {factors}"
            )
    result = BogomolovResult(
        group=G,
        method=method,
        order=order,
        descriptor=descriptor,
        exponent_bound=exponent_bound,
        modular_factors=factors if method == METHOD_ORDER_MODULAR else (),
        presentation=quot,
        notes=tuple(notes),
    )
    G._memo[key] = result
    return result


def bogomolov_auto(G: FiniteGroup) -> BogomolovResult:
    """Integral when the gate allows it, else the modular order route."""
    if G.order <= INTEGRAL_ORDER_CAP:
        return bogomolov(G, METHOD_INTEGRAL)
    return bogomolov(G, METHOD_ORDER_MODULAR)


# -- surface tuples -----------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceTuple:
    """Images (x1, y1, ..., xg, yg) of the genus-g surface group generators."""

    group: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        if len(self.elements) < 2 or len(self.elements) % 2 != 0:
            raise InputError("a surface tuple has 2g entries, g >= 1")
        for x in self.elements:
            if not 0 <= x < self.group.order:
                raise InputError("tuple entry out of range")

    @property
    def genus(self) -> int:
        return len(self.elements) // 2


def relator_value(t: SurfaceTuple) -> int:
    """Product of commutators [x1,y1]...[xg,yg] in the group."""
    G = t.group
    out = 0
    for i in range(t.genus):
        x, y = t.elements[2 * i], t.elements[2 * i + 1]
        c = G.mul(G.mul(x, y), G.mul(G.inverse(x), G.inverse(y)))
        out = G.mul(out, c)
    return out


def surface_relator_holds(t: SurfaceTuple) -> bool:
    return relator_value(t) == 0


def surface_cycle(G: FiniteGroup, t: SurfaceTuple) -> Cycle2:
    """Bar 2-cycle representing the image of the surface fundamental class.

    Telescopes the relator word x1 y1 x1^-1 y1^-1 ... into pairs
    (partial product | next letter) and corrects each letter pair with
    (u | u^-1), or (u | u) when u is an involution, so the boundary
    cancels exactly. The cycle property is asserted before returning.
    """
    if t.group is not G:
        raise PreconditionError("tuple belongs to a different group")
    if not surface_relator_holds(t):
        raise PreconditionError("surface relator violated by the tuple")
    letters: list[int] = []
    for i in range(t.genus):
        x, y = t.elements[2 * i], t.elements[2 * i + 1]
        letters.extend([x, y, G.inverse(x), G.inverse(y)])
    coeffs: dict[tuple[int, int], int] = {}

    def bump(a, b, v):
        if a != 0 and b != 0:
            coeffs[(a, b)] = coeffs.get((a, b), 0) + v
            if coeffs[(a, b)] == 0:
                del coeffs[(a, b)]

    p = 0
    partials = [0]
    for l in letters:
        p = G.mul(p, l)
        partials.append(p)
    if partials[-1] != 0:
        raise PreconditionError("surface relator violated by the tuple")
    for i in range(2, len(letters) + 1):
        bump(partials[i - 1], letters[i - 1], 1)
    for i in range(t.genus):
        for u in (t.elements[2 * i], t.elements[2 * i + 1]):
            if u == 0:
                continue
            uinv = G.inverse(u)
            bump(u, uinv if uinv != u else u, -1)
    chain = Cycle2.from_dict(G, coeffs)
    if not cycle_check(G, chain):
        raise PreconditionError("telescoped chain failed the cycle check")
    return chain


@dataclass(frozen=True)
class WitnessReport:
    tuple: SurfaceTuple
    relator_ok: bool
    class_coordinates: Optional[tuple[int, ...]]
    nontrivial: bool
    generates_group: bool
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.nontrivial and not self.relator_ok:
            raise PreconditionError("nontrivial class requires a valid relator")


def witness_verify(
    G: FiniteGroup,
    t: SurfaceTuple,
    *,
    result: Optional[BogomolovResult] = None,
) -> WitnessReport:
    """Check a surface tuple: relator, generation, class in the quotient."""
    relator_ok = surface_relator_holds(t)
    generates = len(closure_indices(G.table, set(t.elements))) == G.order
    if not relator_ok:
        return WitnessReport(t, False, None, False, generates)
    if result is None:
        result = bogomolov_auto(G)
    chain = surface_cycle(G, t)
    notes: list[str] = []
    if result.method == METHOD_INTEGRAL:
        coords = result.class_coordinates(chain)
        nontrivial = any(coords)
    else:
        coords = None
        nontrivial = not result.class_is_trivial(chain)
        notes.append("class decided by the modular order test; no coordinates")
    return WitnessReport(t, True, coords, nontrivial, generates, tuple(notes))


def witness_search(
    G: FiniteGroup,
    genus: int,
    budget: int,
    seed: int,
    *,
    result: Optional[BogomolovResult] = None,
) -> Optional[SurfaceTuple]:
    """Randomized search for a tuple with nontrivial class.

    Samples tuples satisfying the surface relator by drawing all entries
    uniformly and rejecting; deterministic for a fixed seed. Returns the
    first hit or None when the budget is exhausted (always None when the
    quotient is trivial).
    """
    if genus < 1:
        raise InputError("genus must be at least 1")
    if result is None:
        result = bogomolov(G, METHOD_INTEGRAL)
    if result.method != METHOD_INTEGRAL or result.presentation._torsion.oplog is None:
        raise PreconditionError("witness search needs the integral evaluator")
    if result.order == 1:
        return None
    rng = random.Random(seed)
    n = G.order
    for _ in range(budget):
        entries = tuple(rng.randrange(n) for _ in range(2 * genus))
        t = SurfaceTuple(G, entries)
        if not surface_relator_holds(t):
            continue
        chain = surface_cycle(G, t)
        if any(result.class_coordinates(chain)):
            return t
    return None


# -- Lyndon-Hochschild-Serre H^1 cross-check ------------------------------------------


def lhs_h1_crosscheck(
    Q: FiniteGroup,
    invariant_factors: Sequence[int],
    generator_action: Sequence[Sequence[Sequence[int]]],
) -> AbelianGroupDescriptor:
    """H^1(Q, M) for a finite abelian M with Q-action, by integer linear algebra.

    M is given by invariant factors (d1, ..., dr); ``generator_action[i]``
    is an r x r integer matrix describing how Q's i-th declared generator
    acts (columns indexed like M's coordinates, entries reduced mod the row
    factor). The action is extended to all of Q along the Cayley graph and
    checked for consistency on the way.
    """
    from .smith import snf_dense

    d = [int(x) for x in invariant_factors]
    r = len(d)
    if any(x < 2 for x in d):
        raise InputError("invariant factors must be >= 2")
    if len(generator_action) != len(Q.generators):
        raise InputError("need one action matrix per declared generator")

    def reduce_mat(A):
        return tuple(
            tuple(int(A[i][j]) % d[i] for j in range(r)) for i in range(r)
        )

    def mat_mul(A, B):
        return tuple(
            tuple(
                sum(A[i][k] * B[k][j] for k in range(r)) % d[i] for j in range(r)
            )
            for i in range(r)
        )

    gens_mats = []
    for A in generator_action:
        if len(A) != r or any(len(row) != r for row in A):
            raise InputError("action matrices must be r x r")
        # well-defined on the quotient: A * (dj ej) must vanish mod di
        for i in range(r):
            for j in range(r):
                if (int(A[i][j]) * d[j]) % d[i] != 0:
                    raise InputError(
                        "action is not well defined mod the invariant factors"
                    )
        gens_mats.append(reduce_mat(A))

    ident = reduce_mat([[1 if i == j else 0 for j in range(r)] for i in range(r)])
    action: dict[int, tuple] = {0: ident}
    frontier = [0]
    T = Q.table
    while frontier:
        nxt = []
        for x in frontier:
            for gi, g in enumerate(Q.generators):
                y = int(T[x, g])
                prod = mat_mul(action[x], gens_mats[gi])
                if y in action:
                    if action[y] != prod:
                        raise InputError("action is not a homomorphism")
                else:
                    action[y] = prod
                    nxt.append(y)
        frontier = nxt
    if len(action) != Q.order:
        raise InputError("declared generators do not generate Q")
    # consistency across all products, not just the spanning tree
    for x in range(Q.order):
        for gi, g in enumerate(Q.generators):
            y = int(T[x, g])
            if action[y] != mat_mul(action[x], gens_mats[gi]):
                raise InputError("action is not a homomorphism")

    nQ = Q.order
    s = nQ * r  # unknowns: f(g)_i
    # cocycle conditions f(g*s) - f(g) - g.f(s) = 0 for all g and generators s
    rows: list[list[int]] = []
    moduli: list[int] = []
    for g in range(nQ):
        Ag = action[g]
        for gi, gen in enumerate(Q.generators):
            gs = int(T[g, gen])
            for i in range(r):
                row = [0] * s
                row[gs * r + i] += 1
                row[g * r + i] -= 1
                for j in range(r):
                    row[gen * r + j] -= Ag[i][j]
                rows.append(row)
                moduli.append(d[i])
    t = len(rows)
    # solve C x = 0 in (+) Z/d: kernel lattice of [C | diag(moduli)]
    big = [rows[i] + [moduli[i] if j == i else 0 for j in range(t)] for i in range(t)]
    diag, U, V = snf_dense(big, transforms=True)
    rank = sum(1 for x in diag if x)
    kernel_cols = [
        [V[i][j] for i in range(s + t)] for j in range(rank, s + t)
    ]
    L = [[col[i] for col in kernel_cols] for i in range(s)]  # s x kdim
    # the solution lattice contains the source moduli lattice
    Lfull = [row[:] for row in L]
    for i in range(s):
        col = [0] * s
        col[i] = d[i % r]
        for ii in range(s):
            Lfull[ii].append(col[ii])
    # coboundaries: delta(m)(g) = g.m - m
    for j in range(r):
        col = [0] * s
        for g in range(nQ):
            Ag = action[g]
            for i in range(r):
                col[g * r + i] = Ag[i][j] - (1 if i == j else 0)
        for ii in range(s):
            Lfull[ii].append(col[ii])
    # H^1 = L / (moduli + coboundaries): express the sublattice in a basis of L
    diagL, UL, VL = snf_dense(L, transforms=True)
    rankL = sum(1 for x in diagL if x)
    sub = [row[len(kernel_cols):] for row in Lfull]
    # coordinates of sub-columns in the Smith basis of L: y = D^-1 U sub
    m_sub = len(sub[0])
    X = []
    for i in range(rankL):
        Urow = UL[i]
        Xrow = []
        for j in range(m_sub):
            val = sum(Urow[k] * sub[k][j] for k in range(s))
            if val % diagL[i] != 0:
                raise PreconditionError("sublattice solve failed (not inside L)")
            Xrow.append(val // diagL[i])
        X.append(Xrow)
    for i in range(rankL, s):
        Urow = UL[i]
        for j in range(m_sub):
            if sum(Urow[k] * sub[k][j] for k in range(s)) != 0:
                raise PreconditionError("sublattice solve failed (rank)")
    diagX, _, _ = snf_dense(X)
    factors = tuple(x for x in diagX if x not in (0, 1))
    free = rankL - sum(1 for x in diagX if x)
    if free:
        raise PreconditionError("H^1 of a finite module came out infinite")
    return AbelianGroupDescriptor.from_cyclic_orders(factors)
