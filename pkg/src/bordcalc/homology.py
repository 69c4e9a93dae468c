"""Group homology in degrees 1 and 2 via the normalized bar complex.

The normalized complex has basis tuples of non-identity elements, so for
|G| = n the chain groups are C1 = Z^(n-1), C2 = Z^((n-1)^2), and the
boundaries are

    d2(a|b)   = (b) - (ab) + (a)
    d3(a|b|c) = (b|c) - (ab|c) + (a|bc) - (a|b)

with any tuple containing the identity read as zero. H2 = ker d2 / im d3
is computed by streaming d3 columns into a sparse column echelon and
extracting the cokernel torsion; the identity obtained from d3 of a
4-tuple boundary shows columns whose last slot is a generator already span
im d3, which keeps the stream at (n-1)^2 * #generators columns.

Two coefficient rings are supported. ``Integers`` gives H2(G, Z) exactly
and an evaluator for classes of explicit 2-cycles. ``ModPrimePower(p, k)``
(restricted to p-groups with p^k >= |G|^2, so every elementary-divisor
valuation stays below k) recovers the torsion of the integral answer from
a single modular elimination; the universal-coefficient bookkeeping that
justifies it is asserted on every run against an independently computed
abelianization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import InputError, PreconditionError, ResourceLimitError
from .groups import FiniteGroup, closure_indices
from .smith import (
    AbelianGroupDescriptor,
    ColumnEchelon,
    FastColumnBuilder,
    FastStreamError,
    TorsionData,
    torsion_structure,
    _pval,
)

INTEGRAL_ORDER_CAP = 128
_FAST_MIN_ORDER = 20


@dataclass(frozen=True)
class Integers:
    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class ModPrimePower:
    prime: int
    exponent: int

    def __post_init__(self):
        if self.prime < 2 or self.exponent < 1:
            raise InputError("need a prime p and exponent k >= 1")

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent

    def __str__(self):
        return f"Z/{self.prime}^{self.exponent}"


INTEGERS = Integers()
Ring = Union[Integers, ModPrimePower]


def default_modular_ring(G: FiniteGroup) -> ModPrimePower:
    """Smallest ModPrimePower(p, k) with p^k >= |G|^2 for a p-group G."""
    n = G.order
    if n == 1:
        raise PreconditionError("the trivial group needs no modular ring")
    p = _smallest_prime_factor(n)
    a = _pval(n, p)
    if p**a != n:
        raise PreconditionError(f"group of order {n} is not a {p}-group")
    return ModPrimePower(p, 2 * a)


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _ring_key(ring: Ring):
    if isinstance(ring, Integers):
        return ("Z",)
    return ("mod", ring.prime, ring.exponent)


# -- 2-chains ------------------------------------------------------------------------


def _pair_row(a: int, b: int, m: int) -> int:
    return (a - 1) * m + (b - 1)


@dataclass(frozen=True)
class Cycle2:
    """A 2-chain in the normalized bar basis, sparse over pairs (a|b).

    Coefficients are keyed by element-index pairs with both entries
    nonidentity; use ``cycle_check`` to confirm the boundary vanishes.
    """

    group: FiniteGroup
    coeffs: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def from_dict(G: FiniteGroup, d: dict[tuple[int, int], int]) -> "Cycle2":
        items = []
        for (a, b), v in sorted(d.items()):
            if v == 0:
                continue
            if a == 0 or b == 0:
                raise InputError("bar basis pairs must avoid the identity")
            if not (0 < a < G.order and 0 < b < G.order):
                raise InputError("pair index out of range")
            items.append(((int(a), int(b)), int(v)))
        return Cycle2(G, tuple(items))

    @staticmethod
    def toral(G: FiniteGroup, a: int, b: int) -> "Cycle2":
        """(a|b) - (b|a) for a commuting pair; zero chain when a == b."""
        if G.mul(a, b) != G.mul(b, a):
            raise PreconditionError("toral chains need a commuting pair")
        if a == b or a == 0 or b == 0:
            return Cycle2(G, ())
        return Cycle2.from_dict(G, {(a, b): 1, (b, a): -1})

    def to_vec(self) -> dict[int, int]:
        m = self.group.order - 1
        return {_pair_row(a, b, m): v for (a, b), v in self.coeffs}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Cycle2") -> "Cycle2":
        if other.group is not self.group:
            raise PreconditionError("cycles live over different groups")
        d = dict()
        for (a, b), v in self.coeffs + other.coeffs:
            d[(a, b)] = d.get((a, b), 0) + v
        return Cycle2.from_dict(self.group, d)

    def __neg__(self) -> "Cycle2":
        return Cycle2(self.group, tuple(((a, b), -v) for (a, b), v in self.coeffs))

    def __sub__(self, other: "Cycle2") -> "Cycle2":
        return self + (-other)


def boundary2(chain: Cycle2) -> dict[int, int]:
    """d2 of a 2-chain, as a sparse vector over the C1 basis (index x-1)."""
    G = chain.group
    T = G.table
    out: dict[int, int] = {}

    def bump(x, v):
        if x != 0:
            out[x - 1] = out.get(x - 1, 0) + v
            if out[x - 1] == 0:
                del out[x - 1]

    for (a, b), v in chain.coeffs:
        bump(b, v)
        bump(int(T[a, b]), -v)
        bump(a, v)
    return out


def cycle_check(G: FiniteGroup, chain: Cycle2, ring: Ring = INTEGERS) -> bool:
    """True iff d2(chain) = 0 over the ring."""
    if chain.group is not G:
        raise PreconditionError("chain belongs to a different group")
    bd = boundary2(chain)
    if isinstance(ring, Integers):
        return not bd
    q = ring.modulus
    return all(v % q == 0 for v in bd.values())


def d3_column(G: FiniteGroup, a: int, b: int, c: int) -> dict[int, int]:
    """d3(a|b|c) as a sparse C2 vector; zero if any slot is the identity."""
    if a == 0 or b == 0 or c == 0:
        return {}
    m = G.order - 1
    T = G.table
    out: dict[int, int] = {}

    def bump(x, y, v):
        if x != 0 and y != 0:
            r = _pair_row(x, y, m)
            out[r] = out.get(r, 0) + v
            if out[r] == 0:
                del out[r]

    bump(b, c, 1)
    bump(int(T[a, b]), c, -1)
    bump(a, int(T[b, c]), 1)
    bump(a, b, -1)
    return out


def _spanning_generators(G: FiniteGroup) -> list[int]:
    """Greedy minimal generating subset of the declared generators.

    Any generating set works for the restricted d3 stream; fewer
    generators means proportionally fewer columns.
    """
    if "span_gens" in G._memo:
        return G._memo["span_gens"]
    kept: list[int] = []
    have = {0}
    for g in G.generators:
        if g not in have:
            kept.append(g)
            have = set(closure_indices(G.table, kept))
            if len(have) == G.order:
                break
    if len(have) != G.order:
        kept = list(G.generators)
    G._memo["span_gens"] = kept
    return kept


def _stream_d3_restricted(G: FiniteGroup, ech: ColumnEchelon) -> int:
    """Insert d3(a|b|s) for all a, b and spanning generators s, lex (a, b, s).

    By the boundary identity of 4-tuples these columns span all of im d3.
    """
    n = G.order
    m = n - 1
    T = G.table
    gens = _spanning_generators(G)
    count = 0
    for a in range(1, n):
        Ta = T[a]
        base_a = (a - 1) * m
        for b in range(1, n):
            ab = int(Ta[b])
            Tb = T[b]
            r_ab = base_a + (b - 1)
            for s in gens:
                bs = int(Tb[s])
                rows = [(b - 1) * m + (s - 1)]
                vals = [1]
                if ab:
                    rows.append((ab - 1) * m + (s - 1))
                    vals.append(-1)
                if bs:
                    rows.append(base_a + (bs - 1))
                    vals.append(1)
                rows.append(r_ab)
                vals.append(-1)
                ech.insert(rows, vals)
                count += 1
    return count


def _d3_batch_for(G: FiniteGroup, a: int):
    """CSR batch of the d3(a|b|s) columns for one fixed a, lex (b, s)."""
    n = G.order
    m = n - 1
    T = G.table
    gens = np.asarray(_spanning_generators(G), dtype=np.int64)
    g = len(gens)
    b = np.arange(1, n, dtype=np.int64)
    ab = T[a, 1:n].astype(np.int64)
    B = np.repeat(b, g)
    AB = np.repeat(ab, g)
    S = np.tile(gens, m)
    BS = T[1:n, :][:, gens].astype(np.int64).reshape(-1)
    mask2 = AB != 0
    mask3 = BS != 0
    counts = 2 + mask2.astype(np.int64) + mask3.astype(np.int64)
    indptr = np.zeros(m * g + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    rows = np.empty(indptr[-1], dtype=np.int32)
    vals = np.empty(indptr[-1], dtype=np.int64)
    pos = indptr[:-1].copy()
    rows[pos] = (B - 1) * m + (S - 1)
    vals[pos] = 1
    pos += 1
    idx = pos[mask2]
    rows[idx] = (AB[mask2] - 1) * m + (S[mask2] - 1)
    vals[idx] = -1
    pos += mask2
    idx = pos[mask3]
    rows[idx] = (a - 1) * m + (BS[mask3] - 1)
    vals[idx] = 1
    pos += mask3
    rows[pos] = (a - 1) * m + (B - 1)
    vals[pos] = -1
    return indptr, rows, vals


def _build_d3_echelon(G: FiniteGroup, modulus, prime) -> ColumnEchelon:
    """Stream the restricted d3 columns, compiled when it pays off."""
    n = G.order
    m = n - 1
    if n >= _FAST_MIN_ORDER:
        try:
            hint = m * m * max(16, min(m, 96))
            fb = FastColumnBuilder(m * m, modulus, prime, pool_hint=hint)
            for a in range(1, n):
                fb.insert_csr(*_d3_batch_for(G, a))
            return fb.finalize()
        except FastStreamError:
            pass
    ech = ColumnEchelon(m * m, modulus=modulus, prime=prime)
    _stream_d3_restricted(G, ech)
    return ech


def _stream_d2(G: FiniteGroup, ech: ColumnEchelon) -> int:
    """Insert d2(a|b) columns (over C1) in lex (a, b) order."""
    n = G.order
    T = G.table
    count = 0
    for a in range(1, n):
        Ta = T[a]
        for b in range(1, n):
            ab = int(Ta[b])
            rows = [b - 1, a - 1]
            vals = [1, 1]
            if ab:
                rows.append(ab - 1)
                vals.append(-1)
            ech.insert(rows, vals)
            count += 1
    return count


# -- H1 -------------------------------------------------------------------------------


def commutator_subgroup(G: FiniteGroup):
    """Indices of [G, G]."""
    if "commutator" not in G._memo:
        T = G.table
        comms = set()
        for a in G.elements():
            for b in G.elements():
                comms.add(int(T[T[a, b], T[G.inverse(a), G.inverse(b)]]))
        G._memo["commutator"] = closure_indices(T, comms)
    return G._memo["commutator"]


def h1(G: FiniteGroup) -> AbelianGroupDescriptor:
    """Invariant factors of the abelianization, from the commutator subgroup."""
    if "h1" in G._memo:
        return G._memo["h1"]
    from .groups import SubgroupHandle, quotient

    K = SubgroupHandle(G, commutator_subgroup(G))
    A, _ = quotient(G, K)
    # present A on all its elements: relations e_a + e_b - e_{ab}
    nA = A.order
    ech = ColumnEchelon(nA - 1) if nA > 1 else None
    if nA == 1:
        G._memo["h1"] = AbelianGroupDescriptor(0, ())
        return G._memo["h1"]
    T = A.table
    for a in range(1, nA):
        for b in range(a, nA):
            ab = int(T[a, b])
            d: dict[int, int] = {}
            for x, v in ((a, 1), (b, 1), (ab, -1)):
                if x != 0:
                    d[x - 1] = d.get(x - 1, 0) + v
            items = sorted((r, v) for r, v in d.items() if v)
            if items:
                ech.insert([r for r, _ in items], [v for _, v in items])
    td = torsion_structure(ech)
    if td.free_rows:
        raise PreconditionError("abelianization presentation left free rows")
    desc = AbelianGroupDescriptor(0, td.factors)
    G._memo["h1"] = desc
    return desc


def h1_p_part_order(G: FiniteGroup, p: int) -> int:
    n = 1
    for d in h1(G).invariant_factors:
        n *= p ** _pval(d, p) if d % p == 0 else 1
    return n


# -- H2 and quotients ----------------------------------------------------------------


@dataclass
class H2Presentation:
    """H2 (or a quotient of it) over a ring, with a class evaluator.

    ``descriptor`` is the abelian-group shape of the homology over the
    ring. For the integral ring the evaluator returns torsion coordinates
    (one residue per invariant factor); over Z/p^k the exact integral
    torsion factors of the underlying quotient are exposed separately as
    ``integral_factors`` and class triviality is decided by torsion-order
    comparison.
    """

    group: FiniteGroup
    ring: Ring
    descriptor: AbelianGroupDescriptor
    integral_factors: tuple[int, ...]
    _echelon: ColumnEchelon = field(repr=False)
    _torsion: TorsionData = field(repr=False)
    _quotiented: tuple = ()

    @property
    def torsion_order(self) -> int:
        n = 1
        for d in self.integral_factors:
            n *= d
        return n

    def class_coordinates(self, chain: Cycle2) -> tuple[int, ...]:
        """Coordinates of a cycle's class, one residue per invariant factor."""
        self._require_cycle(chain)
        if self._torsion.oplog is None:
            raise PreconditionError(
                "no evaluator: recompute with with_evaluator=True (Integers ring)"
            )
        return self._torsion.coordinates(chain.to_vec())

    def class_is_trivial(self, chain: Cycle2) -> bool:
        self._require_cycle(chain)
        vec = chain.to_vec()
        if isinstance(self.ring, Integers):
            return self._echelon.reduce_vector(vec) == {}
        if all(v % self.ring.modulus == 0 for v in vec.values()):
            return True
        probe = self._echelon.copy()
        probe.insert(list(vec), list(vec.values()))
        td = torsion_structure(probe)
        order = 1
        for f in td.factors:
            order *= f
        if len(td.free_rows) != len(self._torsion.free_rows):
            raise PreconditionError("probe vector was not a cycle")
        return order == self.torsion_order

    def _require_cycle(self, chain: Cycle2):
        if chain.group is not self.group:
            raise PreconditionError("cycle belongs to a different group")
        if not cycle_check(self.group, chain, self.ring):
            raise PreconditionError("chain is not a cycle over the active ring")


def _expected_free_rows(G: FiniteGroup) -> int:
    return G.order - 1


def h2(
    G: FiniteGroup,
    ring: Ring = INTEGERS,
    *,
    with_evaluator: Optional[bool] = None,
    allow_large: bool = False,
) -> H2Presentation:
    """H2 of the group over the ring, as bar homology ker d2 / im d3.

    Integral runs are capped at order 128 unless ``allow_large`` lifts the
    gate; modular runs require a p-group and p^k >= |G|^2. Evaluators
    (class coordinates) are built for the integral ring by default; the
    modular ring answers triviality questions without one.
    """
    if with_evaluator is None:
        with_evaluator = isinstance(ring, Integers)
    key = ("h2", _ring_key(ring))
    cached = G._memo.get(key)
    if cached is not None and not (with_evaluator and cached._torsion.oplog is None):
        return cached

    n = G.order
    if isinstance(ring, Integers):
        if n > INTEGRAL_ORDER_CAP and not allow_large:
            raise PreconditionError(
                f"integral H2 is gated at order {INTEGRAL_ORDER_CAP}; "
                "pass allow_large=True or use the modular ring"
            )
        modulus = prime = None
    else:
        p = ring.prime
        a = _pval(n, p)
        if p**a != n:
            raise PreconditionError("modular homology requires a p-group")
        if ring.modulus < n * n:
            raise PreconditionError("modular homology requires p^k >= |G|^2")
        modulus, prime = ring.modulus, p

    if n == 1:
        ech = ColumnEchelon(1, modulus=modulus, prime=prime)
        td = torsion_structure(ech, with_transform=with_evaluator)
        pres = H2Presentation(G, ring, AbelianGroupDescriptor(), (), ech, td)
        G._memo[key] = pres
        return pres

    m = n - 1
    ech = _build_d3_echelon(G, modulus, prime)
    pristine = ech.copy()
    td = torsion_structure(ech, with_transform=with_evaluator)
    _audit_against_h1(G, ring, td)

    if isinstance(ring, Integers):
        if td.rank != m * m - m:
            raise PreconditionError("H2 has unexpected free rank (rank audit failed)")
        descriptor = AbelianGroupDescriptor(0, td.factors)
    else:
        # over Z/p^k the homology module splits as H2 (+) Tor(H1, Z/p^k)
        descriptor = AbelianGroupDescriptor.from_cyclic_orders(
            list(td.factors) + list(h1(G).invariant_factors)
        )
    pres = H2Presentation(G, ring, descriptor, td.factors, pristine, td)
    G._memo[key] = pres
    return pres


def _audit_against_h1(G: FiniteGroup, ring: Ring, td: TorsionData):
    """Bookkeeping audits tying the d3 reduction to the abelianization.

    The cokernel of d3 on C2 splits (for finite H2) as H2 (+) Z^(n-1), so
    exactly n-1 ambient rows must stay free. Streaming d2 over the same
    ring must reproduce the independently computed abelianization.
    """
    n = G.order
    if len(td.free_rows) != _expected_free_rows(G):
        raise PreconditionError("free-row audit failed: H2 not finite?")
    key = ("d2audit", _ring_key(ring))
    if G._memo.get(key):
        return
    modulus = prime = None
    if isinstance(ring, ModPrimePower):
        modulus, prime = ring.modulus, ring.prime
    ech2 = ColumnEchelon(n - 1, modulus=modulus, prime=prime)
    _stream_d2(G, ech2)
    td2 = torsion_structure(ech2)
    if td2.free_rows:
        raise PreconditionError("d2 audit failed: abelianization not finite?")
    want = h1(G).invariant_factors
    if isinstance(ring, ModPrimePower):
        p = ring.prime
        want = tuple(
            p ** _pval(d, p) for d in want if d % p == 0
        )
    got = tuple(sorted(td2.factors))
    if got != tuple(sorted(want)):
        raise PreconditionError(
            f"d2 audit failed: bar abelianization {got} != group-theoretic {want}"
        )
    G._memo[key] = True


def quotient_classes(
    H: H2Presentation,
    extra: Sequence[Cycle2],
    *,
    with_evaluator: Optional[bool] = None,
) -> H2Presentation:
    """Quotient of H's class space by the span of extra cycles.

    Returns a new presentation whose descriptor covers
    (ker d2)/(im d3 + span(extra)) over H's ring, with the same evaluator
    contract as ``h2``. Every extra chain must be a cycle.
    """
    G = H.group
    for chain in extra:
        if not cycle_check(G, chain, H.ring):
            raise PreconditionError("extra chain is not a cycle over the ring")
    if with_evaluator is None:
        with_evaluator = H._torsion.oplog is not None
    cols = []
    for chain in extra:
        items = sorted(chain.to_vec().items())
        if items:
            cols.append(([r for r, _ in items], [v for _, v in items]))
    ech = None
    if H._echelon.stored_nonzeros() >= 50000 and cols:
        try:
            from .smith import fast_quotient_echelon

            ech = fast_quotient_echelon(H._echelon, cols)
        except FastStreamError:
            ech = None
    if ech is None:
        ech = H._echelon.copy()
        for rows, vals in cols:
            ech.insert(rows, vals)
    pristine = ech.copy()
    td = torsion_structure(ech, with_transform=with_evaluator)
    if len(td.free_rows) != len(H._torsion.free_rows):
        raise PreconditionError("quotient audit failed: extra chains not cycles?")
    if isinstance(H.ring, Integers):
        descriptor = AbelianGroupDescriptor(0, td.factors)
    else:
        descriptor = AbelianGroupDescriptor.from_cyclic_orders(
            list(td.factors) + list(h1(G).invariant_factors)
        )
    return H2Presentation(
        G,
        H.ring,
        descriptor,
        td.factors,
        pristine,
        td,
        _quotiented=tuple(extra),
    )
