"""Integer and prime-power-modular linear algebra for chain reduction.

Three layers live here:

* ``AbelianGroupDescriptor`` — the output form of every homology/bordism
  computation: free rank plus an invariant-factor chain d1 | d2 | ...
* ``smith_normal_form`` / ``snf_dense`` — textbook Smith normal form for
  explicit (desk-scale) matrices, with optional unimodular transforms and
  the 128-bit overflow guard the contract names.
* ``ColumnEchelon`` + ``torsion_structure`` — the streaming engine: columns
  arrive one at a time and are reduced into a sparse column echelon (a
  column-style Hermite form); afterwards the cokernel torsion is extracted
  by unit-pivot peeling and a dense Smith finish, optionally logging row
  operations so cosets of the column span can be evaluated later.

Over the integers the echelon reduction uses floor division with
Euclidean pivot swaps; over Z/p^k it compares p-adic valuations, so the
recovered elementary-divisor exponents are exact whenever the true
exponents are below k.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as _np

from .errors import EliminationOverflowError, InputError, PreconditionError

_OVERFLOW_BOUND = 1 << 127


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (x, y, g) with x*a + y*b == g >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def modinv(a: int, q: int) -> int:
    x, _, g = xgcd(a % q, q)
    if g != 1:
        raise PreconditionError(f"{a} is not a unit mod {q}")
    return x % q


def _pval(v: int, p: int) -> int:
    """p-adic valuation of v != 0."""
    w = 0
    while v % p == 0:
        v //= p
        w += 1
    return w


# -- descriptors -----------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    """A finitely generated abelian group: Z^free_rank + sum of Z/d_i.

    The invariant factors satisfy d_i >= 2 and d_i | d_{i+1}.
    """

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "invariant_factors", tuple(int(d) for d in self.invariant_factors)
        )
        if self.free_rank < 0:
            raise InputError("free rank must be nonnegative")
        fac = self.invariant_factors
        for d in fac:
            if d < 2:
                raise InputError("invariant factors must be >= 2")
        for a, b in zip(fac, fac[1:]):
            if b % a != 0:
                raise InputError("invariant factors must form a divisibility chain")

    @staticmethod
    def from_cyclic_orders(orders: Iterable[int], free_rank: int = 0) -> "AbelianGroupDescriptor":
        """Canonical chain for a direct sum of cyclic groups of given orders."""
        primes: dict[int, list[int]] = {}
        for d in orders:
            d = int(d)
            if d < 0:
                raise InputError("cyclic orders must be nonnegative")
            if d in (0,):
                free_rank += 1
                continue
            if d == 1:
                continue
            for p in _prime_factors(d):
                e = _pval(d, p)
                primes.setdefault(p, []).append(e)
        width = max((len(v) for v in primes.values()), default=0)
        factors = []
        for i in range(width):
            f = 1
            for p, exps in primes.items():
                exps_sorted = sorted(exps, reverse=True)
                if i < len(exps_sorted):
                    f *= p ** exps_sorted[i]
            factors.append(f)
        factors.sort()
        return AbelianGroupDescriptor(free_rank, tuple(factors))

    def direct_sum(self, other: "AbelianGroupDescriptor") -> "AbelianGroupDescriptor":
        return AbelianGroupDescriptor.from_cyclic_orders(
            list(self.invariant_factors) + list(other.invariant_factors),
            self.free_rank + other.free_rank,
        )

    @property
    def torsion_order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


TRIVIAL_GROUP = AbelianGroupDescriptor(0, ())


# -- explicit sparse matrices and textbook SNF ------------------------------------


@dataclass(frozen=True)
class SparseIntMat:
    """Sparse integer matrix as (row, col, value) triples.

    No duplicate positions and no stored zeros.
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for r, c, v in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise InputError("entry outside matrix bounds")
            if v == 0:
                raise InputError("zero values must not be stored")
            if (r, c) in seen:
                raise InputError("duplicate entry position")
            seen.add((r, c))

    @staticmethod
    def from_dense(mat: Sequence[Sequence[int]]) -> "SparseIntMat":
        rows = len(mat)
        cols = len(mat[0]) if rows else 0
        entries = tuple(
            (r, c, int(v))
            for r, row in enumerate(mat)
            for c, v in enumerate(row)
            if v
        )
        return SparseIntMat(rows, cols, entries)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out


def _check_overflow(v: int):
    if v >= _OVERFLOW_BOUND or -v >= _OVERFLOW_BOUND:
        raise EliminationOverflowError(
            "elimination exceeded 128-bit entries; retry with a modular ring"
        )


def snf_dense(
    mat: Sequence[Sequence[int]],
    transforms: bool = False,
    overflow_check: bool = False,
):
    """Smith normal form of a dense integer matrix.

    Returns (diag, U, V) with U*mat*V diagonal and the divisibility chain
    normalized; U and V are None unless ``transforms`` is requested.
    """
    D = [list(map(int, row)) for row in mat]
    m = len(D)
    n = len(D[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def row_combine(i1, i2, j):
        a, b = D[i1][j], D[i2][j]
        if b == 0:
            return
        if a == 0:
            D[i1], D[i2] = D[i2], D[i1]
            if U is not None:
                U[i1], U[i2] = U[i2], U[i1]
            return
        if b % a == 0:
            q = b // a
            for jj in range(n):
                D[i2][jj] -= q * D[i1][jj]
                if overflow_check:
                    _check_overflow(D[i2][jj])
            if U is not None:
                for jj in range(m):
                    U[i2][jj] -= q * U[i1][jj]
            return
        x, y, g = xgcd(a, b)
        mbg, ag = -b // g, a // g
        for jj in range(n):
            aa, bb = D[i1][jj], D[i2][jj]
            D[i1][jj] = x * aa + y * bb
            D[i2][jj] = mbg * aa + ag * bb
            if overflow_check:
                _check_overflow(D[i1][jj])
                _check_overflow(D[i2][jj])
        if U is not None:
            for jj in range(m):
                aa, bb = U[i1][jj], U[i2][jj]
                U[i1][jj] = x * aa + y * bb
                U[i2][jj] = mbg * aa + ag * bb

    def col_combine(j1, j2, i):
        a, b = D[i][j1], D[i][j2]
        if b == 0:
            return
        if a == 0:
            for row in D:
                row[j1], row[j2] = row[j2], row[j1]
            if V is not None:
                for row in V:
                    row[j1], row[j2] = row[j2], row[j1]
            return
        if b % a == 0:
            q = b // a
            for row in D:
                row[j2] -= q * row[j1]
                if overflow_check:
                    _check_overflow(row[j2])
            if V is not None:
                for row in V:
                    row[j2] -= q * row[j1]
            return
        x, y, g = xgcd(a, b)
        mbg, ag = -b // g, a // g
        for row in D:
            aa, bb = row[j1], row[j2]
            row[j1] = x * aa + y * bb
            row[j2] = mbg * aa + ag * bb
            if overflow_check:
                _check_overflow(row[j1])
                _check_overflow(row[j2])
        if V is not None:
            for row in V:
                aa, bb = row[j1], row[j2]
                row[j1] = x * aa + y * bb
                row[j2] = mbg * aa + ag * bb

    k = 0
    for k in range(min(m, n)):
        # move a pivot of least absolute value into place for stability
        pivots = [
            (abs(D[i][j]), i, j)
            for i in range(k, m)
            for j in range(k, n)
            if D[i][j] != 0
        ]
        if not pivots:
            break
        _, pi, pj = min(pivots)
        if pi != k:
            D[k], D[pi] = D[pi], D[k]
            if U is not None:
                U[k], U[pi] = U[pi], U[k]
        if pj != k:
            for row in D:
                row[k], row[pj] = row[pj], row[k]
            if V is not None:
                for row in V:
                    row[k], row[pj] = row[pj], row[k]
        while True:
            for i in range(k + 1, m):
                row_combine(k, i, k)
            if all(D[k][j] == 0 for j in range(k + 1, n)):
                break
            for j in range(k + 1, n):
                col_combine(k, j, k)
            if all(D[i][k] == 0 for i in range(k + 1, m)):
                break
    # normalize the divisibility chain
    diag = [D[i][i] for i in range(min(m, n))]
    rank = sum(1 for d in diag if d != 0)
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = D[i][i], D[i + 1][i + 1]
            if a and b and b % a != 0:
                # row op R_i += R_{i+1} brings b beside a; rediagonalize
                for j in range(n):
                    D[i][j] += D[i + 1][j]
                    if overflow_check:
                        _check_overflow(D[i][j])
                if U is not None:
                    for j in range(m):
                        U[i][j] += U[i + 1][j]
                while True:
                    for r in range(i + 1, m):
                        row_combine(i, r, i)
                    if all(D[i][j] == 0 for j in range(i + 1, n)):
                        break
                    for j in range(i + 1, n):
                        col_combine(i, j, i)
                    if all(D[r][i] == 0 for r in range(i + 1, m)):
                        break
                changed = True
    for i in range(min(m, n)):
        if D[i][i] < 0:
            for j in range(n):
                D[i][j] = -D[i][j]
            if U is not None:
                for j in range(m):
                    U[i][j] = -U[i][j]
    diag = [D[i][i] for i in range(min(m, n))]
    return diag, U, V


@dataclass(frozen=True)
class SmithResult:
    invariant_factors: tuple[int, ...]  # nonzero diagonal, chain-normalized
    rank: int
    row_transform: Optional[tuple[tuple[int, ...], ...]] = None
    col_transform: Optional[tuple[tuple[int, ...], ...]] = None


def smith_normal_form(M: SparseIntMat, transforms: bool = False) -> SmithResult:
    """Diagonalize an explicit sparse matrix; raises on 128-bit overflow."""
    diag, U, V = snf_dense(M.to_dense(), transforms=transforms, overflow_check=True)
    factors = tuple(d for d in diag if d != 0)
    return SmithResult(
        invariant_factors=factors,
        rank=len(factors),
        row_transform=tuple(map(tuple, U)) if U is not None else None,
        col_transform=tuple(map(tuple, V)) if V is not None else None,
    )


# -- streaming column echelon -------------------------------------------------------


class ColumnEchelon:
    """Incrementally reduced column span in Z^nrows or (Z/p^k)^nrows.

    Stored columns have strictly increasing row indices; the leading row is
    the pivot and no two columns share one. Over Z pivots are positive and
    reduction is floor division with Euclidean swaps; over Z/p^k pivots are
    normalized to exact powers p^w and reduction compares valuations. The
    echelon is a function of the insertion sequence alone, so a fixed
    column stream is reproducible.
    """

    __slots__ = ("nrows", "modulus", "prime", "kexp", "pivots")

    def __init__(self, nrows, modulus=None, prime=None):
        if (modulus is None) != (prime is None):
            raise PreconditionError("modulus and prime go together")
        if modulus is not None:
            k = _pval(modulus, prime)
            if prime**k != modulus:
                raise PreconditionError("modulus must be a power of the prime")
            self.kexp = k
        else:
            self.kexp = None
        self.nrows = nrows
        self.modulus = modulus
        self.prime = prime
        # pivot row -> (rows tuple, vals tuple)
        self.pivots = {}

    def copy(self):
        new = object.__new__(ColumnEchelon)
        new.nrows = self.nrows
        new.modulus = self.modulus
        new.prime = self.prime
        new.kexp = self.kexp
        new.pivots = dict(self.pivots)
        return new

    @property
    def rank(self):
        return len(self.pivots)

    def _store(self, items):
        """Normalize and store a new pivot column; returns its pivot row."""
        q = self.modulus
        if q is None:
            if items[0][1] < 0:
                items = [(r, -v) for r, v in items]
        else:
            p = self.prime
            lead = items[0][1]
            inv = modinv(lead // p ** _pval(lead, p), q)
            scaled = []
            for r, v in items:
                vv = (v * inv) % q
                if vv:
                    scaled.append((r, vv))
            items = scaled
        prow = items[0][0]
        self.pivots[prow] = (tuple(r for r, _ in items), tuple(v for _, v in items))
        return prow

    def insert(self, rows, vals):
        """Reduce one column into the echelon.

        Returns the pivot row of a newly created column, or None if the
        column lies in the current span.
        """
        q = self.modulus
        p = self.prime
        scratch = {}
        for r, v in zip(rows, vals):
            nv = scratch.get(r, 0) + int(v)
            if q is not None:
                nv %= q
            scratch[r] = nv
        heap = [r for r, v in scratch.items() if v]
        heapq.heapify(heap)
        while heap:
            r = heapq.heappop(heap)
            v = scratch.get(r, 0)
            if v == 0:
                continue
            piv = self.pivots.get(r)
            if piv is None:
                items = [(r, v)]
                scratch[r] = 0
                while heap:
                    rr = heapq.heappop(heap)
                    vv = scratch.get(rr, 0)
                    if vv:
                        items.append((rr, vv))
                        scratch[rr] = 0
                return self._store(items)
            prows, pvals = piv
            pv = pvals[0]
            if q is None:
                m = v // pv
            else:
                wp = _pval(pv, p)
                if v % (p**wp) == 0:
                    m = (v // (p**wp)) % q  # pivot lead is exactly p^wp
                else:
                    m = 0
            if m:
                for rr, vv in zip(prows, pvals):
                    nv = scratch.get(rr, 0) - m * vv
                    if q is not None:
                        nv %= q
                    scratch[rr] = nv
                    if rr != r and nv:
                        heapq.heappush(heap, rr)
            rem = scratch.get(r, 0)
            if rem:
                # Euclidean/valuation swap: the working tail becomes the
                # pivot and the displaced column re-enters the reduction.
                items = [(r, rem)]
                scratch[r] = 0
                while heap:
                    rr = heapq.heappop(heap)
                    vv = scratch.get(rr, 0)
                    if vv:
                        items.append((rr, vv))
                        scratch[rr] = 0
                self._store(items)
                for rr, vv in zip(prows, pvals):
                    scratch[rr] = vv
                    heapq.heappush(heap, rr)
        return None

    def insert_csr(self, indptr, rows, vals):
        """Insert a batch of columns given in CSR-style arrays."""
        created = 0
        for i in range(len(indptr) - 1):
            lo, hi = int(indptr[i]), int(indptr[i + 1])
            if self.insert(rows[lo:hi], vals[lo:hi]) is not None:
                created += 1
        return created

    def reduce_vector(self, vec):
        """Canonical residual of a vector against the echelon (over Z only).

        The vector is a {row: value} mapping. The residual is empty exactly
        when the vector lies in the stored span. Over Z/p^k top-down
        reduction is not a sound membership test (tails of non-unit pivots
        can conspire through annihilators), so membership questions in the
        modular ring must go through torsion orders instead.
        """
        if self.modulus is not None:
            raise PreconditionError(
                "residual reduction is only a membership test over Z"
            )
        q = self.modulus
        p = self.prime
        scratch = {}
        for r, v in vec.items():
            nv = int(v)
            if q is not None:
                nv %= q
            if nv:
                scratch[r] = nv
        heap = list(scratch)
        heapq.heapify(heap)
        out = {}
        while heap:
            r = heapq.heappop(heap)
            v = scratch.get(r, 0)
            if v == 0:
                continue
            piv = self.pivots.get(r)
            if piv is None:
                out[r] = v
                scratch[r] = 0
                continue
            prows, pvals = piv
            pv = pvals[0]
            if q is None:
                m = v // pv
                rem = v - m * pv
            else:
                wp = _pval(pv, p)
                if v % (p**wp) == 0:
                    m, rem = (v // (p**wp)) % q, 0
                else:
                    m, rem = 0, v
            if m:
                for rr, vv in zip(prows, pvals):
                    nv = scratch.get(rr, 0) - m * vv
                    if q is not None:
                        nv %= q
                    scratch[rr] = nv
                    if rr != r and nv:
                        heapq.heappush(heap, rr)
            scratch[r] = 0
            if rem:
                out[r] = rem
        return out

    def stored_nonzeros(self):
        return sum(len(rs) for rs, _ in self.pivots.values())


# -- cokernel torsion of an echelon ---------------------------------------------


@dataclass
class TorsionData:
    """Torsion structure of Z^nrows (or (Z/q)^nrows) modulo a column span.

    ``factors`` is the invariant-factor chain of the torsion part. When row
    operations were logged, ``coordinates`` evaluates the class of a vector
    whose image in the free part vanishes (asserted), returning one residue
    per factor.
    """

    nrows: int
    rank: int
    factors: tuple
    diag: tuple  # (original row, factor) pairs aligned with factors
    free_rows: tuple
    modulus: int = None
    oplog: list = None

    def descriptor(self, free_rank=0):
        return AbelianGroupDescriptor(free_rank, self.factors)

    def coordinates(self, vec):
        """Class coordinates of a torsion element of the cokernel."""
        if self.oplog is None:
            raise PreconditionError("torsion data was built without transforms")
        q = self.modulus
        dense = [0] * self.nrows
        for r, v in vec.items():
            dense[r] = int(v) if q is None else int(v) % q
        for op in self.oplog:
            kind = op[0]
            if kind == "axpy":
                _, t, r, m = op
                dense[t] -= m * dense[r]
                if q is not None:
                    dense[t] %= q
            elif kind == "swap":
                _, i, j = op
                dense[i], dense[j] = dense[j], dense[i]
            elif kind == "neg":
                dense[op[1]] = -dense[op[1]] if q is None else (-dense[op[1]]) % q
            elif kind == "scale":
                _, i, u = op
                dense[i] = (dense[i] * u) % q
            else:  # ("comb", i, j, x, y, u, w): rows i,j <- x*i+y*j, u*i+w*j
                _, i, j, x, y, u, w = op
                a, b = dense[i], dense[j]
                dense[i] = x * a + y * b
                dense[j] = u * a + w * b
                if q is not None:
                    dense[i] %= q
                    dense[j] %= q
        for r in self.free_rows:
            v = dense[r] if q is None else dense[r] % q
            if v != 0:
                raise PreconditionError(
                    "vector is not a torsion class modulo the span"
                )
        out = []
        for (r, d) in self.diag:
            out.append(dense[r] % d)
        return tuple(out)


def torsion_structure(echelon: ColumnEchelon, with_transform=False) -> TorsionData:
    """Invariant factors of coker(span) inside the ambient lattice.

    Unit pivots are peeled first with Markowitz-style pivoting (least fill,
    deterministic tie-break); the small remainder is finished by a dense
    Smith pass whose diagonal is chain-normalized. Row operations are
    logged when a coordinate evaluator is requested.
    """
    q = echelon.modulus
    p = echelon.prime
    # dict-of-dicts copy of the echelon columns
    row_entries = {}
    col_entries = {}
    for cid, (prow, (rs, vs)) in enumerate(sorted(echelon.pivots.items())):
        col_entries[cid] = dict(zip(rs, vs))
        for r, v in zip(rs, vs):
            row_entries.setdefault(r, {})[cid] = v
    rank = len(col_entries)
    oplog = [] if with_transform else None

    def is_unit(v):
        return abs(v) == 1 if q is None else v % p != 0

    heap = []
    for r, cols in row_entries.items():
        for c, v in cols.items():
            if is_unit(v):
                heapq.heappush(
                    heap, ((len(cols) - 1) * (len(col_entries[c]) - 1), r, c)
                )
    unit_rows = []
    while heap:
        cost, r, c = heapq.heappop(heap)
        row = row_entries.get(r)
        if row is None or c not in row:
            continue
        v = row[c]
        if not is_unit(v):
            continue
        cur_cost = (len(row) - 1) * (len(col_entries[c]) - 1)
        if cur_cost != cost:
            heapq.heappush(heap, (cur_cost, r, c))
            continue
        # pivot at (r, c): row ops clear column c, then column ops clear row r
        uinv = (1 if v == 1 else -1) if q is None else modinv(v, q)
        col = col_entries[c]
        for t in [t for t in col if t != r]:
            m = col[t] * uinv if q is None else (col[t] * uinv) % q
            if m == 0:
                continue
            if oplog is not None:
                oplog.append(("axpy", t, r, m))
            trow = row_entries[t]
            for cc, vv in row.items():
                nv = trow.get(cc, 0) - m * vv
                if q is not None:
                    nv %= q
                if nv:
                    trow[cc] = nv
                    if cc != c:
                        rec = col_entries[cc]
                        rec[t] = nv
                        if is_unit(nv):
                            heapq.heappush(
                                heap,
                                ((len(trow) - 1) * (len(rec) - 1), t, cc),
                            )
                else:
                    trow.pop(cc, None)
                    if cc != c:
                        col_entries[cc].pop(t, None)
            if not trow:
                del row_entries[t]
        # row r now meets only column c among live columns; drop both
        for cc in list(row.keys()):
            if cc != c:
                col_entries[cc].pop(r, None)
        del row_entries[r]
        del col_entries[c]
        unit_rows.append(r)

    # dense finish on whatever survived the peel
    live_rows = sorted(row_entries)
    live_cols = sorted(col_entries)
    dense = [[col_entries[c].get(r, 0) for c in live_cols] for r in live_rows]
    diag_pairs, extra_unit_rows, dense_rank = _snf_small(
        dense, live_rows, q, p, oplog
    )
    unit_rows.extend(extra_unit_rows)
    pivoted = set(unit_rows) | {r for r, _ in diag_pairs}
    free_rows = tuple(r for r in range(echelon.nrows) if r not in pivoted)
    factors = tuple(d for _, d in diag_pairs)
    return TorsionData(
        nrows=echelon.nrows,
        rank=rank,
        factors=factors,
        diag=tuple(diag_pairs),
        free_rows=free_rows,
        modulus=q,
        oplog=oplog,
    )


def _snf_small(dense, row_ids, q, p, oplog):
    """Dense Smith pass with logged row ops; returns nonunit diagonal.

    ``dense`` is destroyed. Row ids map local rows to ambient rows. The
    returned diagonal pairs (ambient row, factor) are chain-normalized and
    exclude units, which are reported separately.
    """
    m = len(dense)
    n = len(dense[0]) if m else 0

    def log(op):
        if oplog is not None:
            oplog.append(op)

    def row_axpy(t, r, mult):
        if mult == 0:
            return
        dr, dt = dense[r], dense[t]
        for j in range(n):
            dt[j] -= mult * dr[j]
            if q is not None:
                dt[j] %= q
        log(("axpy", row_ids[t], row_ids[r], mult))

    def row_comb(i, jr, x, y, u, w):
        di, dj = dense[i], dense[jr]
        for jj in range(n):
            a, b = di[jj], dj[jj]
            di[jj] = x * a + y * b
            dj[jj] = u * a + w * b
            if q is not None:
                di[jj] %= q
                dj[jj] %= q
        log(("comb", row_ids[i], row_ids[jr], x, y, u, w))

    def row_swap(i, j):
        if i == j:
            return
        dense[i], dense[j] = dense[j], dense[i]
        log(("swap", row_ids[i], row_ids[j]))

    def col_axpy(t, c, mult):
        if mult == 0:
            return
        for row in dense:
            row[t] -= mult * row[c]
            if q is not None:
                row[t] %= q

    def col_swap(i, j):
        if i == j:
            return
        for row in dense:
            row[i], row[j] = row[j], row[i]

    def pick_pivot(k):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                v = dense[i][j]
                if v == 0:
                    continue
                size = abs(v) if q is None else _pval(v, p)
                key = (size, i, j)
                if best is None or key < best:
                    best = key
        return best

    k = 0
    while k < min(m, n):
        best = pick_pivot(k)
        if best is None:
            break
        _, pi, pj = best
        row_swap(k, pi)
        col_swap(k, pj)
        while True:
            if q is not None:
                # local ring: the minimal-valuation pivot divides everything
                pv = dense[k][k]
                w = _pval(pv, p)
                uinv = modinv(pv // (p**w), q)
                for i in range(k + 1, m):
                    v = dense[i][k]
                    if v:
                        row_axpy(i, k, (v // (p**w) * uinv) % q)
                for j in range(k + 1, n):
                    v = dense[k][j]
                    if v:
                        col_axpy(j, k, (v // (p**w) * uinv) % q)
                break
            for i in range(k + 1, m):
                a, b = dense[k][k], dense[i][k]
                if b == 0:
                    continue
                if b % a == 0:
                    row_axpy(i, k, b // a)
                else:
                    x, y, g = xgcd(a, b)
                    row_comb(k, i, x, y, -(b // g), a // g)
            cleared = all(dense[k][j] == 0 for j in range(k + 1, n))
            if cleared and all(dense[i][k] == 0 for i in range(k + 1, m)):
                break
            for j in range(k + 1, n):
                a, b = dense[k][k], dense[k][j]
                if b == 0:
                    continue
                if b % a == 0:
                    col_axpy(j, k, b // a)
                else:
                    x, y, g = xgcd(a, b)
                    # column combine without transform tracking
                    for row in dense:
                        aa, bb = row[k], row[j]
                        row[k] = x * aa + y * bb
                        row[j] = -(b // g) * aa + (a // g) * bb
            if all(dense[i][k] == 0 for i in range(k + 1, m)):
                if all(dense[k][j] == 0 for j in range(k + 1, n)):
                    break
        k += 1
    nnz = k

    if q is None:
        # normalize the divisibility chain among the nonzero diagonal
        changed = True
        while changed:
            changed = False
            for i in range(nnz - 1):
                a, b = dense[i][i], dense[i + 1][i + 1]
                if a and b and b % a != 0:
                    col_axpy(i, i + 1, -1)  # put b beside a, then rediagonalize
                    x, y, g = xgcd(a, b)
                    row_comb(i, i + 1, x, y, -(b // g), a // g)
                    # clear the off-diagonal remnants
                    v = dense[i][i + 1]
                    if v:
                        col_axpy(i + 1, i, v // dense[i][i])
                    v = dense[i + 1][i]
                    if v:
                        row_axpy(i + 1, i, v // dense[i][i])
                    changed = True
        for i in range(nnz):
            if dense[i][i] < 0:
                for j in range(n):
                    dense[i][j] = -dense[i][j]
                log(("neg", row_ids[i]))

    diag_pairs = []
    extra_unit_rows = []
    for i in range(nnz):
        d = dense[i][i]
        if q is not None:
            # scaling one row by a unit is invertible over Z/q; normalize the
            # pivot to the pure power p^w so residues are taken mod p^w
            w = _pval(d, p)
            uinv = modinv(d // (p**w), q)
            if uinv != 1:
                for j in range(n):
                    dense[i][j] = (dense[i][j] * uinv) % q
                log(("scale", row_ids[i], uinv))
            d = p**w
        if d == 1:
            extra_unit_rows.append(row_ids[i])
        else:
            diag_pairs.append((row_ids[i], d))
    diag_pairs.sort(key=lambda t: (t[1], t[0]))
    return diag_pairs, extra_unit_rows, nnz


class FastStreamError(Exception):
    """Internal: compiled stream needs the exact Python fallback."""


class FastColumnBuilder:
    """Batch front end for the compiled echelon kernel.

    Retains every inserted batch so capacity overruns can restart the
    whole stream with larger buffers (pivot swaps splice incoming columns
    into the pool, so single columns cannot be replayed mid-way).
    ``finalize`` converts the pooled state into a ColumnEchelon identical
    to what the Python engine produces for the same column sequence.
    """

    def __init__(self, nrows, modulus=None, prime=None, pool_hint=None):
        from . import _kernels

        if not _kernels.HAVE_NUMBA:
            raise FastStreamError("numba unavailable")
        if modulus is not None and modulus >= (1 << 31):
            raise FastStreamError("modulus too large for the compiled kernel")
        self._k = _kernels
        self.nrows = nrows
        self.modulus = modulus
        self.prime = prime
        self.mode = 0 if modulus is None else 1
        self.batches = []
        self._pool_cap = int(pool_hint or (1 << 20))
        self._heap_cap = 4 * nrows + 64
        self._touched_cap = 8 * nrows + 64
        self._alloc()

    def _alloc(self):
        n = self.nrows
        self.piv_ptr = _np.full(n, -1, dtype=_np.int64)
        self.piv_len = _np.zeros(n, dtype=_np.int64)
        self.pool_rows = _np.empty(self._pool_cap, dtype=_np.int32)
        self.pool_vals = _np.empty(self._pool_cap, dtype=_np.int64)
        self.state = _np.zeros(2, dtype=_np.int64)
        self.scratch = _np.zeros(n, dtype=_np.int64)
        self.heap = _np.empty(self._heap_cap, dtype=_np.int64)
        self.touched = _np.empty(self._touched_cap, dtype=_np.int64)

    def _try(self, batch):
        status, _ = self._k.insert_columns(
            batch[0],
            batch[1],
            batch[2],
            self.piv_ptr,
            self.piv_len,
            self.pool_rows,
            self.pool_vals,
            self.state,
            self.scratch,
            self.heap,
            self.touched,
            self.mode,
            self.modulus or 0,
            self.prime or 0,
        )
        if status == 3:
            raise FastStreamError("int64 guard tripped")
        return status == 0

    def insert_csr(self, indptr, rows, vals):
        batch = (
            _np.ascontiguousarray(indptr, dtype=_np.int64),
            _np.ascontiguousarray(rows, dtype=_np.int32),
            _np.ascontiguousarray(vals, dtype=_np.int64),
        )
        self.batches.append(batch)
        if self._try(batch):
            return
        while True:
            self._pool_cap *= 2
            self._heap_cap *= 2
            self._touched_cap *= 2
            self._alloc()
            if all(map(self._try, self.batches)):
                return

    @property
    def rank(self):
        return int(self.state[1])

    def finalize(self) -> ColumnEchelon:
        ech = ColumnEchelon(self.nrows, modulus=self.modulus, prime=self.prime)
        for r in _np.nonzero(self.piv_ptr >= 0)[0]:
            ptr = int(self.piv_ptr[r])
            ln = int(self.piv_len[r])
            rows = tuple(int(x) for x in self.pool_rows[ptr : ptr + ln])
            vals = tuple(int(x) for x in self.pool_vals[ptr : ptr + ln])
            ech.pivots[int(r)] = (rows, vals)
        return ech


def fast_quotient_echelon(base: ColumnEchelon, extra_cols: list) -> ColumnEchelon:
    """Insert many (rows, vals) columns into a copy of ``base`` via the kernel.

    Falls back to the caller on FastStreamError. The base echelon is
    re-ingested verbatim (its pivots are already reduced, so re-running
    them through the kernel reproduces it exactly), then the extra columns
    stream after it; capacity overruns restart from the retained batches.
    """
    nnz = base.stored_nonzeros()
    fb = FastColumnBuilder(
        base.nrows,
        modulus=base.modulus,
        prime=base.prime,
        pool_hint=2 * nnz + 4096,
    )
    items = sorted(base.pivots.items())
    total = sum(len(rs) for _, (rs, _) in items)
    indptr = _np.zeros(len(items) + 1, dtype=_np.int64)
    rows = _np.empty(total, dtype=_np.int32)
    vals = _np.empty(total, dtype=_np.int64)
    pos = 0
    for i, (_, (rs, vs)) in enumerate(items):
        ln = len(rs)
        rows[pos : pos + ln] = rs
        vals[pos : pos + ln] = vs
        pos += ln
        indptr[i + 1] = pos
    fb.insert_csr(indptr, rows, vals)
    total2 = sum(len(r) for r, _ in extra_cols)
    indptr2 = _np.zeros(len(extra_cols) + 1, dtype=_np.int64)
    rows2 = _np.empty(total2, dtype=_np.int32)
    vals2 = _np.empty(total2, dtype=_np.int64)
    pos = 0
    for i, (rs, vs) in enumerate(extra_cols):
        ln = len(rs)
        rows2[pos : pos + ln] = rs
        vals2[pos : pos + ln] = vs
        pos += ln
        indptr2[i + 1] = pos
    fb.insert_csr(indptr2, rows2, vals2)
    return fb.finalize()
