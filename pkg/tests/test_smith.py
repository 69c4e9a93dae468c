import random

import pytest

from bordcalc import (
    AbelianGroupDescriptor,
    ColumnEchelon,
    EliminationOverflowError,
    InputError,
    SparseIntMat,
    smith_normal_form,
    snf_dense,
    torsion_structure,
)
from bordcalc.smith import _pval


def test_snf_spec_examples():
    r = smith_normal_form(SparseIntMat.from_dense([[2, 0], [0, 3]]))
    assert r.invariant_factors == (1, 6)
    assert r.rank == 2
    r = smith_normal_form(SparseIntMat(3, 4, ()))
    assert r.invariant_factors == () and r.rank == 0
    r = smith_normal_form(SparseIntMat.from_dense([[2, 4], [4, 8]]))
    assert r.invariant_factors == (2,) and r.rank == 1


def test_snf_transforms_certify():
    rnd = random.Random(11)
    for _ in range(50):
        m, n = rnd.randint(1, 6), rnd.randint(1, 6)
        A = [[rnd.randint(-5, 5) for _ in range(n)] for _ in range(m)]
        diag, U, V = snf_dense(A, transforms=True)
        # U A V must be the diagonal matrix
        UA = [
            [sum(U[i][k] * A[k][j] for k in range(m)) for j in range(n)]
            for i in range(m)
        ]
        D = [
            [sum(UA[i][k] * V[k][j] for k in range(n)) for j in range(n)]
            for i in range(m)
        ]
        for i in range(m):
            for j in range(n):
                want = diag[i] if i == j and i < len(diag) else 0
                assert D[i][j] == want
        # divisibility chain
        nz = [d for d in diag if d]
        for a, b in zip(nz, nz[1:]):
            assert b % a == 0


def test_snf_overflow_guard():
    # clearing the pivot row multiplies N by itself: 1 - N^2 crosses 2^127
    N = 1 << 64
    A = [[1, N], [N, 1]]
    with pytest.raises(EliminationOverflowError) as exc:
        smith_normal_form(SparseIntMat.from_dense(A))
    assert "modular" in str(exc.value)


def test_sparse_mat_validation():
    with pytest.raises(InputError):
        SparseIntMat(2, 2, ((0, 0, 0),))  # stored zero
    with pytest.raises(InputError):
        SparseIntMat(2, 2, ((0, 0, 1), (0, 0, 2)))  # duplicate
    with pytest.raises(InputError):
        SparseIntMat(2, 2, ((2, 0, 1),))  # out of range


def test_descriptor_chain_rules():
    d = AbelianGroupDescriptor.from_cyclic_orders([2, 3])
    assert d.invariant_factors == (6,)
    d = AbelianGroupDescriptor.from_cyclic_orders([2, 2, 3])
    assert d.invariant_factors == (2, 6)
    d = AbelianGroupDescriptor.from_cyclic_orders([4, 6, 2])
    assert d.invariant_factors == (2, 2, 12)
    with pytest.raises(InputError):
        AbelianGroupDescriptor(0, (3, 2))
    assert str(AbelianGroupDescriptor(1, (2,))) == "Z^1 + Z/2"
    assert str(AbelianGroupDescriptor()) == "0"


def test_echelon_matches_dense_snf_integer():
    rnd = random.Random(7)
    for _ in range(150):
        m, n = rnd.randint(1, 8), rnd.randint(1, 8)
        A = [
            [rnd.randint(-4, 4) if rnd.random() < 0.6 else 0 for _ in range(n)]
            for _ in range(m)
        ]
        diag, _, _ = snf_dense(A)
        want = sorted(d for d in diag if d not in (0, 1))
        ech = ColumnEchelon(m)
        for j in range(n):
            rows = [i for i in range(m) if A[i][j]]
            ech.insert(rows, [A[i][j] for i in rows])
        td = torsion_structure(ech, with_transform=True)
        assert sorted(td.factors) == want
        assert td.rank == sum(1 for d in diag if d)


def test_echelon_matches_dense_snf_modular():
    rnd = random.Random(9)
    for _ in range(200):
        m, n = rnd.randint(1, 8), rnd.randint(1, 8)
        p = rnd.choice([2, 3, 5])
        k = rnd.choice([3, 4, 6])
        q = p**k
        A = [
            [rnd.randint(-9, 9) if rnd.random() < 0.6 else 0 for _ in range(n)]
            for _ in range(m)
        ]
        diag, _, _ = snf_dense(A)
        vs = [_pval(d, p) for d in diag if d]
        want = sorted(p**v for v in vs if 1 <= v < k)
        want_free = m - sum(1 for v in vs if v < k)
        ech = ColumnEchelon(m, modulus=q, prime=p)
        for j in range(n):
            rows = [i for i in range(m) if A[i][j] % q]
            ech.insert(rows, [A[i][j] for i in rows])
        td = torsion_structure(ech)
        assert sorted(td.factors) == want
        assert len(td.free_rows) == want_free


def test_membership_residual_over_z():
    rnd = random.Random(3)
    for _ in range(100):
        m, n = rnd.randint(2, 7), rnd.randint(1, 6)
        A = [[rnd.randint(-4, 4) for _ in range(n)] for _ in range(m)]
        ech = ColumnEchelon(m)
        cols = []
        for j in range(n):
            col = {i: A[i][j] for i in range(m) if A[i][j]}
            cols.append(col)
            ech.insert(list(col), list(col.values()))
        v = {}
        for col in cols:
            c = rnd.randint(-3, 3)
            for r, val in col.items():
                v[r] = v.get(r, 0) + c * val
        assert ech.reduce_vector(v) == {}
        # a vector off the span leaves a residual
        free = [r for r in range(m) if r not in ech.pivots]
        if free:
            v2 = dict(v)
            v2[free[0]] = v2.get(free[0], 0) + 1
            assert ech.reduce_vector(v2) != {}


def test_modular_membership_needs_torsion_orders():
    ech = ColumnEchelon(2, modulus=8, prime=2)
    ech.insert([0], [2])
    from bordcalc import PreconditionError

    with pytest.raises(PreconditionError):
        ech.reduce_vector({0: 2})


def test_evaluator_coordinates_additive():
    # span <(2,0,0), (0,3,0)> in Z^3: coker torsion Z/2 + Z/3 = Z/6, free Z
    ech = ColumnEchelon(3)
    ech.insert([0], [2])
    ech.insert([1], [3])
    td = torsion_structure(ech, with_transform=True)
    assert td.factors == (6,)
    c1 = td.coordinates({0: 1})
    c2 = td.coordinates({1: 1})
    c12 = td.coordinates({0: 1, 1: 1})
    assert all(
        (a + b) % d == x % d
        for a, b, x, d in zip(c1, c2, c12, td.factors)
    )
    # generators have the right orders in Z/6
    assert c1[0] % 6 != 0 and (c1[0] * 2) % 6 == 0
    assert c2[0] % 6 != 0 and (c2[0] * 3) % 6 == 0
    # columns of the span evaluate to zero, torsion-or-not rejected on free part
    assert td.coordinates({0: 2}) == (0,)
    assert td.coordinates({1: 3}) == (0,)
    from bordcalc import PreconditionError

    with pytest.raises(PreconditionError):
        td.coordinates({2: 1})  # free direction is not a torsion class
