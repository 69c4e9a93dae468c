"""Compiled fast path for the streaming column echelon.

One numba kernel mirrors ``ColumnEchelon.insert`` exactly (same pivoting,
same normalization, same Euclidean/valuation swap rule) on pooled arrays,
so a batch of CSR columns is reduced without touching Python objects.

Capacity is handled by restart: if the pool, heap or touched stack fills
mid-column the kernel reports it and the caller redoes the whole stream
with larger buffers (a swap splices the incoming column into the pool, so
single columns cannot be replayed). Integer mode guards every stored value
and multiplier at 2^31 so products stay inside int64; on overflow the
caller falls back to the exact Python engine.

Status codes: 0 done, 1 capacity exceeded, 3 integer overflow.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - import guard
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap

_GUARD = np.int64(1) << np.int64(31)


@njit(cache=True)
def _heap_push(heap, size, val):
    i = size
    heap[i] = val
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        small = l
        r = l + 1
        if r < size and heap[r] < heap[l]:
            small = r
        if heap[i] <= heap[small]:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top, size


@njit(cache=True)
def _pval64(v, p):
    w = 0
    while v % p == 0:
        v //= p
        w += 1
    return w


@njit(cache=True)
def _modinv64(a, q):
    x, nx = np.int64(1), np.int64(0)
    g, ng = a % q, q
    while ng:
        t = g // ng
        x, nx = nx, x - t * nx
        g, ng = ng, g - t * ng
    return x % q


@njit(cache=True)
def _normalize_stored(pool_rows, pool_vals, start, used, mode, q, p):
    """Scale a freshly stored column to canonical lead; returns new used."""
    if mode == 0:
        if pool_vals[start] < 0:
            for t in range(start, used):
                pool_vals[t] = -pool_vals[t]
        return used
    lead = pool_vals[start] % q
    w = _pval64(lead, p)
    unit = lead
    for _ in range(w):
        unit //= p
    inv = _modinv64(unit, q)
    if inv == 1:
        return used
    t2 = start
    for t in range(start, used):
        nv = (pool_vals[t] * inv) % q
        if nv != 0:
            pool_rows[t2] = pool_rows[t]
            pool_vals[t2] = nv
            t2 += 1
    return t2


@njit(cache=True)
def insert_columns(
    indptr,
    col_rows,
    col_vals,
    piv_ptr,
    piv_len,
    pool_rows,
    pool_vals,
    state,  # int64[2]: pool_used, n_pivots
    scratch,
    heap,
    touched,
    mode,  # 0 integers, 1 modular
    q,
    p,
):
    pool_used = state[0]
    npiv = state[1]
    ncols = indptr.shape[0] - 1
    pool_cap = pool_rows.shape[0]
    heap_cap = heap.shape[0] - 2
    touched_cap = touched.shape[0] - 2
    status = 0

    for ci in range(ncols):
        lo, hi = indptr[ci], indptr[ci + 1]
        heap_size = 0
        tcount = 0
        for idx in range(lo, hi):
            r = int(col_rows[idx])
            nv = scratch[r] + np.int64(col_vals[idx])
            if mode == 1:
                nv %= q
            scratch[r] = nv
            touched[tcount] = r
            tcount += 1
            heap_size = _heap_push(heap, heap_size, r)
        while heap_size > 0 and status == 0:
            r64, heap_size = _heap_pop(heap, heap_size)
            r = int(r64)
            v = scratch[r]
            if mode == 1:
                v %= q
            if v == 0:
                continue
            pp = piv_ptr[r]
            if pp < 0:
                # new pivot: drain the heap in row order and store
                start = pool_used
                if pool_used >= pool_cap:
                    status = 1
                    break
                pool_rows[pool_used] = r
                pool_vals[pool_used] = v
                pool_used += 1
                last = r
                while heap_size > 0:
                    rr64, heap_size = _heap_pop(heap, heap_size)
                    rr = int(rr64)
                    if rr == last:
                        continue
                    last = rr
                    vv = scratch[rr]
                    if mode == 1:
                        vv %= q
                    if vv == 0:
                        continue
                    if pool_used >= pool_cap:
                        status = 1
                        break
                    pool_rows[pool_used] = rr
                    pool_vals[pool_used] = vv
                    pool_used += 1
                if status != 0:
                    break
                pool_used = _normalize_stored(
                    pool_rows, pool_vals, start, pool_used, mode, q, p
                )
                piv_ptr[r] = start
                piv_len[r] = pool_used - start
                npiv += 1
                break
            plen = piv_len[r]
            pv = pool_vals[pp]
            if mode == 0:
                m = v // pv
                if m > _GUARD or -m > _GUARD:
                    status = 3
                    break
            else:
                w = _pval64(pv, p)
                pw = np.int64(1)
                for _ in range(w):
                    pw *= p
                if v % pw == 0:
                    m = (v // pw) % q
                else:
                    m = np.int64(0)
            if m != 0:
                if tcount + plen > touched_cap or heap_size + plen > heap_cap:
                    status = 1
                    break
                for t in range(pp, pp + plen):
                    rr = int(pool_rows[t])
                    nv = scratch[rr] - m * pool_vals[t]
                    if mode == 1:
                        nv %= q
                    elif nv > _GUARD or -nv > _GUARD:
                        status = 3
                        break
                    scratch[rr] = nv
                    touched[tcount] = rr
                    tcount += 1
                    if rr != r and nv != 0:
                        heap_size = _heap_push(heap, heap_size, rr)
                if status != 0:
                    break
            rem = scratch[r]
            if mode == 1:
                rem %= q
            if rem == 0:
                scratch[r] = 0
                continue
            # Euclidean/valuation swap: working tail becomes the pivot at r
            # and the displaced column re-enters the reduction
            start = pool_used
            if pool_used >= pool_cap:
                status = 1
                break
            pool_rows[pool_used] = r
            pool_vals[pool_used] = rem
            pool_used += 1
            scratch[r] = 0
            last = r
            while heap_size > 0:
                rr64, heap_size = _heap_pop(heap, heap_size)
                rr = int(rr64)
                if rr == last:
                    continue
                last = rr
                vv = scratch[rr]
                if mode == 1:
                    vv %= q
                scratch[rr] = 0
                if vv == 0:
                    continue
                if pool_used >= pool_cap:
                    status = 1
                    break
                pool_rows[pool_used] = rr
                pool_vals[pool_used] = vv
                pool_used += 1
            if status != 0:
                break
            pool_used = _normalize_stored(
                pool_rows, pool_vals, start, pool_used, mode, q, p
            )
            old_ptr, old_len = piv_ptr[r], piv_len[r]
            piv_ptr[r] = start
            piv_len[r] = pool_used - start
            if tcount + old_len > touched_cap or old_len > heap_cap:
                status = 1
                break
            heap_size = 0
            for t in range(old_ptr, old_ptr + old_len):
                rr = int(pool_rows[t])
                scratch[rr] = pool_vals[t]
                touched[tcount] = rr
                tcount += 1
                heap_size = _heap_push(heap, heap_size, rr)
        for t in range(tcount):
            scratch[touched[t]] = 0
        if status != 0:
            state[0] = pool_used
            state[1] = npiv
            return status, ci
        state[0] = pool_used
        state[1] = npiv
    return 0, ncols
