# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS closure kernel.

Open-addressing hash table (FNV-1a over the flat row, linear probing)
over a growable element buffer.  Discovery order matches _pycore.py
exactly: elements are swept in insertion order and each is multiplied
by the generators in the order given, so the two kernels return
byte-identical arrays.
"""

import numpy as np

cimport numpy as cnp

from noridim.errors import CapExceeded

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.uint64_t u64


cdef inline u64 _fnv1a(const i64* row, Py_ssize_t nn) noexcept nogil:
    cdef u64 h = 14695981039346656037ULL
    cdef Py_ssize_t t
    for t in range(nn):
        h ^= <u64>row[t]
        h *= 1099511628211ULL
        h ^= <u64>row[t] >> 32
        h *= 1099511628211ULL
    return h


cdef inline bint _rows_equal(const i64* a, const i64* b, Py_ssize_t nn) noexcept nogil:
    cdef Py_ssize_t t
    for t in range(nn):
        if a[t] != b[t]:
            return 0
    return 1


def bfs_closure(gens, long long modulus, int n, long long cap):
    """Breadth-first closure of <gens> under left multiplication.

    Same contract as the pure kernel: returns (elements, starts) with
    elements in discovery order (identity first) and starts holding the
    first index of each BFS depth plus a final sentinel.
    """
    cdef cnp.ndarray[i64, ndim=2, mode="c"] gens_arr = \
        np.ascontiguousarray(gens, dtype=np.int64) % modulus
    cdef Py_ssize_t ng = gens_arr.shape[0]
    cdef Py_ssize_t nn = n * n
    if ng and gens_arr.shape[1] != nn:
        raise ValueError(f"generator rows must have length {nn}")

    cdef Py_ssize_t capacity = 1024 if cap > 1024 else <Py_ssize_t>cap
    if capacity < 1:
        capacity = 1
    elems_obj = np.empty((capacity, nn), dtype=np.int64)
    cdef i64[:, ::1] ev = elems_obj

    cdef Py_ssize_t table_size = 1 << 11
    table_obj = np.full(table_size, -1, dtype=np.int32)
    cdef i32[::1] tv = table_obj
    cdef u64 mask = table_size - 1

    cdef cnp.ndarray[i64, ndim=1, mode="c"] scratch = np.zeros(nn, dtype=np.int64)
    cdef i64* sv = &scratch[0]
    cdef i64[:, ::1] gv = gens_arr

    cdef Py_ssize_t count = 0, lo = 0, hi = 1
    cdef Py_ssize_t idx, gi, i, j, l, r, newcap, new_size
    cdef i64 s
    cdef u64 slot
    cdef i32 e
    cdef bint found

    # Identity seeds the table.
    for t in range(nn):
        sv[t] = 0
    for i in range(n):
        sv[i * n + i] = 1
    for t in range(nn):
        ev[0, t] = sv[t]
    tv[_fnv1a(sv, nn) & mask] = 0
    count = 1

    starts = [0]
    while lo < hi:
        for idx in range(lo, hi):
            for gi in range(ng):
                # scratch = gens[gi] @ elems[idx], reduced per addition
                for i in range(n):
                    for j in range(n):
                        s = 0
                        for l in range(n):
                            s = (s + gv[gi, i * n + l] * ev[idx, l * n + j]) % modulus
                        sv[i * n + j] = s
                slot = _fnv1a(sv, nn) & mask
                found = 0
                while True:
                    e = tv[slot]
                    if e < 0:
                        break
                    if _rows_equal(&ev[e, 0], sv, nn):
                        found = 1
                        break
                    slot = (slot + 1) & mask
                if found:
                    continue
                if count >= cap:
                    raise CapExceeded(
                        f"closure exceeded cap={cap}", cap=cap, found=count
                    )
                if count == capacity:
                    newcap = capacity * 2
                    if newcap > cap:
                        newcap = <Py_ssize_t>cap
                    new_obj = np.empty((newcap, nn), dtype=np.int64)
                    new_obj[:count] = elems_obj[:count]
                    elems_obj = new_obj
                    ev = elems_obj
                    capacity = newcap
                for t in range(nn):
                    ev[count, t] = sv[t]
                tv[slot] = <i32>count
                count += 1
                # Grow the table before load factor passes 1/2.
                if 2 * count >= table_size:
                    new_size = table_size * 2
                    new_table = np.full(new_size, -1, dtype=np.int32)
                    tv = new_table
                    table_obj = new_table
                    table_size = new_size
                    mask = new_size - 1
                    for r in range(count):
                        slot = _fnv1a(&ev[r, 0], nn) & mask
                        while tv[slot] >= 0:
                            slot = (slot + 1) & mask
                        tv[slot] = <i32>r
        if count > hi:
            starts.append(hi)
        lo = hi
        hi = count

    starts.append(count)
    return elems_obj[:count].copy(), np.array(starts, dtype=np.int64)
