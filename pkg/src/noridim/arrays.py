"""Vectorized batch helpers over stacks of flat matrix rows.

A "row stack" is an (m, n*n) int64 array of row-major matrices reduced
mod some modulus < 2^31.  Products are accumulated one inner index at a
time with a reduction after each step, which keeps every intermediate
below 2^62 + 2^31 and therefore safely inside int64 for all n.
"""

from __future__ import annotations

import numpy as np


def identity_rows(m: int, n: int) -> np.ndarray:
    """(m, n*n) stack of identity matrices."""
    out = np.zeros((m, n * n), dtype=np.int64)
    out[:, :: n + 1] = 1
    return out


def matmul_rows(a: np.ndarray, b: np.ndarray, n: int, modulus: int) -> np.ndarray:
    """Entrywise-batched product of two row stacks."""
    am = a.reshape(-1, n, n)
    bm = b.reshape(-1, n, n)
    out = np.zeros_like(am)
    for l in range(n):
        out += am[:, :, l, None] * bm[:, None, l, :]
        out %= modulus
    return out.reshape(-1, n * n)


def pow_rows(a: np.ndarray, e: int, n: int, modulus: int) -> np.ndarray:
    """Square-and-multiply on a row stack, elementwise power e >= 0."""
    result = identity_rows(a.shape[0], n)
    base = a % modulus
    while e:
        if e & 1:
            result = matmul_rows(result, base, n, modulus)
        e >>= 1
        if e:
            base = matmul_rows(base, base, n, modulus)
    return result


def log_unipotent_rows(u: np.ndarray, n: int, p: int, fact_invs=None) -> np.ndarray:
    """Truncated logarithm -sum_{i=1}^{n-1} (1-u)^i / i on a stack mod p.

    Callers are responsible for u being unipotent; the series itself is
    a bare polynomial in (1 - u).
    """
    w = (identity_rows(u.shape[0], n) - u) % p
    out = np.zeros_like(w)
    term = identity_rows(u.shape[0], n)
    for i in range(1, n):
        term = matmul_rows(term, w, n, p)
        out = (out + pow(i, -1, p) * term) % p
    return (-out) % p


def pack_rows(arr: np.ndarray, modulus: int) -> np.ndarray | None:
    """Big-endian base-`modulus` packing of rows into int64 keys.

    Preserves lexicographic row order.  Returns None when modulus^width
    does not fit in int64, in which case callers fall back to slower
    row-wise comparisons.
    """
    width = arr.shape[1]
    if modulus**width > np.iinfo(np.int64).max:
        return None
    weights = (modulus ** np.arange(width - 1, -1, -1, dtype=object)).astype(np.int64)
    return arr @ weights


def unique_rows(arr: np.ndarray, modulus: int) -> np.ndarray:
    """Distinct rows of a stack in ascending lexicographic order."""
    if arr.shape[0] == 0:
        return arr.copy()
    keys = pack_rows(arr, modulus)
    if keys is not None:
        _, idx = np.unique(keys, return_index=True)
        return arr[idx]
    return np.unique(arr, axis=0)
