"""Pure-Python BFS closure kernel.

Reference implementation of the compiled core: identical signature,
identical discovery order, byte-identical outputs.  Kept deliberately
simple (tuples in a dict-backed set) so it can serve as the oracle for
the compiled version.
"""

from __future__ import annotations

import numpy as np

from ..errors import CapExceeded


def _mul_flat(g, x, n, modulus):
    out = []
    for i in range(n):
        grow = g[i * n : (i + 1) * n]
        for j in range(n):
            s = 0
            for l in range(n):
                s += grow[l] * x[l * n + j]
            out.append(s % modulus)
    return tuple(out)


def bfs_closure(gens: np.ndarray, modulus: int, n: int, cap: int):
    """Breadth-first closure of <gens> under left multiplication.

    gens: (g, n*n) int64 stack of invertible generators, reduced.
    Returns (elements, starts): elements is an (order, n*n) int64 array
    in discovery order starting with the identity; starts holds the
    first index of each BFS depth plus a final sentinel equal to the
    order, so depth d occupies elements[starts[d]:starts[d+1]].

    Raises CapExceeded the moment the element count would pass cap.
    """
    gens = np.ascontiguousarray(gens, dtype=np.int64) % modulus
    gen_rows = [tuple(int(v) for v in row) for row in gens]
    ident = tuple(1 if i == j else 0 for i in range(n) for j in range(n))

    elements = [ident]
    seen = {ident}
    starts = [0]
    lo, hi = 0, 1
    while lo < hi:
        for idx in range(lo, hi):
            x = elements[idx]
            for g in gen_rows:
                y = _mul_flat(g, x, n, modulus)
                if y not in seen:
                    if len(elements) >= cap:
                        raise CapExceeded(
                            f"closure exceeded cap={cap}",
                            cap=cap,
                            found=len(elements),
                        )
                    seen.add(y)
                    elements.append(y)
        if len(elements) > hi:
            starts.append(hi)
        lo, hi = hi, len(elements)

    out = np.array(elements, dtype=np.int64).reshape(len(elements), n * n)
    starts.append(len(elements))
    return out, np.array(starts, dtype=np.int64)
