"""Ring-layer tests: contexts, matrices, spans.

Oracles here are deliberately naive re-implementations local to the
test file (schoolbook products, permutation-expansion determinants,
brute-force span counting) so the library is checked against something
it does not share code with.
"""

from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noridim.errors import (
    ContextMismatch,
    InvalidInput,
    NotDivisible,
    NotInvertible,
    PreconditionError,
)
from noridim.modring import (
    FpSubspace,
    PrecisionContext,
    ResidueMatrix,
    SpanBuilder,
    is_prime,
    span,
    span_rows,
    subspace_leq,
)

CTX25 = PrecisionContext(2, 5, 1)
CTX252 = PrecisionContext(2, 5, 2)
CTX37 = PrecisionContext(3, 7, 1)


# -- local oracles -----------------------------------------------------


def naive_mul(a_rows, b_rows, mod):
    n = len(a_rows)
    return [
        [sum(a_rows[i][l] * b_rows[l][j] for l in range(n)) % mod for j in range(n)]
        for i in range(n)
    ]


def perm_sign(perm):
    sign = 1
    seen = set()
    for start in range(len(perm)):
        if start in seen:
            continue
        length = 0
        j = start
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_oracle(rows, p):
    n = len(rows)
    total = 0
    for perm in permutations(range(n)):
        term = perm_sign(perm)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total % p


def span_size_oracle(basis_rows, p):
    """Count distinct linear combinations by enumerating all of them."""
    combos = set()
    for coeffs in product(range(p), repeat=len(basis_rows)):
        vec = tuple(
            sum(c * row[i] for c, row in zip(coeffs, basis_rows)) % p
            for i in range(len(basis_rows[0]))
        )
        combos.add(vec)
    return len(combos)


def random_matrix_st(ctx):
    nn = ctx.n * ctx.n
    return st.tuples(
        *[st.integers(min_value=0, max_value=ctx.modulus - 1) for _ in range(nn)]
    ).map(lambda ent: ResidueMatrix(ctx, ent))


# -- contexts ----------------------------------------------------------


def test_is_prime_small_cases():
    assert [q for q in range(30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_context_rejects_bad_parameters():
    with pytest.raises(InvalidInput):
        PrecisionContext(2, 4, 1)  # not prime
    with pytest.raises(InvalidInput):
        PrecisionContext(3, 2, 1)  # p < n
    with pytest.raises(InvalidInput):
        PrecisionContext(2, 5, 0)
    with pytest.raises(InvalidInput):
        PrecisionContext(2, 5, 14)  # 5**14 > 2**31
    with pytest.raises(InvalidInput):
        PrecisionContext(0, 5, 1)


def test_factorial_inverses():
    ctx = PrecisionContext(3, 7, 2)
    for i, inv in enumerate(ctx.factorial_invs):
        fact = 1
        for j in range(1, i + 1):
            fact *= j
        assert fact * inv % 49 == 1


def test_unit_inverse_rejects_nonunits():
    with pytest.raises(NotInvertible):
        CTX252.unit_inverse(5)
    assert CTX252.unit_inverse(2) * 2 % 25 == 1


# -- matrices ----------------------------------------------------------


def test_entries_are_reduced():
    m = ResidueMatrix(CTX25, (7, -1, 10, 3))
    assert m.entries == (2, 4, 0, 3)


def test_shape_validated():
    with pytest.raises(InvalidInput):
        ResidueMatrix(CTX25, (1, 2, 3))


def test_product_against_hand_value():
    # [[1,1],[0,1]] * [[1,0],[1,1]] = [[2,1],[1,1]] over F_5
    a = ResidueMatrix.from_rows(CTX25, [[1, 1], [0, 1]])
    b = ResidueMatrix.from_rows(CTX25, [[1, 0], [1, 1]])
    assert (a * b).rows() == ((2, 1), (1, 1))


@settings(max_examples=60)
@given(random_matrix_st(CTX37), random_matrix_st(CTX37))
def test_product_matches_naive_oracle(a, b):
    got = (a * b).rows()
    want = naive_mul([list(r) for r in a.rows()], [list(r) for r in b.rows()], 7)
    assert [list(r) for r in got] == want


@settings(max_examples=60)
@given(random_matrix_st(CTX252), random_matrix_st(CTX252), random_matrix_st(CTX252))
def test_ring_identities(a, b, c):
    assert (a + b) - b == a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert -(-a) == a
    assert 3 * a == a + a + a


def test_context_mixing_is_refused():
    a = ResidueMatrix.identity(CTX25)
    b = ResidueMatrix.identity(CTX252)
    with pytest.raises(ContextMismatch):
        a * b
    with pytest.raises(ContextMismatch):
        a + b


@settings(max_examples=40)
@given(random_matrix_st(CTX252), random_matrix_st(CTX252))
def test_reduction_is_a_ring_homomorphism(a, b):
    assert (a * b).at_level(1) == a.at_level(1) * b.at_level(1)
    assert (a + b).at_level(1) == a.at_level(1) + b.at_level(1)


@settings(max_examples=40)
@given(random_matrix_st(CTX252))
def test_inverse_on_units(m):
    if m.det_mod_p() == 0:
        with pytest.raises(NotInvertible):
            m.inverse()
    else:
        assert m * m.inverse() == ResidueMatrix.identity(CTX252)
        assert m.inverse() * m == ResidueMatrix.identity(CTX252)


@settings(max_examples=60)
@given(random_matrix_st(CTX37))
def test_det_matches_permutation_expansion(m):
    assert m.det_mod_p() == det_oracle([list(r) for r in m.rows()], 7)


def test_powers():
    m = ResidueMatrix.from_rows(CTX25, [[1, 1], [0, 1]])
    assert m**0 == ResidueMatrix.identity(CTX25)
    assert m**3 == m * m * m
    assert m**-1 == m.inverse()
    assert m**5 == ResidueMatrix.identity(CTX25)


def test_div_p_power():
    ctx = PrecisionContext(2, 5, 3)
    m = ResidueMatrix(ctx, (25, 50, 0, 75))
    q = m.div_p_power(2)
    assert q.ctx.k == 1
    assert q.entries == (1, 2, 0, 3)
    with pytest.raises(NotDivisible):
        ResidueMatrix(ctx, (5, 0, 0, 0)).div_p_power(2)
    with pytest.raises(PreconditionError):
        m.div_p_power(3)
    assert m.div_p_power(0) == m


def test_at_level_bounds():
    m = ResidueMatrix.identity(CTX252)
    with pytest.raises(PreconditionError):
        m.at_level(3)
    with pytest.raises(PreconditionError):
        m.at_level(0)


# -- spans -------------------------------------------------------------


def test_span_empty_needs_ctx():
    assert span([], ctx=CTX25).dim == 0
    with pytest.raises(InvalidInput):
        span([])


def test_span_size_matches_combination_count():
    e12 = ResidueMatrix.elementary(CTX25, 0, 1)
    e21 = ResidueMatrix.elementary(CTX25, 1, 0)
    mixed = e12 + 2 * e21
    sub = span([e12, e21, mixed])
    assert sub.dim == 2
    assert span_size_oracle([list(b) for b in sub.basis], 5) == 5**2


@settings(max_examples=40)
@given(st.lists(random_matrix_st(CTX25), max_size=5), st.randoms(use_true_random=False))
def test_span_is_order_independent_and_idempotent(mats, rnd):
    sub = span(mats, ctx=CTX25)
    shuffled = list(mats)
    rnd.shuffle(shuffled)
    assert span(shuffled, ctx=CTX25) == sub
    assert span(sub.basis_matrices(), ctx=CTX25) == sub
    for m in mats:
        assert sub.contains(m)


def test_span_requires_mod_p():
    with pytest.raises(PreconditionError):
        span([ResidueMatrix.identity(CTX252)])


def test_span_rows_agrees_with_scalar_builder():
    rng = np.random.default_rng(7)
    arr = rng.integers(0, 7, size=(50, 9))
    bulk = span_rows(CTX37, arr)
    sb = SpanBuilder(7, 9)
    for row in arr:
        sb.add([int(v) for v in row])
    assert bulk.basis == sb.basis()


def test_subspace_order_and_equality():
    e11 = ResidueMatrix.elementary(CTX25, 0, 0)
    e12 = ResidueMatrix.elementary(CTX25, 0, 1)
    small = span([e12])
    big = span([e11, e12])
    assert subspace_leq(small, big)
    assert not subspace_leq(big, small)
    assert small <= small
    # mutual inclusion only when the canonical bases agree
    other = span([2 * e12])
    assert other == small


def test_fpsubspace_rejects_non_rref():
    with pytest.raises(InvalidInput):
        FpSubspace(CTX25, ((0, 2, 0, 0),))  # pivot not normalized
    with pytest.raises(InvalidInput):
        FpSubspace(CTX25, ((0, 1, 0, 0), (1, 0, 0, 0)))  # pivots out of order
    with pytest.raises(PreconditionError):
        FpSubspace(CTX252, ())


def test_full_span_builder_early_exit():
    sb = SpanBuilder(5, 4)
    sb.add_rows(np.eye(4, dtype=np.int64))
    assert sb.full
    sb.add_rows(np.ones((3, 4), dtype=np.int64))  # no-op once full
    assert sb.dim == 4
