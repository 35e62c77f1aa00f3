"""Truncated exp/log tests.

The independent oracles: 2x2 nilpotency is characterized by vanishing
trace and determinant (so the scan below never calls is_nilpotent), and
element orders are found by naive repeated multiplication rather than
through the series.
"""

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noridim.errors import NotNilpotent, NotUnipotent, PreconditionError
from noridim.expcore import (
    NilpotentMatrix,
    UnipotentMatrix,
    exp_series,
    has_order_p,
    is_nilpotent,
    is_unipotent,
    log_series,
    phi,
    trunc_exp,
    trunc_log,
)
from noridim.modring import PrecisionContext, ResidueMatrix

CTX25 = PrecisionContext(2, 5, 1)
CTX37 = PrecisionContext(3, 7, 1)


def all_2x2(ctx):
    for ent in product(range(ctx.p), repeat=4):
        yield ResidueMatrix(ctx, ent)


def nilpotent_2x2_oracle(m):
    """Vanishing trace and determinant: the 2x2 characterization."""
    a, b, c, d = m.entries
    p = m.ctx.p
    return (a + d) % p == 0 and (a * d - b * c) % p == 0


def naive_order(g, limit):
    ident = ResidueMatrix.identity(g.ctx)
    acc = g
    for e in range(1, limit + 1):
        if acc == ident:
            return e
        acc = acc * g
    return None


def strictly_upper_st(ctx):
    """Nilpotent by shape, conjugated by a unit lower-triangular matrix."""
    n = ctx.n
    mod = ctx.modulus
    pos_upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ints = st.integers(min_value=0, max_value=mod - 1)

    def build(upper_vals, lower_vals):
        x = [0] * (n * n)
        for (i, j), v in zip(pos_upper, upper_vals):
            x[i * n + j] = v
        s = [0] * (n * n)
        for i in range(n):
            s[i * n + i] = 1
        for (j, i), v in zip(pos_upper, lower_vals):  # transposed positions
            s[i * n + j] = v
        sm = ResidueMatrix(ctx, tuple(s))
        return NilpotentMatrix(sm * ResidueMatrix(ctx, tuple(x)) * sm.inverse())

    count = len(pos_upper)
    return st.builds(
        build,
        st.tuples(*[ints] * count),
        st.tuples(*[ints] * count),
    )


# -- predicates and wrappers --------------------------------------------


def test_nilpotent_scan_matches_trace_det_oracle():
    got = {m.entries for m in all_2x2(CTX25) if is_nilpotent(m)}
    want = {m.entries for m in all_2x2(CTX25) if nilpotent_2x2_oracle(m)}
    assert got == want
    assert len(got) == 25


def test_unipotency_is_shifted_nilpotency():
    ident = ResidueMatrix.identity(CTX25)
    for m in all_2x2(CTX25):
        assert is_unipotent(m) == is_nilpotent(m - ident)


def test_wrappers_validate():
    ident = ResidueMatrix.identity(CTX25)
    with pytest.raises(NotNilpotent):
        NilpotentMatrix(ident)
    with pytest.raises(NotUnipotent):
        UnipotentMatrix(ResidueMatrix.zero(CTX25))
    x = ResidueMatrix.elementary(CTX25, 0, 1)
    assert NilpotentMatrix(x).ctx == CTX25
    assert UnipotentMatrix(ident + x).ctx == CTX25


# -- pinned values ------------------------------------------------------


def test_exp_of_single_elementary():
    x = ResidueMatrix.elementary(CTX25, 0, 1)
    assert trunc_exp(x).mat.entries == (1, 1, 0, 1)


def test_exp_quadratic_term():
    # x = e12 + e23 has x^2 = e13, so exp(x) = 1 + x + inv(2) e13 and
    # inv(2) = 4 mod 7
    x = ResidueMatrix.elementary(CTX37, 0, 1) + ResidueMatrix.elementary(CTX37, 1, 2)
    assert trunc_exp(x).mat.rows() == ((1, 1, 4), (0, 1, 1), (0, 0, 1))


def test_log_of_single_transvection():
    u = ResidueMatrix.from_rows(CTX25, [[1, 1], [0, 1]])
    assert trunc_log(u).mat.entries == (0, 1, 0, 0)


def test_exp_series_on_identity():
    # no nilpotency check on the bare polynomial: sum of 1/i! times 1
    got = exp_series(ResidueMatrix.identity(CTX37))
    total = sum(CTX37.factorial_invs) % 7
    assert got == total * ResidueMatrix.identity(CTX37)


# -- bijection ----------------------------------------------------------


def test_exp_log_roundtrip_exhaustive_mod_5():
    nils = [m for m in all_2x2(CTX25) if is_nilpotent(m)]
    unis = [m for m in all_2x2(CTX25) if is_unipotent(m)]
    images = set()
    for x in nils:
        u = trunc_exp(x)
        assert trunc_log(u).mat == x
        images.add(u.mat.entries)
    assert images == {m.entries for m in unis}
    for u in unis:
        assert trunc_exp(trunc_log(u)).mat == u


@settings(max_examples=40)
@given(strictly_upper_st(PrecisionContext(2, 5, 3)))
def test_roundtrip_at_higher_precision_2x2(x):
    assert trunc_log(trunc_exp(x)).mat == x.mat


@settings(max_examples=40)
@given(strictly_upper_st(PrecisionContext(3, 7, 2)))
def test_roundtrip_at_higher_precision_3x3(x):
    assert trunc_log(trunc_exp(x)).mat == x.mat
    u = trunc_exp(x)
    assert trunc_exp(trunc_log(u)).mat == u.mat


def test_series_helpers_agree_with_wrapped_forms():
    x = ResidueMatrix.elementary(CTX37, 0, 1)
    assert exp_series(x) == trunc_exp(x).mat
    assert log_series(exp_series(x)) == x


# -- one-parameter map --------------------------------------------------


@settings(max_examples=40)
@given(
    strictly_upper_st(CTX37),
    st.integers(min_value=-10, max_value=10),
    st.integers(min_value=-10, max_value=10),
)
def test_phi_is_a_homomorphism_in_t(x, s, t):
    assert phi(x, 0).mat.is_identity()
    assert phi(x, s).mat * phi(x, t).mat == phi(x, s + t).mat
    assert phi(x, 1).mat == trunc_exp(x).mat


def test_phi_matches_powers_of_exp():
    x = NilpotentMatrix(ResidueMatrix.elementary(CTX25, 0, 1))
    u = trunc_exp(x).mat
    for t in range(5):
        assert phi(x, t).mat == u**t


# -- order p ------------------------------------------------------------


def test_has_order_p_matches_naive_order_over_all_units():
    # every invertible 2x2 mod 5 has order dividing |GL_2(F_5)|; 24 bounds
    # the element orders actually occurring
    for m in all_2x2(CTX25):
        if m.det_mod_p() == 0:
            continue
        order = naive_order(m, 24)
        assert order is not None
        assert has_order_p(m) == (order == 5)


def test_has_order_p_needs_mod_p():
    g = ResidueMatrix.identity(PrecisionContext(2, 5, 2))
    with pytest.raises(PreconditionError):
        has_order_p(g)


def test_identity_does_not_have_order_p():
    assert not has_order_p(ResidueMatrix.identity(CTX25))
