import itertools

import pytest

from hql.field import FieldContext, context_for_q


@pytest.mark.parametrize("q", [2, 4])
def test_small_field_axioms_exhaustive(q):
    ctx = context_for_q(q)
    mul, inv = ctx.mul, ctx.inv
    elems = range(q)
    for a, b, c in itertools.product(elems, repeat=3):
        assert mul[a][mul[b][c]] == mul[mul[a][b]][c]
        assert mul[a][b ^ c] == mul[a][b] ^ mul[a][c]
    for a in range(1, q):
        assert mul[a][inv[a]] == 1
    for a in elems:
        assert a ^ a == 0
        assert mul[a][1] == a


@pytest.mark.parametrize("q", [2, 4])
def test_big_field_axioms_exhaustive(q):
    ctx = context_for_q(q)
    m2 = ctx.m2
    elems = range(ctx.q2)
    for a, b, c in itertools.product(elems, repeat=3):
        assert m2(a, m2(b, c)) == m2(m2(a, b), c)
        assert m2(a, b ^ c) == m2(a, b) ^ m2(a, c)
    for a in range(1, ctx.q2):
        assert m2(a, ctx.i2(a)) == 1


@pytest.mark.parametrize("q", [2, 4])
def test_frobenius_order_two_and_fixed_field(q):
    ctx = context_for_q(q)
    fixed = [x for x in range(ctx.q2) if ctx.frob2[x] == x]
    assert fixed == list(range(q))
    for x in range(ctx.q2):
        assert ctx.frob2[ctx.frob2[x]] == x
        assert ctx.pow2(x, q * q) == x


def test_frobenius_matches_repeated_squaring_q4(ctx4):
    # x^q by h squarings must equal the component formula (x0+x1) + eps*x1
    for x in range(ctx4.q2):
        y = x
        for _ in range(ctx4.h):
            y = ctx4.m2(y, y)
        assert y == ctx4.frob2[x]
        x0, x1 = ctx4.split(x)
        assert ctx4.frob2[x] == ctx4.join(x0 ^ x1, x1)


@pytest.mark.parametrize("q", [2, 4, 8])
def test_epsilon_identities(q):
    ctx = context_for_q(q)
    eps = ctx.eps
    assert ctx.m2(eps, eps) ^ eps ^ ctx.nu == 0
    assert ctx.frob2[eps] ^ eps ^ 1 == 0
    assert ctx.trace[ctx.nu] == 1
    if q > 2:
        assert ctx.nu != 1


@pytest.mark.parametrize("q", [2, 4, 8])
def test_absolute_trace_properties(q):
    ctx = context_for_q(q)
    assert ctx.trace[0] == 0
    assert all(t in (0, 1) for t in ctx.trace)
    # GF(2)-linear and balanced: exactly q/2 elements of trace one
    for a, b in itertools.product(range(q), repeat=2):
        assert ctx.trace[a ^ b] == ctx.trace[a] ^ ctx.trace[b]
    assert sum(ctx.trace) == q // 2


def test_trace_examples(ctx2, ctx4):
    assert ctx2.trace[1] == 1
    omega = 2  # generator of GF(4) over GF(2)
    assert ctx4.trace[omega] == 1
    assert ctx4.mul[omega][omega] == omega ^ 1  # w^2 = w + 1


@pytest.mark.parametrize("q", [2, 4, 8])
def test_norm_properties(q):
    ctx = context_for_q(q)
    assert ctx.norm2[0] == 0 and ctx.norm2[1] == 1
    assert ctx.norm2[ctx.eps] == ctx.nu  # eps^(q+1) = eps(eps+1) = nu
    for x in range(ctx.q2):
        assert ctx.norm2[x] == ctx.pow2(x, q + 1)
        assert (ctx.norm2[x] == 0) == (x == 0)
    for x, y in itertools.product(range(ctx.q2), repeat=2):
        assert ctx.norm2[ctx.m2(x, y)] == ctx.mul[ctx.norm2[x]][ctx.norm2[y]]
    # fibers over GF(q)* all have size q+1
    fibers = {}
    for x in range(1, ctx.q2):
        fibers.setdefault(ctx.norm2[x], []).append(x)
    assert set(fibers) == set(range(1, q))
    assert all(len(v) == q + 1 for v in fibers.values())
    assert len(ctx.norm_one) == q + 1


@pytest.mark.parametrize("q", [2, 4, 8])
def test_relative_trace(q):
    ctx = context_for_q(q)
    for x in range(q):
        assert ctx.rel_trace(x) == 0
    assert ctx.rel_trace(ctx.eps) == 1
    for x in range(ctx.q2):
        # x + x^q equals the eps-coordinate
        assert (x ^ ctx.frob2[x]) == ctx.rel_trace(x)
        assert ctx.trace2[x] == ctx.trace[ctx.rel_trace(x)]


def test_split_is_linear(ctx2):
    assert ctx2.split(0) == (0, 0)
    assert ctx2.split(ctx2.eps) == (0, 1)
    for x, y in itertools.product(range(4), repeat=2):
        x0, x1 = ctx2.split(x)
        y0, y1 = ctx2.split(y)
        assert ctx2.split(x ^ y) == (x0 ^ y0, x1 ^ y1)
        assert ctx2.join(x0, x1) == x


def test_norm_one_at_q2(ctx2):
    # the kernel of the norm onto GF(2)* is the full multiplicative group
    assert ctx2.norm_one == (1, 2, 3)


def test_serialization_roundtrip(ctx4):
    for x in range(ctx4.q2):
        assert ctx4.parse_q2(ctx4.format_q2(x)) == x
        assert ctx4.parse_q2(str(x)) == x
    assert ctx4.format_q2(ctx4.join(1, 3)) == "1+e*3"
    assert len(ctx4.format_q(2)) == ctx4.h
    with pytest.raises(ValueError):
        ctx4.parse_q2("99")
    with pytest.raises(ValueError):
        ctx4.parse_q2("4+e*0")


def test_unsupported_degree_rejected():
    with pytest.raises(ValueError):
        context_for_q(3)
    with pytest.raises(ValueError):
        context_for_q(128)
    with pytest.raises(ValueError):
        FieldContext(9)


def test_modulus_strings():
    assert context_for_q(2).modulus_str() == "x+1"
    assert context_for_q(4).modulus_str() == "x^2+x+1"
    assert context_for_q(8).modulus_str() == "x^3+x+1"


def test_large_degree_formula_fallback():
    # h=5 builds without full GF(q^2) tables; formulas must still agree
    ctx = FieldContext(5)
    assert ctx.mul2 is None
    for x, y in [(3, 7), (31, 700), (1000, 1023), (512, 513)]:
        prod = ctx.m2(x, y)
        assert ctx.m2(prod, ctx.i2(prod)) == 1 if prod else True
    assert ctx.m2(ctx.eps, ctx.eps) ^ ctx.eps ^ ctx.nu == 0
