import random
from fractions import Fraction

import pytest

from cutproject.errors import DependenceDetected, SingularBasis
from cutproject.exactnum import golden_ratio_context, rational_context
from cutproject.scheme import (
    GroupOracle,
    Scheme,
    enumerate_lattice,
    make_hecke_scheme,
    make_lattice,
    member_p2,
)

from _support import (
    brute_force_enumerate,
    brute_force_member,
    half_fibonacci_scheme,
    phi_hecke_scheme,
    tau_ctx,
    trivial_z2_scheme,
)


@pytest.fixture(scope="module")
def ctx():
    return tau_ctx()


@pytest.fixture(scope="module")
def halffib(ctx):
    return half_fibonacci_scheme(ctx)


# -- lattices -------------------------------------------------------------------


def test_half_fibonacci_determinant(ctx, halffib):
    tau = ctx.generator("tau")
    # 2x2 cofactor oracle: 1*(-1/tau) - tau*1 = -sqrt(5)
    assert halffib.lattice.det == (1 - tau) - tau
    assert halffib.lattice.det_abs == 2 * tau - 1  # sqrt(5)


def test_identity_determinant():
    s = trivial_z2_scheme()
    assert s.lattice.det_abs == s.ctx.one


def test_singular_basis_rejected(ctx):
    with pytest.raises(SingularBasis):
        make_lattice(ctx, [[ctx.one, ctx.one], [ctx.one, ctx.one]])


def test_nonsingularity_on_random_vectors(ctx, halffib):
    rng = random.Random(3)
    for _ in range(50):
        z = (rng.randint(-10, 10), rng.randint(-10, 10))
        emb = halffib.lattice.embed(z)
        if z == (0, 0):
            assert all(x.is_zero() for x in emb)
        else:
            assert not all(x.is_zero() for x in emb)


def test_p1_injectivity_recorded(ctx):
    # p1 row (1, 2) has rational kernel (2, -1): p1 not injective -> recorded
    rctx = rational_context()
    lattice = make_lattice(rctx, [[rctx.one, rctx.zero], [rctx.rational(2), rctx.one]])
    assert Scheme(lattice, 1, 1).p1_injective is False
    # the Half-Fibonacci scheme is certified injective symbolically
    assert half_fibonacci_scheme(ctx).p1_injective is True
    # the periodic toy scheme legitimately fails and is still usable
    assert trivial_z2_scheme().p1_injective is False


# -- Hecke schemes -----------------------------------------------------------------


def test_hecke_phi_columns(ctx):
    s = phi_hecke_scheme(ctx)
    tau = ctx.generator("tau")
    inv = tau - 1
    # column 0 is (1 + 1/tau^2, 1/tau), column 1 is (1/tau, 1)
    c0, c1 = s.lattice.columns
    assert c0 == (1 + inv * inv, inv)
    assert c1 == (inv, ctx.one)
    assert s.lattice.det_abs == ctx.one
    # both generators re-embed into the lattice: integer solve finds them
    assert member_p2(s, (inv,)).is_member
    assert member_p2(s, (ctx.one,)).is_member


def test_hecke_rejects_rational_alpha(ctx):
    with pytest.raises(DependenceDetected):
        make_hecke_scheme(ctx, [ctx.parse("1/2")], [ctx.parse("1/tau")])


def test_hecke_rejects_dependent_beta(ctx):
    # alpha = 2 - tau, beta = tau gives 1 + beta*alpha = tau = beta:
    # the beta-side independence condition fails symbolically
    tau = ctx.generator("tau")
    with pytest.raises(DependenceDetected):
        make_hecke_scheme(ctx, [2 - tau], [tau])


def test_hecke_p2_is_z_alpha_plus_z(ctx):
    s = phi_hecke_scheme(ctx)
    inv = ctx.parse("1/tau")
    rng = random.Random(9)
    for _ in range(40):
        z0, z1 = rng.randint(-6, 6), rng.randint(-6, 6)
        v = inv * z0 + z1
        res = member_p2(s, (v,))
        assert res.is_member
        # witness re-embeds to v
        lv = s.vector(res.witness)
        assert lv.internal[0] == v
    assert not member_p2(s, (inv / 2,)).is_member


# -- membership ---------------------------------------------------------------------


def test_member_2t_witness(ctx, halffib):
    t = ctx.parse("(1+1/tau)/2")
    res = member_p2(halffib, (2 * t,))
    assert res.is_member
    assert res.witness == (1, -1)
    assert halffib.vector(res.witness).internal[0] == 2 * t


def test_not_member_3t(ctx, halffib):
    t = ctx.parse("(1+1/tau)/2")
    res = member_p2(halffib, (3 * t,))
    assert res.status == "not_member"


def test_member_zero(halffib):
    res = member_p2(halffib, (halffib.ctx.zero,))
    assert res.is_member
    lv = halffib.vector(res.witness)
    assert lv.internal[0].is_zero()


def test_member_agrees_with_brute_force(ctx, halffib):
    rng = random.Random(17)
    for _ in range(40):
        v = ctx.from_coeffs(
            [Fraction(rng.randint(-4, 4), rng.choice([1, 2])), Fraction(rng.randint(-4, 4), rng.choice([1, 2]))]
        )
        res = member_p2(halffib, (v,))
        brute = brute_force_member(halffib, (v,), 10)
        if res.is_member:
            assert halffib.vector(res.witness).internal[0] == v
            if max(abs(c) for c in res.witness) <= 10:
                assert brute is not None
        else:
            assert brute is None


def test_group_oracle_line_member():
    from _support import trivial_z4_scheme

    s = trivial_z4_scheme()
    ctx = s.ctx
    oracle = s.p2_oracle()
    # line x = c translates onto x = c' iff c' - c integer
    res = oracle.line_member((ctx.one, ctx.zero), ctx.rational(3))
    assert res.is_member
    assert oracle.line_member((ctx.one, ctx.zero), ctx.parse("1/2")).status == "not_member"


# -- enumeration -----------------------------------------------------------------------


def test_enumeration_matches_brute_force(ctx, halffib):
    phys = [(ctx.rational(0), ctx.rational(5))]
    internal = [(ctx.rational(-1), ctx.rational(1))]
    got = list(enumerate_lattice(halffib, phys, internal))
    expect = brute_force_enumerate(halffib, phys, internal, 20)
    assert [lv.z for lv in got] == [lv.z for lv in expect]
    assert got, "box should contain lattice points"


def test_enumeration_empty_internal(ctx, halffib):
    phys = [(ctx.rational(0), ctx.rational(5))]
    internal = [(ctx.rational(1), ctx.rational(0))]  # empty box
    assert list(enumerate_lattice(halffib, phys, internal)) == []


def test_enumeration_degenerate_origin(ctx, halffib):
    phys = [(ctx.zero, ctx.zero)]
    internal = [(ctx.zero, ctx.zero)]
    got = list(enumerate_lattice(halffib, phys, internal))
    assert [lv.z for lv in got] == [(0, 0)]


def test_enumeration_symmetric_box_closed_under_negation(ctx, halffib):
    phys = [(ctx.rational(-4), ctx.rational(4))]
    internal = [(ctx.rational(-1), ctx.rational(1))]
    zs = {lv.z for lv in enumerate_lattice(halffib, phys, internal)}
    assert zs == {tuple(-c for c in z) for z in zs}


def test_enumeration_deterministic_lex_order(ctx, halffib):
    phys = [(ctx.rational(0), ctx.rational(10))]
    internal = [(ctx.rational(-1), ctx.rational(1))]
    zs = [lv.z for lv in enumerate_lattice(halffib, phys, internal)]
    assert zs == sorted(zs)


def test_enumeration_random_schemes_vs_brute_force(ctx):
    rng = random.Random(29)
    done = 0
    while done < 6:
        cols = [
            [ctx.from_coeffs([rng.randint(-2, 2), rng.randint(-2, 2)]) for _ in range(2)]
            for _ in range(2)
        ]
        try:
            s = Scheme(make_lattice(ctx, cols), 1, 1)
        except Exception:
            continue
        phys = [(ctx.rational(-3), ctx.rational(3))]
        internal = [(ctx.rational(-2), ctx.rational(2))]
        got = [lv.z for lv in enumerate_lattice(s, phys, internal)]
        expect = [lv.z for lv in brute_force_enumerate(s, phys, internal, 25)]
        if any(max(abs(c) for c in z) > 20 for z in got):
            continue  # oracle radius too small for this basis; skip
        assert got == expect
        done += 1
