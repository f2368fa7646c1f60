import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conred import randgen as rg
from conred.algd import (
    AlgebroidData,
    Alternating,
    BialgebroidData,
    alt,
    check_bialgebroid,
    check_classical,
    check_comorphism,
    check_constraint,
    check_morphism,
    gerstenhaber,
    koszul,
    lie_algebra_algebroid,
    reduce_algebroid,
    tangent_algebroid,
    tangent_morphism,
)
from conred.calg import ConLieAlgebraFD, ConVectorSpace, reduce as calg_reduce
from conred.cartan import KForm, MultiVector, de_rham, reduce_field, schouten, vector_field
from conred.cgeo import BundleMorphism, ConSpace, TrivBundle, cotangent_bundle, tangent_bundle, trivial_bundle
from conred.cindex import SlotClass
from conred.dirac import cotangent_algebroid, poisson
from conred.errors import ChecksFail, ClassicalAxiomsFail, ConstituentFails, NotBundleMorphism, ShapeMismatch
from conred.poly import Poly, parse_poly

N, W, T = SlotClass.NULL, SlotClass.WOBS_ONLY, SlotClass.TOTAL_ONLY
seeds = st.integers(0, 2**32 - 1)
POINT = ConSpace(0, 0, 0)


def so3(extra=None, classes=(W, W, W)):
    table = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}
    table.update(extra or {})
    return lie_algebra_algebroid(TrivBundle(POINT, classes), table)


# --- evaluation oracle for forms of degree <= 1 on arbitrary sections ----------------


def eval_form(alpha, sections):
    """alpha(a_0, ..., a_k) by full antisymmetrization over the frame."""
    n = alpha.nvars
    out = Poly.zero(n)
    k = len(sections)
    for I in itertools.product(range(alpha.rank), repeat=k):
        c = alpha.coefficient(I)
        if c:
            term = c
            for a, i in zip(sections, I):
                term = term * a[i]
            out = out + term
    return out


def koszul_oracle(A, alpha, a, b=None):
    if alpha.degree == 0:
        return A.act(a, alpha.coefficient(()))
    return (A.act(a, eval_form(alpha, [b])) - A.act(b, eval_form(alpha, [a]))
            - eval_form(alpha, [A.bracket(a, b)]))


def rand_algebroid_section(rng, A):
    return tuple(rg.rand_poly(rng, A.nvars, 2, 2) for _ in range(A.rank))


# --- examples -------------------------------------------------------------------------


def test_tangent_and_so3_pass():
    assert check_classical(tangent_algebroid(ConSpace(3, 2, 1)))
    assert check_constraint(tangent_algebroid(ConSpace(3, 2, 1)))
    assert check_classical(so3())


def test_sign_flip_of_so3_is_still_a_lie_algebra():
    # every sign pattern of the cross-product table satisfies Jacobi (e_i -> ±e_i rescaling)
    assert check_classical(so3({(0, 1, 2): -1}))


def test_broken_so3_reports_the_triple():
    rep = check_classical(so3({(0, 1, 0): 1}))
    assert not rep and any("(e1, e2, e3)" in f for f in rep.failures)
    with pytest.raises(ClassicalAxiomsFail):
        check_constraint(so3({(0, 1, 0): 1}))


def test_anchor_column_outside_W_fails_the_constraint_check():
    s = ConSpace(3, 2, 1)
    n = s.dT
    anchor = [[Poly.zero(n)], [s.var(0)], [Poly.zero(n)]]  # rho(e1) = x1 d/dx2
    A = AlgebroidData(TrivBundle(s, (W,)), anchor, {})
    assert check_classical(A)
    rep = check_constraint(A)
    assert not rep and "anchor of W-slot e1" in rep.failures[0]
    with pytest.raises(ChecksFail):
        reduce_algebroid(A)


def test_replaced_anchor_column_breaks_classical_axioms():
    s = ConSpace(3, 2, 1)
    TA = tangent_algebroid(s)
    anchor = [list(r) for r in TA.anchor]
    anchor[0][1], anchor[1][1] = s.var(2), s.zero()  # rho(e2) = x3 d/dx1
    assert not check_classical(AlgebroidData(TA.bundle, anchor, {}))


def test_structure_validation():
    with pytest.raises(ShapeMismatch):
        AlgebroidData(TrivBundle(POINT, (W, W)), [], [[[Poly.one(0), Poly.zero(0)], [Poly.zero(0)] * 2],
                                                     [[Poly.zero(0)] * 2, [Poly.zero(0)] * 2]])


def test_koszul_examples():
    s = ConSpace(2, 2, 0)
    TA = tangent_algebroid(s)
    a = alt(TA, 1, {(0,): s.var(1)})
    assert koszul(TA, a).comps == de_rham(KForm(s, 1, {(0,): s.var(1)})).comps
    for k in range(4):
        for I in itertools.combinations(range(3), k):
            e = Alternating(0, 3, k, {I: Poly.one(0)})
            assert koszul(so3(), koszul(so3(), e)).is_zero()
    broken = so3({(0, 1, 0): 1})
    e2 = Alternating(0, 3, 1, {(1,): Poly.one(0)})
    assert not koszul(broken, koszul(broken, e2)).is_zero()


def test_koszul_is_chevalley_eilenberg_on_a_point():
    # d e^m (e_i, e_j) = -c^m_ij
    A = so3()
    for m in range(3):
        d = koszul(A, Alternating(0, 3, 1, {(m,): Poly.one(0)}))
        for i, j in itertools.combinations(range(3), 2):
            assert d.coefficient((i, j)) == -A.struct[i][j][m]


def test_gerstenhaber_generators():
    s = ConSpace(2, 2, 0)
    n = s.dT
    A = AlgebroidData(tangent_bundle(s), [[s.var(1), Poly.zero(n)], [Poly.zero(n), Poly.one(n)]], {})
    f = parse_poly("x1^2*x2", 2)
    e = lambda i: alt(A, 1, {(i,): Poly.one(n)})
    fn = alt(A, 0, {(): f})
    for i in range(2):
        assert gerstenhaber(A, e(i), fn).coefficient(()) == A.rho(i, f)
        assert gerstenhaber(A, fn, e(i)).coefficient(()) == -A.rho(i, f)
    B = so3()
    e3 = lambda i: Alternating(0, 3, 1, {(i,): Poly.one(0)})
    assert gerstenhaber(B, e3(0), e3(1)) == e3(2)


def test_gerstenhaber_agrees_with_schouten_on_tangent():
    rng = random.Random(5)
    s = ConSpace(3, 3, 0)
    TA = tangent_algebroid(s)
    for p, q in [(1, 1), (1, 2), (2, 2), (0, 2)]:
        P_ = rg.rand_multivector(rng, s, p)
        Q_ = rg.rand_multivector(rng, s, q)
        g = gerstenhaber(TA, Alternating(3, 3, p, P_.comps), Alternating(3, 3, q, Q_.comps))
        assert g.comps == schouten(P_, Q_).comps


def test_morphism_examples():
    s = ConSpace(2, 1, 1)
    TA = tangent_algebroid(s)
    ident = BundleMorphism.identity(TA.bundle)
    assert check_morphism(ident, TA, TA)
    src, tgt = ConSpace(3, 2, 1), ConSpace(2, 2, 1)
    phi = tangent_morphism(src, tgt, (parse_poly("x1 + x2^2", 3), parse_poly("x2", 3)))
    assert check_morphism(phi, tangent_algebroid(src), tangent_algebroid(tgt))
    plain = ConSpace(2, 2, 0)
    TP = tangent_algebroid(plain)
    one, zero = plain.const(1), plain.zero()
    swap = BundleMorphism(TP.bundle, TP.bundle, (plain.var(0), plain.var(1)), ((zero, one), (one, zero)))
    rep = check_morphism(swap, TP, TP)
    assert not rep and "anchor square" in rep.failures[0]


def test_identity_comorphism():
    s = ConSpace(2, 2, 1)
    TA = tangent_algebroid(s)
    assert check_comorphism(BundleMorphism.identity(TA.bundle), TA, TA)


def test_morphism_needs_bundle_checks():
    s = ConSpace(2, 1, 1)
    TA = tangent_algebroid(s)
    bad = BundleMorphism(TA.bundle, TA.bundle, (s.var(0), s.var(1) + s.var(0)),
                         ((s.const(1), s.zero()), (s.zero(), s.const(1))))
    with pytest.raises(NotBundleMorphism):
        check_morphism(bad, TA, TA)


def _zero_dual(space):
    n = space.dT
    return AlgebroidData(cotangent_bundle(space), [[Poly.zero(n)] * n for _ in range(n)], {})


def test_bialgebroid_examples():
    s = ConSpace(3, 2, 1)
    assert check_bialgebroid(BialgebroidData(tangent_algebroid(s), _zero_dual(s)))
    canon = MultiVector(ConSpace(4, 3, 1), 2, {(1, 2): Poly.one(4), (0, 3): Poly.one(4)})
    Astar = cotangent_algebroid(poisson(canon))
    TA = tangent_algebroid(canon.space)
    # T*M_pi as the algebroid, TM on its dual
    assert check_bialgebroid(BialgebroidData(Astar, TA))
    plain = ConSpace(2, 2, 0)
    n = plain.dT
    twisted = AlgebroidData(cotangent_bundle(plain), [[Poly.zero(n)] * n for _ in range(n)],
                            {(0, 1, 0): Poly.one(n)})
    rep = check_bialgebroid(BialgebroidData(tangent_algebroid(plain), twisted))
    assert not rep


def test_bialgebroid_with_non_poisson_constituent():
    s = ConSpace(3, 3, 0)
    n = s.dT
    pi = MultiVector(s, 2, {(0, 1): Poly.one(n), (1, 2): s.var(1)})
    P = poisson(pi)
    struct = [[[P.entry(i, j).partial(m) for m in range(n)] for j in range(n)] for i in range(n)]
    fake = AlgebroidData(cotangent_bundle(s), P.sharp_matrix(), struct)
    with pytest.raises(ConstituentFails):
        check_bialgebroid(BialgebroidData(fake, tangent_algebroid(s)))


def test_reduce_examples():
    s = ConSpace(4, 3, 1)
    assert reduce_algebroid(tangent_algebroid(s)) == tangent_algebroid(ConSpace(2, 2, 0))
    # point-base Lie algebra with g_N = span(e3) ideal: [e1,e2] = e3, others zero (Heisenberg)
    heis = lie_algebra_algebroid(TrivBundle(POINT, (W, W, N)), {(0, 1, 2): 1})
    red = reduce_algebroid(heis)
    assert red.rank == 2 and all(not c for r in red.struct for col in r for c in col)
    flag = ConVectorSpace.make(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 0, 1)])
    table = [[(0, 0, 0)] * 3 for _ in range(3)]
    table[0][1], table[1][0] = (0, 0, 1), (0, 0, -1)
    assert calg_reduce(ConLieAlgebraFD(flag, table)).dim == red.rank


# --- properties -----------------------------------------------------------------------


@given(seeds)
def test_koszul_matches_invariant_formula(seed):
    rng = random.Random(seed)
    canon = MultiVector(ConSpace(3, 3, 0), 2, {(0, 1): Poly.var(3, 2)})
    A = rng.choice([tangent_algebroid(rg.rand_space(rng, 3)), cotangent_algebroid(poisson(canon))])
    k = rng.randint(0, 1)
    alpha = Alternating(A.nvars, A.rank, k,
                        {I: rg.rand_poly(rng, A.nvars, 2) for I in itertools.combinations(range(A.rank), k)})
    a, b = rand_algebroid_section(rng, A), rand_algebroid_section(rng, A)
    D = koszul(A, alpha)
    args = [a] if k == 0 else [a, b]
    assert eval_form(D, args) == koszul_oracle(A, alpha, a, b)
    assert koszul(A, D).is_zero()


@given(seeds)
def test_classical_check_iff_koszul_squares_to_zero(seed):
    rng = random.Random(seed)
    table = {(i, j, m): rng.randint(-1, 1) for i, j in itertools.combinations(range(3), 2) for m in range(3)}
    A = lie_algebra_algebroid(TrivBundle(POINT, (W, W, W)), table)
    d2_zero = all(koszul(A, koszul(A, Alternating(0, 3, 1, {(m,): Poly.one(0)}))).is_zero() for m in range(3))
    assert bool(check_classical(A)) == d2_zero


@given(seeds)
def test_gerstenhaber_graded_leibniz(seed):
    rng = random.Random(seed)
    A = so3() if rng.random() < 0.3 else tangent_algebroid(rg.rand_space(rng, 3, 2))
    n, k = A.nvars, A.rank
    r = lambda d: Alternating(n, k, d, {I: rg.rand_poly(rng, n, 2, 2)
                                         for I in itertools.combinations(range(k), d) if rng.random() < 0.6})
    P_, Q_, S_ = r(1), r(1), r(min(2, k))
    # P has degree 1, so the sign (-1)^((p-1)q) is +1
    lhs = gerstenhaber(A, P_, Q_.wedge(S_))
    rhs = gerstenhaber(A, P_, Q_).wedge(S_) + Q_.wedge(gerstenhaber(A, P_, S_))
    assert lhs == rhs


@given(seeds)
def test_reduce_algebroid_commutes_with_brackets(seed):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 4)
    TA = tangent_algebroid(s)
    rTA = reduce_algebroid(TA)
    X, Y = rg.rand_field(rng, s), rg.rand_field(rng, s)
    lhs = reduce_field(vector_field(s, TA.bracket(X.components, Y.components))).components
    assert lhs == rTA.bracket(reduce_field(X).components, reduce_field(Y).components)
