import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conred import randgen as rg
from conred.algd import check_classical, check_constraint, reduce_algebroid
from conred.cartan import EndField, KForm, MultiVector, de_rham, form_class, mv_class, schouten
from conred.cgeo import ConSpace
from conred.dirac import (
    DiracGraph,
    PNData,
    check_pn,
    check_poisson,
    check_presymplectic,
    cotangent_algebroid,
    cotangent_bracket,
    dirac_check,
    dirac_reduce,
    poisson,
    presymplectic,
    reduce_pn,
    reduce_poisson,
    reduce_presymplectic,
)
from conred.errors import CheckFails
from conred.poly import Poly, parse_poly

seeds = st.integers(0, 2**32 - 1)
S431 = ConSpace(4, 3, 1)
R2 = ConSpace(2, 2, 0)


def bivector(space, comps):
    return MultiVector(space, 2, {I: parse_poly(t, space.dT) for I, t in comps.items()})


def twoform(space, comps):
    return KForm(space, 2, {I: parse_poly(t, space.dT) for I, t in comps.items()})


CANON = bivector(S431, {(1, 2): "1", (0, 3): "1"})


def test_poisson_examples():
    assert check_poisson(poisson(CANON))
    assert check_poisson(poisson(MultiVector.zero(S431, 2)))
    rep = check_poisson(poisson(bivector(S431, {(1, 2): "x1"})))
    assert not rep and rep.failures == ("pi is not in the W-component",)


def test_poisson_reduction_examples():
    assert reduce_poisson(poisson(CANON)).pi == bivector(R2, {(0, 1): "1"})
    assert reduce_poisson(poisson(MultiVector.zero(S431, 2))).pi.is_zero()
    omega = twoform(S431, {(1, 2): "1"})
    assert check_presymplectic(presymplectic(omega))
    assert reduce_presymplectic(presymplectic(omega)).omega == twoform(R2, {(0, 1): "1"})
    with pytest.raises(CheckFails):
        reduce_poisson(poisson(bivector(S431, {(1, 2): "x1"})))


def test_cotangent_algebroid_examples():
    A = cotangent_algebroid(poisson(CANON))
    assert all(not c for r in A.struct for col in r for c in col)
    assert check_constraint(A)
    zero = cotangent_algebroid(poisson(MultiVector.zero(S431, 2)))
    assert all(not x for r in zero.anchor for x in r)
    # Lie-Poisson on so(3)*: pi^{ij} = eps_ijk x_k
    s = ConSpace(3, 3, 0)
    lp = bivector(s, {(0, 1): "x3", (1, 2): "x1", (0, 2): "-x2"})
    B = cotangent_algebroid(poisson(lp))
    assert check_classical(B)
    assert B.struct[0][1][2] == Poly.one(3) and B.struct[1][2][0] == Poly.one(3)
    assert B.struct[0][2][1] == -Poly.one(3)


def test_reduced_cotangent_algebroid():
    for pi in (CANON, bivector(S431, {(1, 2): "x2"})):
        P = poisson(pi)
        assert reduce_algebroid(cotangent_algebroid(P)) == cotangent_algebroid(reduce_poisson(P))


def test_dirac_examples():
    assert dirac_check(DiracGraph.of(CANON)).ok
    assert dirac_check(DiracGraph.of(twoform(ConSpace(2, 2, 0), {(0, 1): "1"}))).ok
    # not Poisson: [pi, pi] = 2 d1^d2^d3 for this bivector
    bad = bivector(ConSpace(3, 3, 0), {(0, 1): "1", (1, 2): "x2"})
    assert not schouten(bad, bad).is_zero()
    rep = dirac_check(DiracGraph.of(bad))
    assert not rep.involutive and not rep.oracle_involutive and rep.lagrangian


def test_curl_free_example_is_poisson():
    # x3 d1^d2 + d2^d3 on R^3: the associated vector field (1, 0, x3) has v . curl v = 0
    pi = bivector(ConSpace(3, 3, 0), {(0, 1): "x3", (1, 2): "1"})
    assert schouten(pi, pi).is_zero()
    assert dirac_check(DiracGraph.of(pi)).ok


def test_dirac_reduce_examples():
    red = dirac_reduce(DiracGraph.of(CANON))
    assert red.kind == "bivector" and red.data.pi == bivector(R2, {(0, 1): "1"})
    assert dirac_reduce(DiracGraph.of(MultiVector.zero(S431, 2))).data.pi.is_zero()
    omega = twoform(S431, {(1, 2): "x2 + x3", (0, 3): "x4"})
    assert check_presymplectic(presymplectic(omega))
    r = dirac_reduce(DiracGraph.of(omega))
    assert de_rham(r.data.omega).is_zero()


def test_pn_examples():
    P = poisson(CANON)
    ident = EndField.identity(S431)
    assert check_pn(PNData(P, ident)).ok
    c = lambda v: Poly.const(4, v)
    triple = EndField(S431, [[c(3 if i == j else 0) for j in range(4)] for i in range(4)])
    assert check_pn(PNData(P, triple)).ok
    E22 = EndField(S431, [[c(int(i == j == 1)) for j in range(4)] for i in range(4)])
    rep = check_pn(PNData(P, E22))
    assert not rep.compatible and "pi A^T != A pi" in rep.witnesses
    red = reduce_pn(PNData(P, triple))
    assert red.A.matrix == ((Poly.const(2, 3), Poly.zero(2)), (Poly.zero(2), Poly.const(2, 3)))


# --- properties -----------------------------------------------------------------------


def _rand_bivector(rng):
    s = rg.rand_space(rng, 3, 2)
    comps = {}
    for I in itertools.combinations(range(s.dT), 2):
        r = rng.random()
        if r < 0.45:
            comps[I] = rg.rand_poly(rng, s.dT, 2, 2)
        elif r < 0.7:
            comps[I] = Poly.const(s.dT, rng.randint(-2, 2))
    return s, comps


@given(seeds)
def test_graph_of_bivector_agrees_with_oracle(seed):
    rng = random.Random(seed)
    s, comps = _rand_bivector(rng)
    pi = MultiVector(s, 2, comps)
    rep = dirac_check(DiracGraph.of(pi))
    assert rep.lagrangian
    assert rep.involutive == schouten(pi, pi).is_zero() == rep.oracle_involutive
    assert rep.ok == (schouten(pi, pi).is_zero() and mv_class(pi).in_W)


@given(seeds)
def test_graph_of_twoform_agrees_with_oracle(seed):
    rng = random.Random(seed)
    s, comps = _rand_bivector(rng)
    w = KForm(s, 2, comps)
    rep = dirac_check(DiracGraph.of(w))
    assert rep.lagrangian
    assert rep.involutive == de_rham(w).is_zero()
    assert rep.ok == (de_rham(w).is_zero() and form_class(w).in_W)


POISSON_SAMPLES = [
    CANON,
    bivector(S431, {(1, 2): "x2^2 + x3", (0, 3): "1"}),
    bivector(S431, {(1, 2): "x2"}),
    bivector(ConSpace(3, 3, 0), {(0, 1): "x3", (1, 2): "x1", (0, 2): "-x2"}),
]


@given(seeds, st.sampled_from(POISSON_SAMPLES))
def test_cotangent_bracket_matches_structure_functions(seed, pi):
    rng = random.Random(seed)
    P = poisson(pi)
    A = cotangent_algebroid(P)
    s = pi.space
    n = s.dT
    alpha = KForm(s, 1, {(i,): rg.rand_poly(rng, n, 1, 2) for i in range(n)})
    beta = KForm(s, 1, {(i,): rg.rand_poly(rng, n, 1, 2) for i in range(n)})
    a = tuple(alpha.coefficient((i,)) for i in range(n))
    b = tuple(beta.coefficient((i,)) for i in range(n))
    got = cotangent_bracket(P, alpha, beta)
    assert tuple(got.coefficient((i,)) for i in range(n)) == A.bracket(a, b)
