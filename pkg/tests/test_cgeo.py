import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conred.cgeo import (
    BundleMorphism,
    ClassedSection,
    ConSpace,
    TrivBundle,
    bundle_construct,
    check_bundle_morphism,
    cotangent_bundle,
    fn_class,
    fn_lift,
    fn_reduce,
    reduce_bundle,
    reduce_section,
    reduction_commutes,
    section_class,
    section_module_op,
    standard_dual_basis,
    tangent_bundle,
    trivial_bundle,
    verify_section_dual_basis,
)
from conred.cindex import ConIndexSet, SlotClass
from conred.errors import NotInWobs
from conred.poly import Poly, parse_poly
from conred import randgen as rg

N, W, T = SlotClass.NULL, SlotClass.WOBS_ONLY, SlotClass.TOTAL_ONLY
seeds = st.integers(0, 2**32 - 1)


def P(text, n):
    return parse_poly(text, n)


def grid_oracle(space, f):
    """(in_N, in_W) by evaluating on a grid fine enough for per-variable degree <= 3."""
    grid = range(4)
    in_N = in_W = True
    for pt in itertools.product(grid, repeat=space.dT):
        on_C = [v if i < space.dW else 0 for i, v in enumerate(pt)]
        value = f.eval(on_C)
        if value:
            in_N = False
        slid = [0 if i < space.dN else v for i, v in enumerate(on_C)]
        if value != f.eval(slid):
            in_W = False
    return in_N, in_W


def test_fn_class_examples():
    s = ConSpace(3, 2, 1)
    assert fn_class(s, s.var(2)).in_N
    c = fn_class(s, s.var(1))
    assert c.in_W and not c.in_N
    assert not fn_class(s, s.var(0)).in_W


def test_fn_reduce_examples():
    s = ConSpace(3, 2, 1)
    assert fn_reduce(s, P("x2^2 + x3*x1", 3)) == P("x1^2", 1)
    assert fn_reduce(s, s.const(1)) == Poly.one(1)
    assert fn_reduce(s, s.var(2)) == Poly.zero(1)
    with pytest.raises(NotInWobs):
        fn_reduce(s, s.var(0))


def test_section_class_examples():
    s = ConSpace(2, 1, 1)
    TM = tangent_bundle(s)
    assert section_class(ClassedSection.basis(TM, 0)).in_N
    assert not section_class(ClassedSection(TM, (s.zero(), s.var(0)))).in_W
    assert section_class(ClassedSection.zero(TM)).in_N


def test_bundle_examples():
    s = ConSpace(3, 2, 1)
    assert cotangent_bundle(s).slot_classes == (T, W, N)
    E = trivial_bundle(s, 2, 1, 0)
    F = trivial_bundle(s, 2, 2, 1)
    assert bundle_construct("tensor", E, F).rank_triple() == (4, 2, 1)
    assert bundle_construct("dsum", E, F).rank_triple() == (4, 3, 1)
    assert reduce_bundle(trivial_bundle(s, 5, 3, 1)).rank == 2
    assert reduce_bundle(tangent_bundle(s)) == tangent_bundle(ConSpace(1, 1, 0))


def test_dual_pair_and_hom_apply():
    s = ConSpace(3, 2, 1)
    dx2 = ClassedSection.basis(cotangent_bundle(s), 1)
    d2 = ClassedSection.basis(tangent_bundle(s), 1)
    assert section_module_op("dual_pair", dx2, d2) == s.const(1)
    E = trivial_bundle(s, 3, 2, 1)
    sec = rg.rand_section(random.Random(1), E)
    assert section_module_op("hom_apply", BundleMorphism.identity(E), sec).components == sec.components


def test_morphism_examples():
    s = ConSpace(2, 1, 1)
    E = trivial_bundle(s, 2, 2, 1)
    ident = BundleMorphism.identity(E)
    assert check_bundle_morphism(ident).ok
    twisted = BundleMorphism(E, E, (s.var(0), s.var(1)), ((s.const(1), s.zero()), (s.zero(), s.var(0))))
    chk = check_bundle_morphism(twisted)
    assert chk.base_ok and chk.fiber_ok and not chk.connection_ok
    assert not reduction_commutes(twisted, [ClassedSection.basis(E, 1)])

    src, tgt = ConSpace(3, 2, 1), ConSpace(2, 2, 1)
    A, B = trivial_bundle(src, 2, 2, 1), trivial_bundle(tgt, 2, 2, 1)
    proj = BundleMorphism(A, B, (src.var(0), src.var(1)),
                          ((src.const(1), src.zero()), (src.zero(), src.const(1))))
    assert check_bundle_morphism(proj).ok


def test_reduce_zero_section():
    s = ConSpace(3, 2, 1)
    E = trivial_bundle(s, 3, 2, 1)
    assert reduce_section(ClassedSection.zero(E)).is_zero()


def test_standard_dual_basis():
    s = ConSpace(2, 1, 0)
    E = trivial_bundle(s, 2, 1, 0)
    db = standard_dual_basis(E)
    assert db.index == ConIndexSet([0, 1], [0], [])
    assert verify_section_dual_basis(E, db)
    one = trivial_bundle(s, 1, 1, 1)
    assert standard_dual_basis(one).index == ConIndexSet([0], [0], [0])
    # coframe entries on TOTAL_ONLY slots are null in the dual
    dual = bundle_construct("dual", E)
    assert section_class(ClassedSection.basis(dual, 1)).in_N


@given(seeds)
def test_fn_class_matches_grid_oracle(seed):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 3)
    f = rg.rand_poly(rng, s.dT, 3, 4)
    c = fn_class(s, f)
    assert (c.in_N, c.in_W) == grid_oracle(s, f)
    assert not c.in_N or c.in_W


@given(seeds)
def test_generated_coefficients_have_their_class(seed):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 4)
    assert fn_class(s, rg.rand_in_N(rng, s)).in_N
    assert fn_class(s, rg.rand_in_W(rng, s)).in_W


@given(seeds)
def test_fn_reduce_is_a_ring_map_with_section(seed):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 4)
    f, g = rg.rand_in_W(rng, s), rg.rand_in_W(rng, s)
    assert fn_reduce(s, f * g) == fn_reduce(s, f) * fn_reduce(s, g)
    assert fn_reduce(s, f + g) == fn_reduce(s, f) + fn_reduce(s, g)
    h = rg.rand_poly(rng, s.d_red, 2)
    assert fn_reduce(s, fn_lift(s, h)) == h


@given(seeds, st.sampled_from(["dsum", "tensor", "strong_tensor"]))
def test_section_ops_preserve_W_and_reduce(seed, kind):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 3)
    E = TrivBundle(s, rg.rand_classes(rng, rng.randint(1, 3)))
    F = TrivBundle(s, rg.rand_classes(rng, rng.randint(1, 3)))
    a, b = rg.rand_section(rng, E), rg.rand_section(rng, F)
    out = section_module_op(kind, a, b)
    assert section_class(out).in_W
    assert reduce_section(out).components == section_module_op(kind, reduce_section(a), reduce_section(b)).components


@given(seeds)
def test_null_sections_reduce_to_zero(seed):
    rng = random.Random(seed)
    s = rg.rand_space(rng, 3)
    E = TrivBundle(s, rg.rand_classes(rng, 3))
    z = rg.rand_null_section(rng, E)
    assert section_class(z).in_N
    assert reduce_section(z).is_zero()


@given(seeds, st.booleans())
def test_connection_condition_matches_commuting_reduction(seed, flat):
    rng = random.Random(seed)
    s = ConSpace(rng.randint(2, 3), 2, 1) if rng.random() < 0.5 else ConSpace(3, 3, 1)
    classes = list(rg.rand_classes(rng, 2)) + [W]
    E = TrivBundle(s, tuple(classes))
    phi = rg.rand_constraint_morphism(rng, E, flat)
    chk = check_bundle_morphism(phi)
    assert chk.base_ok and chk.fiber_ok and chk.connection_ok == flat
    secs = [ClassedSection.basis(E, i) for i in range(E.rank) if classes[i] is W]
    assert reduction_commutes(phi, secs) == flat
