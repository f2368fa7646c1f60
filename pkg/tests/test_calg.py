import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conred import calg
from conred.calg import (
    ConAlgebraFD,
    ConLinearMap,
    ConVectorSpace,
    canonical_iso,
    classify_morphism,
    construct,
    derivation_lie_algebra,
    derivations,
    gaussian_rationals,
    identity_map,
    is_iso_direct,
    kernel_image,
    reduce,
    reduced_hom_comparison,
    regular_module,
    tensor_over_algebra,
    verify_dual_basis,
)
from conred.cindex import ConIndexSet
from conred.errors import NotConstraintMap
from conred.exact import Mat, Subspace, rank
from conred.randgen import rand_flag

seeds = st.integers(0, 2**32 - 1)


def flag(n, W=(), N=()):
    return ConVectorSpace.make(n, W, N)


def dims(E):
    return E.dims().as_tuple()


def test_identity_is_everything():
    E = flag(3, [(1, 0, 0), (0, 1, 1)], [(1, 0, 0)])
    c = classify_morphism(identity_map(E))
    assert c.mono and c.epi and c.regular_mono and c.regular_epi and c.iso


def test_identity_into_bigger_null_part():
    phi = ConLinearMap(flag(1, [(1,)]), flag(1, [(1,)], [(1,)]), Mat.identity(1))
    c = classify_morphism(phi)
    assert (c.mono, c.epi, c.regular_mono, c.regular_epi, c.iso) == (True, True, False, False, False)


def test_zero_map():
    E = ConVectorSpace.plain(1)
    c = classify_morphism(ConLinearMap(E, E, Mat.zeros(1, 1)))
    assert not c.mono and not c.epi


def test_non_constraint_map_rejected():
    with pytest.raises(NotConstraintMap):
        classify_morphism(ConLinearMap(flag(1, [(1,)], [(1,)]), flag(1, [(1,)]), Mat.identity(1)))


def test_kernel_image_examples():
    E = flag(2, [(1, 0)])
    assert dims(kernel_image(identity_map(E), "kernel")) == (0, 0, 0)
    assert dims(kernel_image(ConLinearMap(E, E, Mat.zeros(2, 2)), "image")) == (0, 0, 0)
    phi = ConLinearMap(E, flag(2, [(1, 0), (0, 1)], [(1, 0)]), Mat.identity(2))
    assert dims(kernel_image(phi, "image")) == (2, 1, 0)
    assert dims(kernel_image(phi, "regular_image")) == (2, 1, 1)


def test_construct_examples():
    E = flag(3, [(1, 0, 0), (0, 1, 0)], [(1, 0, 0)])
    D = construct("dual", E)
    assert D.W == Subspace.span_units(3, [1, 2]) and D.N == Subspace.span_units(3, [2])
    assert dims(construct("dsum", ConVectorSpace.from_dims(2, 1, 0), ConVectorSpace.from_dims(1, 1, 1))) == (3, 2, 1)
    t = construct("tensor", ConVectorSpace.from_dims(1, 1, 0), ConVectorSpace.from_dims(1, 1, 1))
    assert dims(t) == (1, 1, 1)


def test_reduce_examples():
    assert reduce(ConVectorSpace.from_dims(3, 2, 1)).dim == 1
    E = ConVectorSpace.from_dims(3, 2, 1)
    assert reduce(identity_map(E)).matrix == Mat.identity(1)


def test_gaussian_module_reduction():
    A = gaussian_rationals()
    E = regular_module(A, W=((1, 0), (0, 1)), N=())
    assert reduce(E).dim == 2
    assert reduce(A).dim == 1


def test_tensor_over_gaussian_rationals():
    # reduce(E ⊗_A E) is Q(i) (dim 2); reduce(E) ⊗ reduce(E) over reduce(A) = Q is Q(i) ⊗_Q Q(i) (dim 4)
    A = gaussian_rationals()
    E = regular_module(A, W=((1, 0), (0, 1)), N=())
    assert reduce(construct("tensor", E, E)).dim == 2
    rE = reduce(E)
    assert construct("tensor", rE, rE).dim == 4
    strong = tensor_over_algebra(E, E, "strong")
    assert strong.space.N.dim == 0


def test_tensor_unit_law():
    A = gaussian_rationals()
    E = regular_module(A, W=((1, 0), (0, 1)), N=())
    assert tensor_over_algebra(E, regular_module(A), "tensor").dim == E.dim


def test_canonical_iso_examples():
    Q = flag(1, [(1,)])
    phi = canonical_iso("hom_as_strong_tensor", Q, Q)
    assert phi.matrix == Mat.identity(1) and classify_morphism(phi).iso
    E, F = flag(2, [(1, 0)]), flag(1, [(1,)], [(1,)])
    assert classify_morphism(canonical_iso("dual_of_tensor", E, F)).iso
    assert classify_morphism(canonical_iso("dual_of_strong_tensor", E, F)).iso


def test_dual_basis_examples():
    E = flag(2, [(1, 0)])
    std = lambda idx: calg.ConDualBasis(idx, [(1, 0), (0, 1)], [[[1, 0]], [[0, 1]]])
    assert verify_dual_basis(E, std(ConIndexSet([1, 2], [1], [])))
    assert not verify_dual_basis(E, std(ConIndexSet([1, 2], [2], [])))
    assert verify_dual_basis(ConVectorSpace.plain(0), calg.ConDualBasis(ConIndexSet([]), [], []))


def test_derivation_examples():
    assert derivations(calg.ground_algebra()).dim == 0
    # Q[x]/(x^2) on (1, x)
    dual_numbers = ConAlgebraFD(flag(2, [(1, 0), (0, 1)], [(0, 1)]),
                                (((1, 0), (0, 1)), ((0, 1), (0, 0))), (1, 0))
    D = derivations(dual_numbers)
    assert D.dim == 1
    lie = derivation_lie_algebra(dual_numbers)
    assert lie.dim == 1


@given(seeds)
def test_reduction_of_constructions(seed):
    rng = random.Random(seed)
    E, F = rand_flag(rng, rng.randint(0, 3)), rand_flag(rng, rng.randint(0, 3))
    rE, rF = reduce(E).dim, reduce(F).dim
    assert reduce(construct("dsum", E, F)).dim == rE + rF
    assert reduce(construct("tensor", E, F)).dim == rE * rF
    assert reduce(construct("strong_tensor", E, F)).dim == rE * rF
    assert reduce(construct("dual", E)).dim == rE
    cmp = reduced_hom_comparison(E, F)
    assert rank(cmp) == cmp.ncols  # injective


@given(seeds, st.sampled_from(["hom_as_strong_tensor", "dual_of_tensor", "dual_of_strong_tensor"]))
def test_canonical_isos_are_isos(seed, which):
    rng = random.Random(seed)
    E, F = rand_flag(rng, rng.randint(0, 3)), rand_flag(rng, rng.randint(0, 3))
    phi = canonical_iso(which, E, F)
    assert classify_morphism(phi).iso and is_iso_direct(phi)


@given(seeds)
def test_iso_characterizations_agree_on_random_maps(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    E = rand_flag(rng, n)
    M = Mat([[rng.randint(-1, 1) for _ in range(n)] for _ in range(n)], n)
    phi = ConLinearMap(E, E, M)
    if not phi.is_constraint():
        return
    c = classify_morphism(phi)
    assert c.iso == (c.mono and c.regular_epi) == (c.regular_mono and c.epi) == is_iso_direct(phi)
