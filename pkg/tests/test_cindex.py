import itertools

import pytest
from hypothesis import given, strategies as st

from conred.cindex import (
    ConDim,
    ConIndexSet,
    SlotClass,
    all_index_sets,
    classify_map,
    combine,
    dual_class,
    wedge_classes,
)
from conred.errors import ArityMismatch, DegreeTooLarge, InvariantViolation, PartialMap

N, W, T = SlotClass.NULL, SlotClass.WOBS_ONLY, SlotClass.TOTAL_ONLY
M = ConIndexSet([1, 2, 3], [1, 2], [1])

index_sets = st.lists(st.sampled_from(list(SlotClass)), max_size=4).map(ConIndexSet.from_classes)


def test_dual_example():
    assert combine("dual", M) == ConIndexSet([1, 2, 3], [2, 3], [3])


def test_reduce_example():
    assert combine("reduce", M) == (2,)


def test_double_dual_example():
    X = ConIndexSet([1, 2], [1], [])
    assert combine("dual", combine("dual", X)) == X


def test_classify_map_examples():
    assert classify_map({l: l for l in M.T}, M, M)
    assert classify_map({l: 1 for l in M.T}, M, M)
    assert not classify_map({1: 3, 2: 2, 3: 1}, M, M)
    with pytest.raises(PartialMap):
        classify_map({1: 1}, M, M)


@pytest.mark.parametrize("slots, flavor, expected", [
    ((N, W), "tensor", N),
    ((T, N), "strong", N),
    ((T, N), "tensor", T),
])
def test_wedge_class_examples(slots, flavor, expected):
    assert wedge_classes(2, slots, flavor) == {(0, 1): expected}


def test_wedge_degree_bounds():
    with pytest.raises(DegreeTooLarge):
        wedge_classes(3, (N, W), "strong")
    assert wedge_classes(0, (N, W), "tensor") == {(): W}


def test_invariants_rejected():
    with pytest.raises(InvariantViolation):
        ConIndexSet([1], [], [1])
    with pytest.raises(InvariantViolation):
        ConDim(1, 2, 0)
    with pytest.raises(ArityMismatch):
        combine("tensor", M)


def test_enumeration_size():
    assert sum(1 for _ in all_index_sets("abc")) == 27


# frozen rank triples of products, counted by hand from the product rules
@pytest.mark.parametrize("a, b, kind, dims", [
    ((W, W, T), (W, T, N), "tensor", (9, 4, 2)),
    ((W, W, T), (W, T, N), "strong_tensor", (9, 5, 3)),
    ((N, W), (N, W), "tensor", (4, 4, 3)),
    ((N, W), (N, W), "strong_tensor", (4, 4, 3)),
    ((T,), (N,), "strong_tensor", (1, 1, 1)),
    ((T,), (N,), "tensor", (1, 0, 0)),
])
def test_product_dims(a, b, kind, dims):
    P = combine(kind, ConIndexSet.from_classes(a), ConIndexSet.from_classes(b))
    assert P.dims().as_tuple() == dims


@given(index_sets)
def test_dual_swaps_classes(X):
    assert combine("dual", X).classes() == [dual_class(c) for c in X.classes()]
    assert combine("dual", combine("dual", X)) == X
    assert combine("reduce", combine("dual", X)) == combine("reduce", X)


@given(index_sets, index_sets)
def test_products_reduce_to_products(X, Y):
    prod = set(itertools.product(combine("reduce", X), combine("reduce", Y)))
    assert set(combine("reduce", combine("tensor", X, Y))) == prod
    assert set(combine("reduce", combine("strong_tensor", X, Y))) == prod


@given(index_sets, index_sets)
def test_dual_exchanges_products(X, Y):
    dX, dY = combine("dual", X), combine("dual", Y)
    assert combine("dual", combine("tensor", X, Y)) == combine("strong_tensor", dX, dY)
    assert combine("dual", combine("strong_tensor", X, Y)) == combine("tensor", dX, dY)


@given(index_sets, index_sets)
def test_tensor_inside_strong_tensor(X, Y):
    t, s = combine("tensor", X, Y), combine("strong_tensor", X, Y)
    assert t.W <= s.W and t.N <= s.N
