"""Constraint index sets ``N ⊆ W ⊆ T`` and slot-class combinatorics."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ArityMismatch, DegreeTooLarge, InvariantViolation, PartialMap


class SlotClass(enum.Enum):
    NULL = "N"
    WOBS_ONLY = "W"
    TOTAL_ONLY = "T"

    @property
    def in_w(self) -> bool:
        return self is not SlotClass.TOTAL_ONLY

    @property
    def in_n(self) -> bool:
        return self is SlotClass.NULL

    @classmethod
    def parse(cls, text: str) -> SlotClass:
        aliases = {"N": cls.NULL, "NULL": cls.NULL, "W": cls.WOBS_ONLY, "WOBS_ONLY": cls.WOBS_ONLY,
                   "T": cls.TOTAL_ONLY, "TOTAL_ONLY": cls.TOTAL_ONLY}
        try:
            return aliases[text]
        except (KeyError, TypeError):
            raise ValueError(f"unknown slot class {text!r}") from None


@dataclass(frozen=True)
class ConDim:
    n_T: int
    n_W: int
    n_N: int

    def __post_init__(self):
        if not 0 <= self.n_N <= self.n_W <= self.n_T:
            raise InvariantViolation(f"dimension triple {self.as_tuple()} is not nested")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_T, self.n_W, self.n_N)


@dataclass(frozen=True)
class ConIndexSet:
    T: tuple
    W: frozenset
    N: frozenset

    def __init__(self, T: Iterable[Hashable], W: Iterable[Hashable] = (), N: Iterable[Hashable] = ()):
        T = tuple(T)
        W, N = frozenset(W), frozenset(N)
        if len(set(T)) != len(T):
            raise InvariantViolation("repeated labels in T")
        if not N <= W or not W <= set(T):
            raise InvariantViolation("index set must satisfy N ⊆ W ⊆ T")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "N", N)

    @classmethod
    def from_classes(cls, classes: Sequence[SlotClass], labels: Sequence[Hashable] | None = None) -> ConIndexSet:
        labels = list(range(len(classes))) if labels is None else list(labels)
        return cls(labels, (l for l, c in zip(labels, classes) if c.in_w), (l for l, c in zip(labels, classes) if c.in_n))

    def class_of(self, label: Hashable) -> SlotClass:
        if label in self.N:
            return SlotClass.NULL
        if label in self.W:
            return SlotClass.WOBS_ONLY
        return SlotClass.TOTAL_ONLY

    def classes(self) -> list[SlotClass]:
        return [self.class_of(l) for l in self.T]

    def dims(self) -> ConDim:
        return ConDim(len(self.T), len(self.W), len(self.N))

    def reduced(self) -> tuple:
        return tuple(l for l in self.T if l in self.W and l not in self.N)


def _product(m: ConIndexSet, n: ConIndexSet, strong: bool) -> ConIndexSet:
    T = tuple(itertools.product(m.T, n.T))
    W, N = set(), set()
    for a, b in T:
        if strong:
            in_n = (b in n.N) or (a in m.N)
            in_w = (a in m.W and b in n.W) or in_n
        else:
            in_n = (a in m.W and b in n.N) or (a in m.N and b in n.W)
            in_w = a in m.W and b in n.W
        if in_w:
            W.add((a, b))
        if in_n:
            N.add((a, b))
    return ConIndexSet(T, W, N)


def combine(kind: str, m: ConIndexSet, n: ConIndexSet | None = None):
    """Index-set constructions.

    ``coproduct``, ``tensor`` and ``strong_tensor`` are binary; ``dual`` and
    ``reduce`` are unary.  ``reduce`` returns the plain tuple ``W ∖ N``.

    >>> combine("dual", ConIndexSet([1, 2, 3], [1, 2], [1]))
    ConIndexSet(T=(1, 2, 3), W=frozenset({2, 3}), N=frozenset({3}))
    """
    binary = kind in ("coproduct", "tensor", "strong_tensor")
    if kind not in ("coproduct", "tensor", "strong_tensor", "dual", "reduce"):
        raise ValueError(f"unknown index-set construction {kind!r}")
    if binary != (n is not None):
        raise ArityMismatch(f"{kind} takes {'two' if binary else 'one'} index set(s)")
    if kind == "coproduct":
        tag = lambda k, xs: ((k, x) for x in xs)
        return ConIndexSet(
            itertools.chain(tag(0, m.T), tag(1, n.T)),
            itertools.chain(tag(0, m.W), tag(1, n.W)),
            itertools.chain(tag(0, m.N), tag(1, n.N)),
        )
    if kind == "tensor":
        return _product(m, n, strong=False)
    if kind == "strong_tensor":
        return _product(m, n, strong=True)
    if kind == "dual":
        T = set(m.T)
        return ConIndexSet(m.T, T - m.N, T - m.W)
    return m.reduced()


def classify_map(f: Mapping, m: ConIndexSet, n: ConIndexSet) -> bool:
    """Whether ``f`` is a morphism of index sets: ``f(M_W) ⊆ N_W`` and ``f(M_N) ⊆ N_N``."""
    missing = [l for l in m.T if l not in f]
    if missing:
        raise PartialMap(f"map undefined on {missing}")
    if any(f[l] not in set(n.T) for l in m.T):
        raise PartialMap("map leaves the target label set")
    return all(f[l] in n.W for l in m.W) and all(f[l] in n.N for l in m.N)


def pair_class(a: SlotClass, b: SlotClass, flavor: str) -> SlotClass:
    """Class of a product label from the classes of its two factors."""
    if flavor == "strong":
        if a.in_n or b.in_n:
            return SlotClass.NULL
        return SlotClass.WOBS_ONLY if a.in_w and b.in_w else SlotClass.TOTAL_ONLY
    if flavor == "tensor":
        if a.in_w and b.in_w:
            return SlotClass.NULL if (a.in_n or b.in_n) else SlotClass.WOBS_ONLY
        return SlotClass.TOTAL_ONLY
    raise ValueError(f"unknown flavor {flavor!r}")


def tuple_class(slots: Sequence[SlotClass], index: Sequence[int], flavor: str) -> SlotClass:
    """Fold :func:`pair_class` over the slots of one index tuple; the empty tuple is the unit."""
    cls = SlotClass.WOBS_ONLY
    for i in index:
        cls = pair_class(cls, slots[i], flavor)
    return cls


def wedge_classes(k: int, slots: Sequence[SlotClass], flavor: str) -> dict[tuple[int, ...], SlotClass]:
    """Class of every increasing ``k``-tuple of slot indices (0-based) in the ``k``-th power."""
    if k > len(slots):
        raise DegreeTooLarge(f"degree {k} exceeds {len(slots)} slots")
    if k < 0:
        raise DegreeTooLarge("negative degree")
    return {I: tuple_class(slots, I, flavor) for I in itertools.combinations(range(len(slots)), k)}


def dual_class(c: SlotClass) -> SlotClass:
    """Per-label effect of :func:`combine` ``dual``: N and T∖W swap, W∖N stays."""
    return {SlotClass.NULL: SlotClass.TOTAL_ONLY, SlotClass.TOTAL_ONLY: SlotClass.NULL}.get(c, c)


def all_index_sets(labels: Sequence[Hashable]):
    """Every index set on the given ordered labels (``3^len`` of them)."""
    for classes in itertools.product(list(SlotClass), repeat=len(labels)):
        yield ConIndexSet.from_classes(classes, labels)
