"""Flat constraint spaces, trivial constraint bundles, sections and morphisms.

The model space ``R^(dT, dW, dN)`` has coordinates ``x_0 .. x_{dT-1}``
(rendered ``x1 .. xdT``).  The constraint set ``C`` is cut out by the last
``dT - dW`` coordinates and the leaves of ``D`` run along the first ``dN``.
Bundle slots carry a :class:`~conred.cindex.SlotClass`; a section belongs
to the W or N part by a componentwise test on its coefficient polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .calg import ConDualBasis
from .cindex import ConDim, ConIndexSet, SlotClass, combine
from .errors import BaseMismatch, NotInWobs, ShapeMismatch, VarMismatch
from .poly import Poly


@dataclass(frozen=True)
class ConSpace:
    dT: int
    dW: int
    dN: int

    def __post_init__(self):
        ConDim(self.dT, self.dW, self.dN)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.dT, self.dW, self.dN)

    @property
    def leaf(self) -> range:
        return range(self.dN)

    @property
    def transverse(self) -> range:
        """Coordinates along ``C`` that survive reduction."""
        return range(self.dN, self.dW)

    @property
    def normal(self) -> range:
        return range(self.dW, self.dT)

    @property
    def d_red(self) -> int:
        return self.dW - self.dN

    def reduced(self) -> ConSpace:
        return ConSpace(self.d_red, self.d_red, 0)

    def is_plain(self) -> bool:
        return self.dN == 0 and self.dW == self.dT

    def tangent_class(self, i: int) -> SlotClass:
        if i < self.dN:
            return SlotClass.NULL
        if i < self.dW:
            return SlotClass.WOBS_ONLY
        return SlotClass.TOTAL_ONLY

    def tangent_classes(self) -> tuple[SlotClass, ...]:
        return tuple(self.tangent_class(i) for i in range(self.dT))

    def cotangent_classes(self) -> tuple[SlotClass, ...]:
        from .cindex import dual_class

        return tuple(dual_class(c) for c in self.tangent_classes())

    def var(self, i: int) -> Poly:
        return Poly.var(self.dT, i)

    def const(self, c) -> Poly:
        return Poly.const(self.dT, c)

    def zero(self) -> Poly:
        return Poly.zero(self.dT)


@dataclass(frozen=True)
class FnClass:
    in_N: bool
    in_W: bool


def _check_vars(space: ConSpace, f: Poly) -> None:
    if f.nvars != space.dT:
        raise VarMismatch(f"function has {f.nvars} variables, space has dimension {space.dT}")


def restrict_to_C(space: ConSpace, f: Poly) -> Poly:
    return f.substitute_zero(space.normal)


def fn_class(space: ConSpace, f: Poly) -> FnClass:
    """``in_N``: vanishes on C.  ``in_W``: its restriction to C is constant along the leaves."""
    _check_vars(space, f)
    r = restrict_to_C(space, f)
    in_N = r.is_zero()
    in_W = not (r.variables() & set(space.leaf))
    assert in_W or not in_N
    return FnClass(in_N, in_W)


def slice_restrict(space: ConSpace, f: Poly) -> Poly:
    """Restrict to the transversal slice ``x_leaf = 0`` inside C and re-index.

    Agrees with :func:`fn_reduce` on C∞_W and is defined for every polynomial.
    """
    r = f.substitute_zero(list(space.leaf) + list(space.normal))
    return r.reindex(space.d_red, {i: i - space.dN for i in space.transverse})


def fn_reduce(space: ConSpace, f: Poly) -> Poly:
    """The reduced function in ``dW - dN`` variables.

    >>> s = ConSpace(3, 2, 1)
    >>> str(fn_reduce(s, Poly(3, {(0, 2, 0): 1, (1, 0, 1): 1})))
    'x1^2'
    """
    if not fn_class(space, f).in_W:
        raise NotInWobs(f"{f} is not constant along the leaves on C")
    return slice_restrict(space, f)


def fn_lift(space: ConSpace, g: Poly) -> Poly:
    """Pull a reduced polynomial back to the big space by re-indexing."""
    if g.nvars != space.d_red:
        raise VarMismatch("reduced polynomial has the wrong number of variables")
    return g.reindex(space.dT, {i: i + space.dN for i in range(space.d_red)})


# ---------------------------------------------------------------------------
# bundles and sections


@dataclass(frozen=True)
class TrivBundle:
    base: ConSpace
    slot_classes: tuple
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        classes = tuple(c if isinstance(c, SlotClass) else SlotClass.parse(c) for c in self.slot_classes)
        object.__setattr__(self, "slot_classes", classes)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(classes))))
        elif len(self.labels) != len(classes):
            raise ShapeMismatch("one label per slot")

    @property
    def rank(self) -> int:
        return len(self.slot_classes)

    def rank_triple(self) -> tuple[int, int, int]:
        cs = self.slot_classes
        return (len(cs), sum(c.in_w for c in cs), sum(c.in_n for c in cs))

    def index_set(self) -> ConIndexSet:
        return ConIndexSet.from_classes(self.slot_classes, self.labels)

    def slots_of(self, cls: SlotClass) -> list[int]:
        return [i for i, c in enumerate(self.slot_classes) if c is cls]


def trivial_bundle(base: ConSpace, k_T: int, k_W: int, k_N: int) -> TrivBundle:
    """Standard ordering: N slots, then W∖N, then T∖W."""
    ConDim(k_T, k_W, k_N)
    cls = [SlotClass.NULL] * k_N + [SlotClass.WOBS_ONLY] * (k_W - k_N) + [SlotClass.TOTAL_ONLY] * (k_T - k_W)
    return TrivBundle(base, tuple(cls))


def tangent_bundle(space: ConSpace) -> TrivBundle:
    return TrivBundle(space, space.tangent_classes())


def cotangent_bundle(space: ConSpace) -> TrivBundle:
    return bundle_construct("dual", tangent_bundle(space))


def bundle_construct(kind: str, E: TrivBundle, F: TrivBundle | None = None) -> TrivBundle:
    """Slot classes of ``dsum``/``tensor``/``strong_tensor``/``dual``/``hom`` via index-set rules.

    ``hom(E, F)`` is ``dual(E) ⊠ F``; its slot ``(i, j)`` holds the matrix
    entry mapping slot ``i`` of E to slot ``j`` of F.
    """
    if F is not None and F.base != E.base:
        raise BaseMismatch("bundles over different spaces")
    if kind == "dual":
        I = combine("dual", E.index_set())
    elif kind == "dsum":
        I = combine("coproduct", E.index_set(), F.index_set())
    elif kind == "tensor":
        I = combine("tensor", E.index_set(), F.index_set())
    elif kind == "strong_tensor":
        I = combine("strong_tensor", E.index_set(), F.index_set())
    elif kind == "hom":
        I = combine("strong_tensor", combine("dual", E.index_set()), F.index_set())
    else:
        raise ValueError(f"unknown bundle construction {kind!r}")
    return TrivBundle(E.base, tuple(I.classes()), I.T)


@dataclass(frozen=True)
class ClassedSection:
    bundle: TrivBundle
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.bundle.rank:
            raise ShapeMismatch(f"{len(comps)} components for a rank {self.bundle.rank} bundle")
        for c in comps:
            _check_vars(self.bundle.base, c)

    @classmethod
    def zero(cls, bundle: TrivBundle) -> ClassedSection:
        return cls(bundle, tuple(bundle.base.zero() for _ in range(bundle.rank)))

    @classmethod
    def basis(cls, bundle: TrivBundle, i: int) -> ClassedSection:
        b = bundle.base
        return cls(bundle, tuple(b.const(1 if j == i else 0) for j in range(bundle.rank)))

    def __add__(self, other: ClassedSection) -> ClassedSection:
        if other.bundle != self.bundle:
            raise BaseMismatch("sections of different bundles")
        return ClassedSection(self.bundle, tuple(a + b for a, b in zip(self.components, other.components)))

    def scale(self, f: Poly) -> ClassedSection:
        return ClassedSection(self.bundle, tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


def classify_components(space: ConSpace, classes: Sequence[SlotClass], comps: Sequence[Poly]) -> FnClass:
    """The componentwise membership rule shared by sections, forms and multivectors."""
    in_W = in_N = True
    for cls, f in zip(classes, comps):
        if cls is SlotClass.NULL:
            continue
        fc = fn_class(space, f)
        in_N = in_N and fc.in_N
        in_W = in_W and (fc.in_W if cls is SlotClass.WOBS_ONLY else fc.in_N)
    return FnClass(in_N, in_W)


def section_class(s: ClassedSection) -> FnClass:
    return classify_components(s.bundle.base, s.bundle.slot_classes, s.components)


def section_module_op(kind: str, s, t):
    """Pointwise operations on sections.

    ``dsum``/``tensor``/``strong_tensor`` combine two sections; ``dual_pair``
    pairs a section of ``E*`` with one of ``E``; ``hom_apply`` applies a
    :class:`BundleMorphism` to a section.
    """
    if kind == "hom_apply":
        if not isinstance(s, BundleMorphism):
            raise ShapeMismatch("hom_apply expects a bundle morphism first")
        return s.apply(t)
    if s.bundle.base != t.bundle.base:
        raise BaseMismatch("sections over different spaces")
    if kind == "dsum":
        return ClassedSection(bundle_construct("dsum", s.bundle, t.bundle), s.components + t.components)
    if kind in ("tensor", "strong_tensor"):
        B = bundle_construct(kind, s.bundle, t.bundle)
        return ClassedSection(B, tuple(a * b for a in s.components for b in t.components))
    if kind == "dual_pair":
        if s.bundle.rank != t.bundle.rank:
            raise ShapeMismatch("pairing sections of different ranks")
        out = s.bundle.base.zero()
        for a, b in zip(s.components, t.components):
            out = out + a * b
        return out
    raise ValueError(f"unknown section operation {kind!r}")


def hom_section_from_matrix(E: TrivBundle, F: TrivBundle, matrix: Sequence[Sequence[Poly]]) -> ClassedSection:
    """Entries ``matrix[j][i]`` (slot i of E to slot j of F) as a section of ``hom(E, F)``."""
    H = bundle_construct("hom", E, F)
    return ClassedSection(H, tuple(matrix[j][i] for i in range(E.rank) for j in range(F.rank)))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class BundleMorphism:
    source: TrivBundle
    target: TrivBundle
    base_map: tuple
    matrix: tuple

    def __post_init__(self):
        src, tgt = self.source.base, self.target.base
        bm = tuple(self.base_map)
        mat = tuple(tuple(r) for r in self.matrix)
        object.__setattr__(self, "base_map", bm)
        object.__setattr__(self, "matrix", mat)
        if len(bm) != tgt.dT:
            raise ShapeMismatch(f"base map needs {tgt.dT} components")
        if len(mat) != self.target.rank or any(len(r) != self.source.rank for r in mat):
            raise ShapeMismatch(f"matrix must be {self.target.rank}x{self.source.rank}")
        for p in bm + tuple(x for r in mat for x in r):
            _check_vars(src, p)

    @classmethod
    def identity(cls, E: TrivBundle) -> BundleMorphism:
        b = E.base
        return cls(E, E, tuple(b.var(i) for i in range(b.dT)),
                   tuple(tuple(b.const(int(i == j)) for j in range(E.rank)) for i in range(E.rank)))

    def apply(self, s: ClassedSection) -> ClassedSection:
        """``Φ̂(s)``: a section of the pullback of the target bundle, living on the source base."""
        if s.bundle != self.source:
            raise BaseMismatch("section is not a section of the source bundle")
        pulled = TrivBundle(self.source.base, self.target.slot_classes, self.target.labels)
        comps = []
        for row in self.matrix:
            acc = self.source.base.zero()
            for m, c in zip(row, s.components):
                acc = acc + m * c
            comps.append(acc)
        return ClassedSection(pulled, tuple(comps))

    def pullback(self, g: Poly) -> Poly:
        """``φ^* g`` for a function on the target base."""
        return g.compose(self.base_map, self.source.base.dT)


@dataclass(frozen=True)
class MorphismCheck:
    base_ok: bool
    fiber_ok: bool
    connection_ok: bool
    witnesses: tuple = ()

    @property
    def ok(self) -> bool:
        return self.base_ok and self.fiber_ok and self.connection_ok


def check_bundle_morphism(phi: BundleMorphism) -> MorphismCheck:
    """Base map constraint-ness, fiberwise flag compatibility, flat-connection compatibility."""
    src, tgt = phi.source.base, phi.target.base
    witnesses = []
    base_ok = True
    for j in tgt.normal:
        if not fn_class(src, phi.base_map[j]).in_N:
            base_ok = False
            witnesses.append(f"base map component x{j + 1} does not vanish on C")
    for j in range(tgt.dN, tgt.dT):
        for i in src.leaf:
            d = restrict_to_C(src, phi.base_map[j].partial(i))
            if not d.is_zero():
                base_ok = False
                witnesses.append(f"d/dx{i + 1} of base map component x{j + 1} is {d} on C, leaves not preserved")
    fiber_ok = connection_ok = True
    for j, tcls in enumerate(phi.target.slot_classes):
        for i, scls in enumerate(phi.source.slot_classes):
            entry = phi.matrix[j][i]
            if _entry_must_vanish(scls, tcls):
                if not fn_class(src, entry).in_N:
                    fiber_ok = False
                    witnesses.append(f"matrix entry ({j + 1},{i + 1}) = {entry} must vanish on C")
            elif scls is SlotClass.WOBS_ONLY and tcls is SlotClass.WOBS_ONLY:
                if not fn_class(src, entry).in_W:
                    connection_ok = False
                    witnesses.append(f"matrix entry ({j + 1},{i + 1}) = {entry} is not leafwise constant on C")
    return MorphismCheck(base_ok, fiber_ok, connection_ok, tuple(witnesses))


def _entry_must_vanish(scls: SlotClass, tcls: SlotClass) -> bool:
    """Entries carrying a W-slot into a non-W slot, or an N-slot into a non-N slot."""
    if scls is SlotClass.NULL:
        return tcls is not SlotClass.NULL
    if scls is SlotClass.WOBS_ONLY:
        return tcls is SlotClass.TOTAL_ONLY
    return False


# ---------------------------------------------------------------------------
# reduction


def reduce_bundle(E: TrivBundle) -> TrivBundle:
    keep = E.slots_of(SlotClass.WOBS_ONLY)
    return TrivBundle(E.base.reduced(), tuple(SlotClass.WOBS_ONLY for _ in keep), tuple(E.labels[i] for i in keep))


def reduce_section(s: ClassedSection) -> ClassedSection:
    if not section_class(s).in_W:
        raise NotInWobs("section is not in the W-component")
    space = s.bundle.base
    keep = s.bundle.slots_of(SlotClass.WOBS_ONLY)
    return ClassedSection(reduce_bundle(s.bundle), tuple(fn_reduce(space, s.components[i]) for i in keep))


def reduce_morphism(phi: BundleMorphism) -> BundleMorphism:
    """W∖N block of the matrix and the transverse part of the base map, reduced."""
    chk = check_bundle_morphism(phi)
    if not chk.ok:
        raise NotInWobs("morphism does not pass the constraint checks: " + "; ".join(chk.witnesses))
    src = phi.source.base
    return reduced_block_morphism(phi, lambda f: fn_reduce(src, f))


def reduced_block_morphism(phi: BundleMorphism, reducer) -> BundleMorphism:
    src, tgt = phi.source.base, phi.target.base
    rows = phi.target.slots_of(SlotClass.WOBS_ONLY)
    cols = phi.source.slots_of(SlotClass.WOBS_ONLY)
    base = tuple(reducer(phi.base_map[j]) for j in tgt.transverse)
    mat = tuple(tuple(reducer(phi.matrix[j][i]) for i in cols) for j in rows)
    return BundleMorphism(reduce_bundle(phi.source), reduce_bundle(phi.target), base, mat)


def naive_reduced_morphism(phi: BundleMorphism) -> BundleMorphism:
    """Block restricted to the transversal slice, defined even when the checks fail."""
    return reduced_block_morphism(phi, lambda f: slice_restrict(phi.source.base, f))


def reduction_commutes(phi: BundleMorphism, sections: Sequence[ClassedSection]) -> bool:
    """``reduce(Φ̂ s) == Φ_red(reduce s)`` for each W-section, with the slice-restricted block."""
    red = naive_reduced_morphism(phi)
    for s in sections:
        image = phi.apply(s)
        if not section_class(image).in_W:
            return False
        lhs = reduce_section(image).components
        rs = reduce_section(s)
        rhs = ClassedSection(red.source, rs.components)
        rhs = red.apply(rhs).components
        if lhs != rhs:
            return False
    return True


def standard_dual_basis(E: TrivBundle) -> ConDualBasis:
    """Constant frame ``e_i`` and coordinate coframe ``e^i`` as component vectors."""
    k = E.rank
    idx = E.index_set()
    vectors = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    covectors = [[tuple(int(i == j) for j in range(k))] for i in range(k)]
    return ConDualBasis(idx, vectors, covectors) if k else ConDualBasis(idx, (), ())


def frame_sections(E: TrivBundle) -> tuple[list[ClassedSection], list[ClassedSection]]:
    dual = bundle_construct("dual", E)
    return ([ClassedSection.basis(E, i) for i in range(E.rank)],
            [ClassedSection.basis(dual, i) for i in range(E.rank)])


def verify_section_dual_basis(E: TrivBundle, db: ConDualBasis) -> bool:
    """Component-level reconstruction plus class conditions through :func:`section_class`."""
    k = E.rank
    base = E.base
    dual = bundle_construct("dual", E)
    total = [[0] * k for _ in range(k)]
    for v, cov in zip(db.vectors, db.covectors):
        row = cov.rows[0]
        for a in range(k):
            for b in range(k):
                total[a][b] += v[a] * row[b]
    if any(total[a][b] != int(a == b) for a in range(k) for b in range(k)):
        return False
    idx = db.index
    for label, v, cov in zip(idx.T, db.vectors, db.covectors):
        s = ClassedSection(E, tuple(base.const(x) for x in v))
        c = ClassedSection(dual, tuple(base.const(x) for x in cov.rows[0]))
        sc, cc = section_class(s), section_class(c)
        if label in idx.W and not sc.in_W:
            return False
        if label in idx.N and not sc.in_N:
            return False
        if label not in idx.N and not cc.in_W:
            return False
        if label not in idx.W and not cc.in_N:
            return False
    return True
