"""Polynomial Cartan calculus on the flat constraint model.

Forms and multivector fields are stored as maps from strictly increasing
index tuples to polynomial coefficients.  Every operation canonicalizes its
output, so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cgeo import (
    ClassedSection,
    ConSpace,
    FnClass,
    classify_components,
    fn_reduce,
    hom_section_from_matrix,
    section_class,
    tangent_bundle,
)
from .cindex import SlotClass, tuple_class
from .errors import DegreeMismatch, DegreeZero, MalformedInput, NotInWobs, ShapeMismatch, SpaceMismatch, VarMismatch
from .poly import Poly

FLAVORS = ("tensor", "strong")


def sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, ()
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


class Alternating:
    """Antisymmetric tensor of fixed degree with polynomial coefficients.

    ``rank`` is the number of fiber slots and ``nvars`` the number of base
    variables; they coincide for (co)tangent objects but not for algebroids.
    """

    __slots__ = ("nvars", "rank", "degree", "comps")

    def __init__(self, nvars: int, rank: int, degree: int, comps: Mapping[tuple, Poly] | None = None):
        if degree < 0:
            raise DegreeMismatch("negative degree")
        self.nvars, self.rank, self.degree = nvars, rank, degree
        clean: dict[tuple, Poly] = {}
        for I, c in (comps or {}).items():
            I = tuple(I)
            if len(I) != degree or any(not 0 <= i < rank for i in I):
                raise ShapeMismatch(f"index {I} does not fit degree {degree} over {rank} slots")
            if not isinstance(c, Poly):
                c = Poly.const(nvars, c)
            if c.nvars != nvars:
                raise VarMismatch(f"coefficient has {c.nvars} variables, expected {nvars}")
            sign, J = sort_sign(I)
            if sign:
                acc = clean.get(J, Poly.zero(nvars)) + c.scale(sign)
                if acc.is_zero():
                    clean.pop(J, None)
                else:
                    clean[J] = acc
        self.comps = clean

    def _like(self, degree: int, comps) -> Alternating:
        return type(self)._make(self, degree, comps)

    @classmethod
    def _make(cls, proto: Alternating, degree: int, comps) -> Alternating:
        out = cls.__new__(cls)
        Alternating.__init__(out, proto.nvars, proto.rank, degree, comps)
        return out

    def _check_same(self, other: Alternating) -> None:
        if type(other) is not type(self) or (self.nvars, self.rank) != (other.nvars, other.rank):
            raise SpaceMismatch("operands live on different spaces")

    def coefficient(self, I: Iterable[int]) -> Poly:
        sign, J = sort_sign(tuple(I))
        if not sign:
            return Poly.zero(self.nvars)
        return self.comps.get(J, Poly.zero(self.nvars)).scale(sign)

    def __add__(self, other: Alternating) -> Alternating:
        self._check_same(other)
        if other.degree != self.degree:
            raise DegreeMismatch("adding tensors of different degree")
        comps = dict(self.comps)
        for I, c in other.comps.items():
            comps[I] = comps[I] + c if I in comps else c
        return self._like(self.degree, comps)

    def __neg__(self) -> Alternating:
        return self._like(self.degree, {I: -c for I, c in self.comps.items()})

    def __sub__(self, other: Alternating) -> Alternating:
        return self + (-other)

    def scale(self, f) -> Alternating:
        return self._like(self.degree, {I: f * c for I, c in self.comps.items()})

    def wedge(self, other: Alternating) -> Alternating:
        self._check_same(other)
        comps: dict[tuple, Poly] = {}
        for I, a in self.comps.items():
            for J, b in other.comps.items():
                sign, K = sort_sign(I + J)
                if sign:
                    t = (a * b).scale(sign)
                    comps[K] = comps[K] + t if K in comps else t
        return self._like(self.degree + other.degree, comps)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Alternating)
            and type(other) is type(self)
            and (self.nvars, self.rank, self.degree) == (other.nvars, other.rank, other.degree)
            and self.comps == other.comps
            and self._extra() == other._extra()
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.degree, frozenset(self.comps.items())))

    def _extra(self):
        return ()

    def __repr__(self) -> str:
        body = " + ".join(f"({c})[{','.join(str(i + 1) for i in I)}]" for I, c in sorted(self.comps.items()))
        return f"{type(self).__name__}(deg={self.degree}, {body or '0'})"


class _Classed(Alternating):
    """Alternating tensor over the (co)tangent bundle of a ConSpace with a flavor."""

    __slots__ = ("space", "flavor")

    def __init__(self, space: ConSpace, degree: int, comps=None, flavor: str = "strong"):
        if flavor not in FLAVORS:
            raise MalformedInput(f"unknown flavor {flavor!r}")
        self.space, self.flavor = space, flavor
        super().__init__(space.dT, space.dT, degree, comps)

    @classmethod
    def _make(cls, proto, degree, comps):
        return cls(proto.space, degree, comps, proto.flavor)

    def _check_same(self, other) -> None:
        super()._check_same(other)
        if other.space != self.space:
            raise SpaceMismatch("operands live on different spaces")
        if other.flavor != self.flavor:
            raise SpaceMismatch("operands have different flavors")

    def _extra(self):
        return (self.space, self.flavor)

    @classmethod
    def zero(cls, space: ConSpace, degree: int, flavor: str = "strong"):
        return cls(space, degree, {}, flavor)

    @classmethod
    def function(cls, space: ConSpace, f: Poly, flavor: str = "strong"):
        return cls(space, 0, {(): f}, flavor)

    @classmethod
    def basis(cls, space: ConSpace, I: Sequence[int], flavor: str = "strong"):
        return cls(space, len(I), {tuple(I): Poly.one(space.dT)}, flavor)

    def slot_classes(self) -> tuple[SlotClass, ...]:
        raise NotImplementedError

    def tuple_class(self, I: tuple) -> SlotClass:
        return tuple_class(self.slot_classes(), I, self.flavor)


class KForm(_Classed):
    __slots__ = ()

    def slot_classes(self):
        return self.space.cotangent_classes()


class MultiVector(_Classed):
    __slots__ = ()

    def slot_classes(self):
        return self.space.tangent_classes()

    @classmethod
    def from_field(cls, X: ClassedSection, flavor: str = "strong") -> MultiVector:
        return cls(X.bundle.base, 1, {(i,): c for i, c in enumerate(X.components)}, flavor)

    def as_field(self) -> ClassedSection:
        if self.degree != 1:
            raise DegreeMismatch("only degree-1 multivectors are vector fields")
        return vector_field(self.space, [self.coefficient((i,)) for i in range(self.space.dT)])


def _classify(t: _Classed) -> FnClass:
    items = list(t.comps.items())
    return classify_components(t.space, [t.tuple_class(I) for I, _ in items], [c for _, c in items])


def form_class(w: KForm) -> FnClass:
    return _classify(w)


def mv_class(P: MultiVector) -> FnClass:
    return _classify(P)


# ---------------------------------------------------------------------------
# vector fields


def vector_field(space: ConSpace, components: Sequence[Poly]) -> ClassedSection:
    return ClassedSection(tangent_bundle(space), tuple(components))


def _as_field(X) -> ClassedSection:
    if isinstance(X, MultiVector):
        return X.as_field()
    return X


def apply_field(X: ClassedSection, f: Poly) -> Poly:
    """``X(f) = Σ X^i ∂_i f``."""
    out = Poly.zero(f.nvars)
    for i, c in enumerate(X.components):
        if c:
            out = out + c * f.partial(i)
    return out


def vf_bracket(X: ClassedSection, Y: ClassedSection) -> ClassedSection:
    """``[X,Y]^j = Σ_i X^i ∂_i Y^j − Y^i ∂_i X^j``.

    >>> s = ConSpace(2, 2, 0)
    >>> one, zero, x1 = Poly.one(2), Poly.zero(2), Poly.var(2, 0)
    >>> vf_bracket(vector_field(s, [one, zero]), vector_field(s, [zero, x1])).components[1] == one
    True
    """
    X, Y = _as_field(X), _as_field(Y)
    if X.bundle.base != Y.bundle.base:
        raise SpaceMismatch("vector fields on different spaces")
    comps = [apply_field(X, Y.components[j]) - apply_field(Y, X.components[j]) for j in range(len(X.components))]
    return ClassedSection(X.bundle, tuple(comps))


# ---------------------------------------------------------------------------
# forms


def de_rham(w: KForm) -> KForm:
    comps: dict[tuple, Poly] = {}
    for I, c in w.comps.items():
        for i in range(w.space.dT):
            if i in I:
                continue
            d = c.partial(i)
            if d:
                sign, K = sort_sign((i,) + I)
                t = d.scale(sign)
                comps[K] = comps[K] + t if K in comps else t
    return KForm(w.space, w.degree + 1, comps, w.flavor)


def insertion(X: ClassedSection, w: KForm) -> KForm:
    """``i_X w``, contracting the first slot."""
    X = _as_field(X)
    if w.degree == 0:
        raise DegreeZero("cannot insert a vector field into a function")
    if X.bundle.base != w.space:
        raise SpaceMismatch("field and form on different spaces")
    comps: dict[tuple, Poly] = {}
    for I, c in w.comps.items():
        for r, i in enumerate(I):
            x = X.components[i]
            if x:
                J = I[:r] + I[r + 1:]
                t = (x * c).scale(-1 if r % 2 else 1)
                comps[J] = comps[J] + t if J in comps else t
    return KForm(w.space, w.degree - 1, comps, w.flavor)


def lie_derivative(X: ClassedSection, w):
    """``L_X`` on a polynomial or a form, computed from ``L_X dx^a = d(X^a)``."""
    X = _as_field(X)
    if isinstance(w, Poly):
        return apply_field(X, w)
    if X.bundle.base != w.space:
        raise SpaceMismatch("field and form on different spaces")
    n = w.space.dT
    comps: dict[tuple, Poly] = {}

    def put(K, t):
        comps[K] = comps[K] + t if K in comps else t

    for I, c in w.comps.items():
        put(I, apply_field(X, c))
        for m, a in enumerate(I):
            for b in range(n):
                d = X.components[a].partial(b)
                if d:
                    put(I[:m] + (b,) + I[m + 1:], c * d)
    # unsorted keys are canonicalized by the constructor
    return KForm(w.space, w.degree, _canon(comps, n), w.flavor)


def _canon(comps: dict[tuple, Poly], nvars: int) -> dict[tuple, Poly]:
    out: dict[tuple, Poly] = {}
    for I, c in comps.items():
        sign, J = sort_sign(I)
        if sign:
            out[J] = out.get(J, Poly.zero(nvars)) + c.scale(sign)
    return out


def pairing(w: KForm, X: ClassedSection) -> Poly:
    """``w(X)`` for a 1-form."""
    if w.degree != 1:
        raise DegreeMismatch("pairing needs a 1-form")
    return insertion(X, w).coefficient(())


def courant(X: ClassedSection, alpha: KForm, Y: ClassedSection, beta: KForm) -> tuple[ClassedSection, KForm]:
    """Bracket on ``TM ⊕ T*M``: ``([X,Y], L_X β − L_Y α + ½ d(α(Y) − β(X)))``."""
    if alpha.degree != 1 or beta.degree != 1:
        raise DegreeMismatch("Courant bracket takes 1-forms")
    if alpha.flavor != "strong" or beta.flavor != "strong":
        raise MalformedInput("Courant bracket needs strong-flavor forms")
    f = pairing(alpha, Y) - pairing(beta, X)
    form = lie_derivative(X, beta) - lie_derivative(Y, alpha)
    form = form + de_rham(KForm.function(alpha.space, f)).scale(Fraction(1, 2))
    return vf_bracket(X, Y), form


# ---------------------------------------------------------------------------
# multivectors


def _basis_field(n: int, i: int, coeff: Poly) -> list[Poly]:
    return [coeff if k == i else Poly.zero(n) for k in range(n)]


def _field_bracket_parts(f: Poly, a: int, g: Poly, b: int) -> list[tuple[Poly, int]]:
    """``[f ∂_a, g ∂_b]`` as a list of (coefficient, direction)."""
    return [(f * g.partial(a), b), (-(g * f.partial(b)), a)]


def schouten(P: MultiVector, Q: MultiVector) -> MultiVector:
    """Schouten bracket from the decomposable expansion over pairs of factors.

    A component ``f ∂_{i0}∧…∧∂_{ik}`` is read as ``(f∂_{i0}) ∧ ∂_{i1} ∧ …``.
    Degree-0 arguments follow ``⟦X_0∧…∧X_k, g⟧ = Σ_r (−1)^{k−r} X_r(g) X_0∧…^r…∧X_k``.
    """
    if not isinstance(P, MultiVector) or not isinstance(Q, MultiVector):
        raise MalformedInput("schouten takes multivectors")
    P._check_same(Q)
    n = P.space.dT
    comps: dict[tuple, Poly] = {}

    def put(seq, t):
        sign, K = sort_sign(seq)
        if sign and t:
            t = t.scale(sign)
            comps[K] = comps[K] + t if K in comps else t

    p, q = P.degree, Q.degree
    for I, f in P.comps.items():
        for J, g in Q.comps.items():
            if p == 0 and q == 0:
                continue
            if q == 0:
                k = p - 1
                for r, a in enumerate(I):
                    put(I[:r] + I[r + 1:], (f * g.partial(a)).scale((-1) ** (k - r)))
                continue
            if p == 0:
                # ⟦f, Q⟧ = −(−1)^{q−1} ⟦Q, f⟧
                k = q - 1
                for r, a in enumerate(J):
                    put(J[:r] + J[r + 1:], (g * f.partial(a)).scale(-((-1) ** (q - 1)) * (-1) ** (k - r)))
                continue
            for r, a in enumerate(I):
                fr = f if r == 0 else Poly.one(n)
                rest_f = Poly.one(n) if r == 0 else f
                for s, b in enumerate(J):
                    gs = g if s == 0 else Poly.one(n)
                    rest_g = Poly.one(n) if s == 0 else g
                    restI = I[:r] + I[r + 1:]
                    restJ = J[:s] + J[s + 1:]
                    sign = (-1) ** (r + s)
                    for coeff, d in _field_bracket_parts(fr, a, gs, b):
                        if coeff:
                            put((d,) + restI + restJ, (coeff * rest_f * rest_g).scale(sign))
    # two functions bracket to zero; degree -1 is represented by the zero function
    return MultiVector(P.space, max(p + q - 1, 0), comps, P.flavor)


# ---------------------------------------------------------------------------
# endomorphism fields


class EndField:
    """Matrix field ``A`` with column ``j`` equal to ``A(∂_j)``."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: ConSpace, matrix: Sequence[Sequence[Poly]]):
        n = space.dT
        rows = tuple(tuple(r) for r in matrix)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ShapeMismatch(f"endomorphism field must be {n}x{n}")
        for r in rows:
            for c in r:
                if c.nvars != n:
                    raise VarMismatch("entry has the wrong number of variables")
        self.space, self.matrix = space, rows

    @classmethod
    def identity(cls, space: ConSpace) -> EndField:
        n = space.dT
        return cls(space, [[Poly.const(n, int(i == j)) for j in range(n)] for i in range(n)])

    def __eq__(self, other) -> bool:
        return isinstance(other, EndField) and self.space == other.space and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.space, self.matrix))

    def apply(self, X: ClassedSection) -> ClassedSection:
        X = _as_field(X)
        comps = []
        for row in self.matrix:
            acc = Poly.zero(self.space.dT)
            for a, x in zip(row, X.components):
                if a and x:
                    acc = acc + a * x
            comps.append(acc)
        return vector_field(self.space, comps)

    def __matmul__(self, other: EndField) -> EndField:
        n = self.space.dT
        out = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = Poly.zero(n)
                for k in range(n):
                    acc = acc + self.matrix[i][k] * other.matrix[k][j]
                out[i][j] = acc
        return EndField(self.space, out)

    def column(self, j: int) -> ClassedSection:
        return vector_field(self.space, [r[j] for r in self.matrix])

    def transpose(self) -> EndField:
        n = self.space.dT
        return EndField(self.space, [[self.matrix[j][i] for j in range(n)] for i in range(n)])


def nijenhuis_pair(A: EndField, X: ClassedSection, Y: ClassedSection) -> ClassedSection:
    """``[AX,AY] − A[AX,Y] − A[X,AY] + A²[X,Y]``."""
    AX, AY = A.apply(X), A.apply(Y)
    t1 = vf_bracket(AX, AY)
    t2 = A.apply(vf_bracket(AX, Y))
    t3 = A.apply(vf_bracket(X, AY))
    t4 = A.apply(A.apply(vf_bracket(X, Y)))
    comps = [a - b - c + d for a, b, c, d in zip(t1.components, t2.components, t3.components, t4.components)]
    return ClassedSection(t1.bundle, tuple(comps))


def nijenhuis(A: EndField) -> dict[tuple[int, int], ClassedSection]:
    """Torsion on coordinate fields, one entry per pair ``i < j``."""
    s = A.space
    n = s.dT
    coord = [vector_field(s, _basis_field(n, i, Poly.one(n))) for i in range(n)]
    return {(i, j): nijenhuis_pair(A, coord[i], coord[j]) for i in range(n) for j in range(i + 1, n)}


def is_nijenhuis(A: EndField) -> bool:
    return all(v.is_zero() for v in nijenhuis(A).values())


def is_almost_complex(A: EndField) -> bool:
    n = A.space.dT
    minus = EndField(A.space, [[Poly.const(n, -int(i == j)) for j in range(n)] for i in range(n)])
    return A @ A == minus


def end_class(A: EndField) -> FnClass:
    """Class of ``A`` as a section of ``End(TM)`` under the hom rule."""
    T = tangent_bundle(A.space)
    return section_class(hom_section_from_matrix(T, T, A.matrix))


def reduce_end(A: EndField) -> EndField:
    if not end_class(A).in_W:
        raise NotInWobs("endomorphism field is not in the W-component")
    s = A.space
    idx = list(s.transverse)
    return EndField(s.reduced(), [[fn_reduce(s, A.matrix[j][i]) for i in idx] for j in idx])


# ---------------------------------------------------------------------------
# reduction


def _reduce_alt(t: _Classed, cls):
    c = _classify(t)
    if not c.in_W:
        raise NotInWobs(f"{type(t).__name__} is not in the W-component")
    s = t.space
    classes = t.slot_classes()
    comps = {}
    for I, f in t.comps.items():
        if all(classes[i] is SlotClass.WOBS_ONLY for i in I):
            comps[tuple(i - s.dN for i in I)] = fn_reduce(s, f)
    return cls(s.reduced(), t.degree, comps, t.flavor)


def reduce_form(w: KForm) -> KForm:
    return _reduce_alt(w, KForm)


def reduce_mv(P: MultiVector) -> MultiVector:
    return _reduce_alt(P, MultiVector)


def reduce_field(X: ClassedSection) -> ClassedSection:
    from .cgeo import reduce_section

    r = reduce_section(X)
    return vector_field(r.bundle.base, r.components)
