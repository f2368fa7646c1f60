"""Lie algebroids on trivial constraint bundles over the flat model.

An algebroid is stored by its anchor matrix and its structure functions on
the standard frame ``e_1 .. e_k``; the bracket of arbitrary sections follows
from the Leibniz rule.  Multivectors over ``A`` and forms over ``A`` are both
:class:`~conred.cartan.Alternating` tensors of rank ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .cartan import Alternating, sort_sign, vector_field, vf_bracket
from .cgeo import (
    BundleMorphism,
    ClassedSection,
    ConSpace,
    FnClass,
    TrivBundle,
    bundle_construct,
    check_bundle_morphism,
    classify_components,
    fn_class,
    fn_reduce,
    reduce_bundle,
    section_class,
    tangent_bundle,
)
from .cindex import SlotClass, tuple_class
from .errors import (
    ChecksFail,
    ClassicalAxiomsFail,
    ConstituentFails,
    NotBundleMorphism,
    NotInWobs,
    ShapeMismatch,
    VarMismatch,
)
from .poly import Poly

Vec = tuple  # tuple of Poly, one per frame slot


@dataclass(frozen=True)
class Report:
    ok: bool
    failures: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _report(failures: list[str]) -> Report:
    return Report(not failures, tuple(failures))


class AlgebroidData:
    """Anchor ``anchor[j][i]`` (component ``j`` of ``ρ(e_i)``) and ``struct[i][j][m] = c^m_ij``."""

    __slots__ = ("bundle", "anchor", "struct")

    def __init__(self, bundle: TrivBundle, anchor: Sequence[Sequence[Poly]], struct):
        base = bundle.base
        n, k = base.dT, bundle.rank
        anchor = tuple(tuple(r) for r in anchor)
        if len(anchor) != n or any(len(r) != k for r in anchor):
            raise ShapeMismatch(f"anchor must be {n}x{k}")
        if isinstance(struct, dict):
            table = [[[Poly.zero(n) for _ in range(k)] for _ in range(k)] for _ in range(k)]
            for (i, j, m), c in struct.items():
                table[i][j][m] = c
                table[j][i][m] = -c
            struct = table
        struct = tuple(tuple(tuple(c) for c in row) for row in struct)
        if len(struct) != k or any(len(r) != k or any(len(c) != k for c in r) for r in struct):
            raise ShapeMismatch(f"structure functions must be {k}x{k}x{k}")
        for p in itertools.chain((x for r in anchor for x in r), (x for r in struct for c in r for x in c)):
            if p.nvars != n:
                raise VarMismatch("coefficient has the wrong number of variables")
        for i in range(k):
            for j in range(k):
                for m in range(k):
                    if struct[i][j][m] != -struct[j][i][m]:
                        raise ShapeMismatch(f"structure functions not antisymmetric at ({i + 1},{j + 1};{m + 1})")
        self.bundle, self.anchor, self.struct = bundle, anchor, struct

    @property
    def base(self) -> ConSpace:
        return self.bundle.base

    @property
    def rank(self) -> int:
        return self.bundle.rank

    @property
    def nvars(self) -> int:
        return self.bundle.base.dT

    def __eq__(self, other) -> bool:
        return (isinstance(other, AlgebroidData) and self.bundle == other.bundle
                and self.anchor == other.anchor and self.struct == other.struct)

    def __hash__(self) -> int:
        return hash((self.bundle, self.anchor, self.struct))

    def __repr__(self) -> str:
        return f"AlgebroidData(rank={self.rank}, base={self.base.dims})"

    def rho(self, i: int, f: Poly) -> Poly:
        """``ρ(e_i) f``."""
        out = Poly.zero(self.nvars)
        for j in range(self.nvars):
            a = self.anchor[j][i]
            if a:
                out = out + a * f.partial(j)
        return out

    def anchor_section(self, a: Vec) -> list[Poly]:
        """Components of ``ρ(a)`` for a section ``a``."""
        n = self.nvars
        out = []
        for j in range(n):
            acc = Poly.zero(n)
            for i, ai in enumerate(a):
                if ai and self.anchor[j][i]:
                    acc = acc + ai * self.anchor[j][i]
            out.append(acc)
        return out

    def act(self, a: Vec, f: Poly) -> Poly:
        """``ρ(a) f``."""
        out = Poly.zero(self.nvars)
        for i, ai in enumerate(a):
            if ai:
                out = out + ai * self.rho(i, f)
        return out

    def basis(self, i: int) -> Vec:
        n = self.nvars
        return tuple(Poly.const(n, int(j == i)) for j in range(self.rank))

    def bracket(self, a: Vec, b: Vec) -> Vec:
        """``[a,b]^m = Σ a^i b^j c^m_ij + ρ(a) b^m − ρ(b) a^m``."""
        n, k = self.nvars, self.rank
        out = [self.act(a, b[m]) - self.act(b, a[m]) for m in range(k)]
        for i in range(k):
            if not a[i]:
                continue
            for j in range(k):
                if not b[j]:
                    continue
                ab = a[i] * b[j]
                for m in range(k):
                    c = self.struct[i][j][m]
                    if c:
                        out[m] = out[m] + ab * c
        return tuple(out)


LieRinehartData = AlgebroidData


def tangent_algebroid(space: ConSpace) -> AlgebroidData:
    n = space.dT
    anchor = [[Poly.const(n, int(i == j)) for i in range(n)] for j in range(n)]
    return AlgebroidData(tangent_bundle(space), anchor, {})


def lie_algebra_algebroid(bundle: TrivBundle, structure: dict) -> AlgebroidData:
    """Zero anchor and constant structure constants ``{(i, j, m): c}``."""
    n, k = bundle.base.dT, bundle.rank
    anchor = [[Poly.zero(n) for _ in range(k)] for _ in range(n)]
    return AlgebroidData(bundle, anchor, {key: Poly.const(n, c) for key, c in structure.items()})


# ---------------------------------------------------------------------------
# classical axioms


def _vadd(*vs: Vec) -> Vec:
    return tuple(sum(cs[1:], cs[0]) for cs in zip(*vs))


def jacobiator(A: AlgebroidData, a: Vec, b: Vec, c: Vec) -> Vec:
    br = A.bracket
    return _vadd(br(br(a, b), c), br(br(b, c), a), br(br(c, a), b))


def check_classical(A: AlgebroidData) -> Report:
    failures = []
    k = A.rank
    basis = [A.basis(i) for i in range(k)]
    for i, j, m in itertools.combinations(range(k), 3):
        J = jacobiator(A, basis[i], basis[j], basis[m])
        if any(J):
            failures.append(f"Jacobi fails on (e{i + 1}, e{j + 1}, e{m + 1}): {[str(x) for x in J]}")
    space = A.base
    for i, j in itertools.combinations(range(k), 2):
        lhs = A.anchor_section(A.bracket(basis[i], basis[j]))
        rhs = vf_bracket(vector_field(space, A.anchor_section(basis[i])),
                         vector_field(space, A.anchor_section(basis[j]))).components
        if tuple(lhs) != tuple(rhs):
            failures.append(f"anchor does not preserve [e{i + 1}, e{j + 1}]")
    return _report(failures)


def check_constraint(A: AlgebroidData) -> Report:
    classical = check_classical(A)
    if not classical:
        raise ClassicalAxiomsFail("; ".join(classical.failures))
    failures = []
    space, classes = A.base, A.bundle.slot_classes
    T = tangent_bundle(space)
    for i, cls in enumerate(classes):
        col = section_class(ClassedSection(T, tuple(A.anchor[j][i] for j in range(space.dT))))
        if cls is SlotClass.NULL and not col.in_N:
            failures.append(f"anchor of N-slot e{i + 1} is not in the N-component")
        if cls is SlotClass.WOBS_ONLY and not col.in_W:
            failures.append(f"anchor of W-slot e{i + 1} is not in the W-component")
    for i in range(A.rank):
        for j in range(i, A.rank):
            ci, cj = classes[i], classes[j]
            if not (ci.in_w and cj.in_w):
                continue
            sec = section_class(ClassedSection(A.bundle, A.struct[i][j]))
            if (ci.in_n or cj.in_n) and not sec.in_N:
                failures.append(f"[e{i + 1}, e{j + 1}] is not in the N-component")
            elif not sec.in_W:
                failures.append(f"[e{i + 1}, e{j + 1}] is not in the W-component")
    mid = A.bundle.slots_of(SlotClass.WOBS_ONLY)
    for i in mid:
        for j in mid:
            for m in mid:
                if i < j and not fn_class(space, A.struct[i][j][m]).in_W:
                    failures.append(f"c^{m + 1}_{i + 1}{j + 1} is not leafwise constant on C")
    return _report(failures)


def _require_checks(A: AlgebroidData) -> None:
    try:
        rep = check_constraint(A)
    except ClassicalAxiomsFail as exc:
        raise ChecksFail(str(exc)) from None
    if not rep:
        raise ChecksFail("; ".join(rep.failures))


# ---------------------------------------------------------------------------
# Koszul differential and Gerstenhaber bracket


def alt(A: AlgebroidData, degree: int, comps=None) -> Alternating:
    return Alternating(A.nvars, A.rank, degree, comps)


def koszul(A: AlgebroidData, alpha: Alternating) -> Alternating:
    """The algebroid differential on forms over ``A``, evaluated on basis tuples."""
    if (alpha.nvars, alpha.rank) != (A.nvars, A.rank):
        raise ShapeMismatch("form does not match the algebroid")
    k = alpha.degree
    comps = {}
    for I in itertools.combinations(range(A.rank), k + 1):
        acc = Poly.zero(A.nvars)
        for r, a in enumerate(I):
            rest = I[:r] + I[r + 1:]
            c = alpha.comps.get(rest)
            if c:
                acc = acc + A.rho(a, c).scale(-1 if r % 2 else 1)
        for r, s in itertools.combinations(range(k + 1), 2):
            rest = I[:r] + I[r + 1:s] + I[s + 1:]
            sign = -1 if (r + s) % 2 else 1
            for m in range(A.rank):
                c = A.struct[I[r]][I[s]][m]
                if c:
                    val = alpha.coefficient((m,) + rest)
                    if val:
                        acc = acc + (c * val).scale(sign)
        if acc:
            comps[I] = acc
    return alt(A, k + 1, comps)


def _pair_bracket(A: AlgebroidData, f: Poly, a: int, g: Poly, b: int) -> list[tuple[Poly, int]]:
    """``[f e_a, g e_b]`` as (coefficient, frame index) pairs."""
    out = [(f * A.rho(a, g), b), (-(g * A.rho(b, f)), a)]
    fg = f * g
    for m in range(A.rank):
        c = A.struct[a][b][m]
        if c:
            out.append((fg * c, m))
    return out


def gerstenhaber(A: AlgebroidData, P: Alternating, Q: Alternating) -> Alternating:
    """Bracket on multivectors over ``A`` by the pairwise expansion over wedge factors.

    Each component ``f e_{i0}∧…∧e_{ik}`` is read as ``(f e_{i0}) ∧ e_{i1} ∧ …``;
    functions pair with sections through ``⟦a, f⟧ = ρ(a) f = −⟦f, a⟧``.
    """
    n = A.nvars
    one = Poly.one(n)
    p, q = P.degree, Q.degree
    comps: dict[tuple, Poly] = {}

    def put(seq, t):
        sign, K = sort_sign(seq)
        if sign and t:
            t = t.scale(sign)
            comps[K] = comps[K] + t if K in comps else t

    for I, f in P.comps.items():
        for J, g in Q.comps.items():
            if p == 0 and q == 0:
                continue
            if q == 0:
                for r, a in enumerate(I):
                    put(I[:r] + I[r + 1:], (f * A.rho(a, g)).scale((-1) ** (p - 1 - r)))
                continue
            if p == 0:
                for r, b in enumerate(J):
                    put(J[:r] + J[r + 1:], (g * A.rho(b, f)).scale(-((-1) ** (q - 1)) * (-1) ** (q - 1 - r)))
                continue
            for r, a in enumerate(I):
                fr, rest_f = (f, one) if r == 0 else (one, f)
                for s, b in enumerate(J):
                    gs, rest_g = (g, one) if s == 0 else (one, g)
                    tail = I[:r] + I[r + 1:] + J[:s] + J[s + 1:]
                    sign = (-1) ** (r + s)
                    for coeff, d in _pair_bracket(A, fr, a, gs, b):
                        if coeff:
                            put((d,) + tail, (coeff * rest_f * rest_g).scale(sign))
    return alt(A, max(p + q - 1, 0), comps)


def alt_class(space: ConSpace, slot_classes: Sequence[SlotClass], t: Alternating, flavor: str) -> FnClass:
    items = list(t.comps.items())
    return classify_components(space, [tuple_class(slot_classes, I, flavor) for I, _ in items], [c for _, c in items])


def reduce_alt(space: ConSpace, slot_classes: Sequence[SlotClass], t: Alternating, flavor: str = "strong") -> Alternating:
    """Keep tuples with all slots in W∖N and reduce the coefficients."""
    if not alt_class(space, slot_classes, t, flavor).in_W:
        raise NotInWobs("tensor is not in the W-component")
    keep = [i for i, c in enumerate(slot_classes) if c is SlotClass.WOBS_ONLY]
    pos = {i: r for r, i in enumerate(keep)}
    comps = {}
    for I, c in t.comps.items():
        if all(i in pos for i in I):
            comps[tuple(pos[i] for i in I)] = fn_reduce(space, c)
    return Alternating(space.d_red, len(keep), t.degree, comps)


# ---------------------------------------------------------------------------
# morphisms


def _pullback(phi: BundleMorphism, g: Poly) -> Poly:
    return phi.pullback(g)


def check_morphism(phi: BundleMorphism, A: AlgebroidData, B: AlgebroidData) -> Report:
    """Anchor square and the bracket condition under the matrix decomposition of ``Φ̂``."""
    if phi.source != A.bundle or phi.target != B.bundle:
        raise ShapeMismatch("morphism does not connect the given algebroids")
    chk = check_bundle_morphism(phi)
    if not chk.ok:
        raise NotBundleMorphism("; ".join(chk.witnesses))
    src = A.base
    n = src.dT
    failures = []
    kA, kB = A.rank, B.rank
    pulled_anchor = [[_pullback(phi, B.anchor[r][l]) for l in range(kB)] for r in range(B.nvars)]
    for i in range(kA):
        for r in range(B.nvars):
            lhs = Poly.zero(n)
            for j in range(n):
                lhs = lhs + phi.base_map[r].partial(j) * A.anchor[j][i]
            rhs = Poly.zero(n)
            for l in range(kB):
                rhs = rhs + pulled_anchor[r][l] * phi.matrix[l][i]
            if lhs != rhs:
                failures.append(f"anchor square fails on e{i + 1}, component {r + 1}: {lhs} != {rhs}")
    pulled_struct = [[[_pullback(phi, B.struct[p][q][l]) for l in range(kB)] for q in range(kB)] for p in range(kB)]
    M = phi.matrix
    for i, j in itertools.combinations(range(kA), 2):
        for l in range(kB):
            lhs = Poly.zero(n)
            for m in range(kA):
                if A.struct[i][j][m]:
                    lhs = lhs + A.struct[i][j][m] * M[l][m]
            rhs = A.rho(i, M[l][j]) - A.rho(j, M[l][i])
            for p in range(kB):
                for q in range(kB):
                    c = pulled_struct[p][q][l]
                    if c and M[p][i] and M[q][j]:
                        rhs = rhs + M[p][i] * M[q][j] * c
            if lhs != rhs:
                failures.append(f"bracket condition fails on (e{i + 1}, e{j + 1}), component {l + 1}: {lhs} != {rhs}")
    return _report(failures)


def check_comorphism(phi: BundleMorphism, A: AlgebroidData, B: AlgebroidData) -> Report:
    """``Φ: B* → A*`` along ``φ: N → M``; the dual map on sections must be Lie–Rinehart.

    The dual map sends ``e_i`` to ``Σ_j Φ[i][j] f_j``.
    """
    if phi.source.rank != B.rank or phi.target.rank != A.rank:
        raise ShapeMismatch("comorphism ranks do not match the algebroids")
    if phi.source.base != B.base or phi.target.base != A.base:
        raise ShapeMismatch("comorphism bases do not match the algebroids")
    chk = check_bundle_morphism(phi)
    if not chk.ok:
        raise NotBundleMorphism("; ".join(chk.witnesses))
    failures = []
    kA = A.rank
    image = [tuple(phi.matrix[i]) for i in range(kA)]
    for i in range(kA):
        for r in range(A.nvars):
            lhs = B.act(image[i], phi.base_map[r])
            rhs = phi.pullback(A.anchor[r][i])
            if lhs != rhs:
                failures.append(f"anchor condition fails on e{i + 1} against x{r + 1}: {lhs} != {rhs}")
    for i, j in itertools.combinations(range(kA), 2):
        lhs = [Poly.zero(B.nvars) for _ in range(B.rank)]
        for m in range(kA):
            c = A.struct[i][j][m]
            if c:
                pc = phi.pullback(c)
                lhs = [x + pc * y for x, y in zip(lhs, image[m])]
        rhs = B.bracket(image[i], image[j])
        if tuple(lhs) != tuple(rhs):
            failures.append(f"bracket not preserved on (e{i + 1}, e{j + 1})")
    return _report(failures)


def tangent_morphism(source: ConSpace, target: ConSpace, base_map: Sequence[Poly]) -> BundleMorphism:
    """``Tφ`` as a bundle morphism between tangent bundles."""
    mat = [[base_map[r].partial(j) for j in range(source.dT)] for r in range(target.dT)]
    return BundleMorphism(tangent_bundle(source), tangent_bundle(target), tuple(base_map), mat)


# ---------------------------------------------------------------------------
# bialgebroids


@dataclass(frozen=True)
class BialgebroidData:
    A: AlgebroidData
    Astar: AlgebroidData

    def __post_init__(self):
        if self.A.base != self.Astar.base:
            raise ShapeMismatch("bialgebroid constituents over different bases")
        if self.Astar.bundle.slot_classes != bundle_construct("dual", self.A.bundle).slot_classes:
            raise ShapeMismatch("second constituent must live on the dual bundle")


def check_bialgebroid(B: BialgebroidData) -> Report:
    """Compatibility of the dual differential with the bracket on generators of degree ≤ 1."""
    for name, X in (("A", B.A), ("A*", B.Astar)):
        try:
            rep = check_constraint(X)
        except ClassicalAxiomsFail as exc:
            raise ConstituentFails(f"{name}: {exc}") from None
        if not rep:
            raise ConstituentFails(f"{name}: " + "; ".join(rep.failures))
    A, D = B.A, B.Astar
    n, k = A.nvars, A.rank
    gens = [(f"x{r + 1}", alt(A, 0, {(): Poly.var(n, r)})) for r in range(n)]
    gens += [(f"e{i + 1}", alt(A, 1, {(i,): Poly.one(n)})) for i in range(k)]
    failures = []
    for (na, a), (nb, b) in itertools.product(gens, repeat=2):
        if a.degree == 0 and b.degree == 0:
            lhs = alt(A, 0)
        else:
            lhs = koszul(D, gerstenhaber(A, a, b))
        t1 = gerstenhaber(A, koszul(D, a), b)
        t2 = gerstenhaber(A, a, koszul(D, b))
        rhs = t1 + t2 if a.degree % 2 else t1 - t2
        if lhs != rhs:
            failures.append(f"compatibility fails on ({na}, {nb})")
    return _report(failures)


# ---------------------------------------------------------------------------
# reduction


def reduce_algebroid(A: AlgebroidData) -> AlgebroidData:
    _require_checks(A)
    space = A.base
    keep = A.bundle.slots_of(SlotClass.WOBS_ONLY)
    rows = list(space.transverse)
    anchor = [[fn_reduce(space, A.anchor[r][i]) for i in keep] for r in rows]
    struct = [[[fn_reduce(space, A.struct[i][j][m]) for m in keep] for j in keep] for i in keep]
    return AlgebroidData(reduce_bundle(A.bundle), anchor, struct)


def reduce_algebroid_morphism(phi: BundleMorphism) -> BundleMorphism:
    from .cgeo import reduce_morphism

    return reduce_morphism(phi)
