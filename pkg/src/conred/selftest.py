"""The acceptance suite as plain functions with fixed seeds.

Each ``criterion_*`` returns ``(name, passed, detail)``; :func:`run_all`
collects them.  Everything is exact; nothing is sampled with tolerance.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable

from . import calg
from .algd import (
    Alternating,
    check_classical,
    koszul,
    lie_algebra_algebroid,
    reduce_algebroid,
    reduce_alt,
    tangent_algebroid,
)
from .cartan import (
    KForm,
    MultiVector,
    de_rham,
    form_class,
    insertion,
    lie_derivative,
    reduce_field,
    reduce_form,
    reduce_mv,
    schouten,
    vf_bracket,
)
from .cgeo import (
    ClassedSection,
    ConSpace,
    TrivBundle,
    bundle_construct,
    check_bundle_morphism,
    fn_reduce,
    reduce_bundle,
    reduce_section,
    reduction_commutes,
    section_module_op,
    trivial_bundle,
)
from .cindex import ConIndexSet, all_index_sets, combine
from .dirac import (
    DiracGraph,
    check_poisson,
    cotangent_algebroid,
    dirac_check,
    poisson,
    presymplectic,
    reduce_poisson,
)
from .poly import Poly
from . import randgen as rg

Result = tuple[str, bool, str]


# ---------------------------------------------------------------------------
# 1. index sets


def _index_sets_up_to(n: int):
    for k in range(n + 1):
        yield from all_index_sets(tuple(range(k)))


def criterion_index_sets() -> Result:
    name = "index-set laws"
    singles = pairs = 0
    for M in _index_sets_up_to(5):
        singles += 1
        if combine("dual", combine("dual", M)) != M:
            return name, False, f"dual(dual(M)) != M for {M}"
        if combine("reduce", combine("dual", M)) != combine("reduce", M):
            return name, False, f"reduce(dual(M)) != reduce(M) for {M}"
    for M, N in itertools.product(list(_index_sets_up_to(3)), repeat=2):
        pairs += 1
        prod = tuple(itertools.product(combine("reduce", M), combine("reduce", N)))
        for kind in ("tensor", "strong_tensor"):
            if set(combine("reduce", combine(kind, M, N))) != set(prod):
                return name, False, f"reduce({kind}) is not the product for {M}, {N}"
        dM, dN = combine("dual", M), combine("dual", N)
        if combine("dual", combine("tensor", M, N)) != combine("strong_tensor", dM, dN):
            return name, False, f"dual(tensor) != strong_tensor(duals) for {M}, {N}"
        if combine("dual", combine("strong_tensor", M, N)) != combine("tensor", dM, dN):
            return name, False, f"dual(strong_tensor) != tensor(duals) for {M}, {N}"
    return name, True, f"{singles} index sets, {pairs} pairs"


# ---------------------------------------------------------------------------
# 2. canonical isomorphisms


ISOS = ("hom_as_strong_tensor", "dual_of_tensor", "dual_of_strong_tensor", "hom_adjunction")


def criterion_canonical_isos(trials: int = 200, seed: int = 2) -> Result:
    name = "canonical isomorphisms"
    rng = random.Random(seed)
    for t in range(trials):
        E, F = rg.rand_flag(rng, rng.randint(0, 4)), rg.rand_flag(rng, rng.randint(0, 4))
        G = rg.rand_flag(rng, rng.randint(0, 3))
        for which in ISOS:
            if which == "hom_adjunction":
                E3, F3 = rg.rand_flag(rng, rng.randint(0, 3)), rg.rand_flag(rng, rng.randint(0, 3))
                phi = calg.canonical_iso(which, E3, F3, G)
            else:
                phi = calg.canonical_iso(which, E, F)
            c = calg.classify_morphism(phi)
            direct = calg.is_iso_direct(phi)
            if not (c.iso and direct and c.mono and c.regular_epi and c.regular_mono and c.epi):
                return name, False, f"trial {t}: {which} is not an isomorphism ({c})"
            if c.iso != (c.mono and c.regular_epi) or c.iso != (c.regular_mono and c.epi):
                return name, False, f"trial {t}: iso characterizations disagree for {which}"
    return name, True, f"{trials} random flag configurations, {len(ISOS)} maps each"


# ---------------------------------------------------------------------------
# 3. non-compatibility of reduction with tensor products over an algebra

EXPECTED_LHS = 2
EXPECTED_RHS = 1


def tensor_reduction_dims() -> tuple[int, int]:
    A = calg.gaussian_rationals()
    E = calg.regular_module(A, W=((1, 0), (0, 1)), N=())
    lhs = calg.reduce(calg.construct("tensor", E, E)).dim
    rE = calg.reduce(E)
    rhs = calg.construct("tensor", rE, rE).dim
    return lhs, rhs


def criterion_tensor_counterexample() -> Result:
    name = "tensor reduction counterexample"
    lhs, rhs = tensor_reduction_dims()
    ok = lhs == EXPECTED_LHS and rhs == EXPECTED_RHS
    return name, ok, f"dim reduce(E (x)_A E) = {lhs} (expected {EXPECTED_LHS}), " \
                     f"dim reduce(E) (x) reduce(E) = {rhs} (expected {EXPECTED_RHS})"


# ---------------------------------------------------------------------------
# 4. Cartan calculus


def criterion_cartan(trials: int = 100, seed: int = 4) -> Result:
    name = "Cartan calculus"
    rng = random.Random(seed)
    for t in range(trials):
        s = rg.rand_space(rng, 4)
        k = rng.randint(0, min(3, s.dT))
        w = rg.rand_form(rng, s, k, rng.choice(("tensor", "strong")), degree=3)
        if not de_rham(de_rham(w)).is_zero():
            return name, False, f"trial {t}: d^2 != 0"
        if k >= 1:
            X = rg.rand_field(rng, s, wobs=False, degree=3)
            if lie_derivative(X, w) != insertion(X, de_rham(w)) + de_rham(insertion(X, w)):
                return name, False, f"trial {t}: magic formula fails"
        kk = rng.randint(0, min(2, s.dT))
        wW = rg.rand_form(rng, s, kk, "strong", "W", degree=3)
        wN = rg.rand_form(rng, s, kk, "strong", "N", degree=3)
        if not (form_class(wW).in_W and form_class(wN).in_N):
            return name, False, f"trial {t}: generator produced a misclassified form"
        if not form_class(de_rham(wW)).in_W or not form_class(de_rham(wN)).in_N:
            return name, False, f"trial {t}: d does not preserve the flags in strong flavor"
    s = ConSpace(2, 1, 1)
    alpha = KForm(s, 1, {(1,): Poly.var(2, 0)}, "tensor")
    a, da = form_class(alpha), form_class(de_rham(alpha))
    if not (a.in_N and not da.in_N):
        return name, False, f"witness: alpha in_N={a.in_N}, d alpha in_N={da.in_N}"
    return name, True, f"{trials} random forms; witness x1 dx2 has d(alpha) = dx1^dx2 outside N in tensor flavor"


# ---------------------------------------------------------------------------
# 5. coisotropic Poisson reduction


def canonical_pi() -> MultiVector:
    s = ConSpace(4, 3, 1)
    one = Poly.one(4)
    return MultiVector(s, 2, {(1, 2): one, (0, 3): one})


def criterion_poisson() -> Result:
    name = "coisotropic Poisson reduction"
    P = poisson(canonical_pi())
    if not check_poisson(P):
        return name, False, "canonical pi fails check_poisson"
    red = reduce_poisson(P)
    expected = MultiVector(ConSpace(2, 2, 0), 2, {(0, 1): Poly.one(2)})
    if red.pi != expected or not schouten(red.pi, red.pi).is_zero():
        return name, False, f"reduced to {red.pi!r}"
    bad = MultiVector(ConSpace(4, 3, 1), 2, {(1, 2): Poly.var(4, 0)})
    rep = check_poisson(poisson(bad))
    if rep.ok or not any("W-component" in f for f in rep.failures):
        return name, False, "negative control x1 d2^d3 was not rejected by the class check"
    return name, True, "reduces to d1^d2 on R^2; x1 d2^d3 rejected"


# ---------------------------------------------------------------------------
# 6. algebroid differentials


def so3(perturbed: bool = False):
    pt = ConSpace(0, 0, 0)
    table = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}
    if perturbed:
        table[(0, 1, 0)] = 1
    return lie_algebra_algebroid(trivial_bundle(pt, 3, 3, 0), table)


def koszul_square_witness(A) -> tuple | None:
    for k in range(A.rank + 1):
        for I in itertools.combinations(range(A.rank), k):
            a = Alternating(A.nvars, A.rank, k, {I: Poly.one(A.nvars)})
            dd = koszul(A, koszul(A, a))
            if not dd.is_zero():
                return I, dd
    return None


def criterion_algebroids(seed: int = 6) -> Result:
    name = "algebroid differentials"
    rng = random.Random(seed)
    s = ConSpace(3, 2, 1)
    TA = tangent_algebroid(s)
    for t in range(30):
        k = rng.randint(0, 3)
        a = Alternating(3, 3, k, rg.rand_form(rng, s, k, degree=2).comps)
        if not koszul(TA, koszul(TA, a)).is_zero():
            return name, False, "koszul^2 != 0 on the tangent algebroid"
    if koszul_square_witness(so3()) is not None:
        return name, False, "koszul^2 != 0 for so(3)"
    w = koszul_square_witness(so3(perturbed=True))
    if w is None:
        return name, False, "perturbed so(3) has koszul^2 = 0"
    for t in range(60):
        k = rng.randint(0, 2)
        form = rg.rand_form(rng, s, k, degree=2)
        if koszul(TA, Alternating(3, 3, k, form.comps)).comps != de_rham(form).comps:
            return name, False, f"trial {t}: koszul != de_rham"
    I, dd = w
    return name, True, f"perturbed so(3): d^2(e^{','.join(str(i + 1) for i in I)}) = {dd!r}"


# ---------------------------------------------------------------------------
# 7. reduction functoriality


def linear_pi() -> MultiVector:
    s = ConSpace(4, 3, 1)
    return MultiVector(s, 2, {(1, 2): Poly.var(4, 1)})


def _functoriality_trial(rng: random.Random) -> str | None:
    s = rg.rand_space(rng, 4)
    k1, k2 = rng.randint(0, min(2, s.dT)), rng.randint(0, min(2, s.dT))
    w1 = rg.rand_form(rng, s, k1, "strong", "W")
    w2 = rg.rand_form(rng, s, k2, "strong", "W")
    X, Y = rg.rand_field(rng, s), rg.rand_field(rng, s)
    rX, rY, r1, r2 = reduce_field(X), reduce_field(Y), reduce_form(w1), reduce_form(w2)
    if reduce_form(de_rham(w1)) != de_rham(r1):
        return "d"
    if k1 and reduce_form(insertion(X, w1)) != insertion(rX, r1):
        return "insertion"
    if reduce_form(lie_derivative(X, w1)) != lie_derivative(rX, r1):
        return "Lie derivative"
    if reduce_form(w1.wedge(w2)) != r1.wedge(r2):
        return "wedge"
    if reduce_field(vf_bracket(X, Y)) != vf_bracket(rX, rY):
        return "vector field bracket"
    P = rg.rand_multivector(rng, s, k1, "strong", "W")
    Q = rg.rand_multivector(rng, s, k2, "strong", "W")
    if k1 + k2 >= 1 and reduce_mv(schouten(P, Q)) != schouten(reduce_mv(P), reduce_mv(Q)):
        return "Schouten bracket"
    E = TrivBundle(s, rg.rand_classes(rng, rng.randint(1, 3)))
    F = TrivBundle(s, rg.rand_classes(rng, rng.randint(1, 3)))
    for kind in ("dsum", "tensor", "strong_tensor", "hom"):
        if reduce_bundle(bundle_construct(kind, E, F)).rank_triple() != \
                bundle_construct(kind, reduce_bundle(E), reduce_bundle(F)).rank_triple():
            return f"bundle {kind}"
    if reduce_bundle(bundle_construct("dual", E)).rank_triple() != \
            bundle_construct("dual", reduce_bundle(E)).rank_triple():
        return "bundle dual"
    a, b = rg.rand_section(rng, E), rg.rand_section(rng, F)
    ra, rb = reduce_section(a), reduce_section(b)
    for kind in ("dsum", "tensor", "strong_tensor"):
        if reduce_section(section_module_op(kind, a, b)).components != section_module_op(kind, ra, rb).components:
            return f"section {kind}"
    dual = bundle_construct("dual", E)
    alpha = rg.rand_section(rng, dual)
    if fn_reduce(s, section_module_op("dual_pair", alpha, a)) != \
            section_module_op("dual_pair", reduce_section(alpha), ra):
        return "dual pairing"
    TA = tangent_algebroid(s)
    rTA = reduce_algebroid(TA)
    if reduce_field(ClassedSection(X.bundle, TA.bracket(X.components, Y.components))).components != \
            rTA.bracket(rX.components, rY.components):
        return "algebroid bracket"
    if reduce_alt(s, s.cotangent_classes(), koszul(TA, Alternating(s.dT, s.dT, k1, w1.comps))) != \
            koszul(rTA, reduce_alt(s, s.cotangent_classes(), Alternating(s.dT, s.dT, k1, w1.comps))):
        return "algebroid differential"
    return None


def criterion_functoriality(trials: int = 100, seed: int = 7) -> Result:
    name = "reduction functoriality"
    rng = random.Random(seed)
    for t in range(trials):
        bad = _functoriality_trial(rng)
        if bad:
            return name, False, f"trial {t}: reduction does not commute with {bad}"
    for label, pi in (("canonical", canonical_pi()), ("linear", linear_pi())):
        P = poisson(pi)
        if reduce_algebroid(cotangent_algebroid(P)) != cotangent_algebroid(reduce_poisson(P)):
            return name, False, f"cotangent algebroid of the {label} pi does not reduce correctly"
    return name, True, f"{trials} random trials; cotangent algebroids of canonical and linear pi"


# ---------------------------------------------------------------------------
# 8. Dirac oracle agreement


def _rand_structure(rng: random.Random):
    s = rg.rand_space(rng, 3, 2)
    pairs = list(itertools.combinations(range(s.dT), 2))
    comps = {}
    for I in pairs:
        r = rng.random()
        if r < 0.4:
            comps[I] = rg.rand_poly(rng, s.dT, 2, 2)
        elif r < 0.7:
            comps[I] = Poly.const(s.dT, rng.randint(-2, 2))
    cls = MultiVector if rng.random() < 0.5 else KForm
    return cls(s, 2, comps, "strong")


def criterion_dirac(trials: int = 50, seed: int = 8) -> Result:
    name = "Dirac oracle agreement"
    rng = random.Random(seed)
    counts = {True: 0, False: 0}
    for t in range(trials):
        obj = _rand_structure(rng)
        L = DiracGraph.of(poisson(obj) if isinstance(obj, MultiVector) else presymplectic(obj))
        rep = dirac_check(L)
        oracle_class = (check_poisson(L.data).ok if L.kind == "bivector"
                        else de_rham(obj).is_zero() and form_class(obj).in_W)
        if rep.involutive != rep.oracle_involutive or rep.ok != oracle_class or not rep.lagrangian:
            return name, False, f"trial {t}: frame verdict {rep} disagrees with the oracle"
        counts[rep.ok] += 1
    return name, True, f"{trials} structures, {counts[True]} pass and {counts[False]} fail, all in agreement"


# ---------------------------------------------------------------------------
# 9. flat connection condition


def criterion_connection(trials: int = 50, seed: int = 9) -> Result:
    name = "flat connection condition"
    rng = random.Random(seed)
    seen = {True: 0, False: 0}
    for t in range(trials):
        dT = rng.randint(2, 4)
        dW = rng.randint(1, dT)
        dN = rng.randint(1, dW)
        s = ConSpace(dT, dW, dN)
        classes = list(rg.rand_classes(rng, rng.randint(1, 3)))
        classes[rng.randrange(len(classes))] = rg.SlotClass.WOBS_ONLY
        E = TrivBundle(s, tuple(classes))
        phi = rg.rand_constraint_morphism(rng, E, flat=rng.random() < 0.5)
        chk = check_bundle_morphism(phi)
        if not (chk.base_ok and chk.fiber_ok):
            return name, False, f"trial {t}: generator broke the base or fiber condition"
        sections = [ClassedSection.basis(E, i) for i in range(E.rank) if classes[i].in_w]
        sections += [rg.rand_section(rng, E) for _ in range(3)]
        commutes = reduction_commutes(phi, sections)
        if commutes != chk.connection_ok:
            return name, False, f"trial {t}: connection_ok={chk.connection_ok} but commutes={commutes}"
        seen[chk.connection_ok] += 1
    return name, True, f"{trials} morphisms ({seen[True]} flat, {seen[False]} not), verdicts agree"


CRITERIA: list[Callable[[], Result]] = [
    criterion_index_sets,
    criterion_canonical_isos,
    criterion_tensor_counterexample,
    criterion_cartan,
    criterion_poisson,
    criterion_algebroids,
    criterion_functoriality,
    criterion_dirac,
    criterion_connection,
]


def run_all() -> list[Result]:
    out = []
    for fn in CRITERIA:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failed criterion, reported with its cause
            out.append((fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out
