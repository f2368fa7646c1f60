"""Poisson and presymplectic graphs on the flat model and their reduction.

Sections of ``TM ⊕ T*M`` are pairs ``(vector field, 1-form)``.  A graph is
involutive when the Courant bracket of any two frame sections lands back in
the graph; the failure is measured by an explicit residual.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .algd import AlgebroidData, Report, _report
from .cartan import (
    EndField,
    KForm,
    MultiVector,
    apply_field,
    courant,
    de_rham,
    end_class,
    form_class,
    insertion,
    is_nijenhuis,
    lie_derivative,
    mv_class,
    reduce_end,
    reduce_form,
    reduce_mv,
    schouten,
    vector_field,
    vf_bracket,
)
from .cgeo import ClassedSection, ConSpace, cotangent_bundle
from .errors import CheckFails, MalformedInput
from .exact import Subspace
from .poly import Poly


def _require_bivector(pi: MultiVector) -> None:
    if not isinstance(pi, MultiVector) or pi.degree != 2:
        raise MalformedInput("a Poisson structure is a degree-2 multivector")


def _require_twoform(omega: KForm) -> None:
    if not isinstance(omega, KForm) or omega.degree != 2:
        raise MalformedInput("a presymplectic structure is a 2-form")


@dataclass(frozen=True)
class PoissonData:
    space: ConSpace
    pi: MultiVector

    def __post_init__(self):
        _require_bivector(self.pi)
        if self.pi.space != self.space:
            raise MalformedInput("bivector lives on another space")

    def entry(self, i: int, j: int) -> Poly:
        """``π^{ij} = π(dx^i, dx^j)``."""
        return self.pi.coefficient((i, j))

    def sharp_matrix(self) -> list[list[Poly]]:
        """Column ``i`` is ``π♯(dx^i) = Σ_j π^{ij} ∂_j``."""
        n = self.space.dT
        return [[self.entry(i, j) for i in range(n)] for j in range(n)]

    def sharp(self, alpha: KForm) -> ClassedSection:
        n = self.space.dT
        comps = []
        for j in range(n):
            acc = Poly.zero(n)
            for i in range(n):
                a = alpha.coefficient((i,))
                e = self.entry(i, j)
                if a and e:
                    acc = acc + a * e
            comps.append(acc)
        return vector_field(self.space, comps)

    def pair(self, alpha: KForm, beta: KForm) -> Poly:
        """``π(α, β)``."""
        n = self.space.dT
        out = Poly.zero(n)
        for i in range(n):
            for j in range(n):
                a, b, e = alpha.coefficient((i,)), beta.coefficient((j,)), self.entry(i, j)
                if a and b and e:
                    out = out + a * b * e
        return out


@dataclass(frozen=True)
class PresymplecticData:
    space: ConSpace
    omega: KForm

    def __post_init__(self):
        _require_twoform(self.omega)
        if self.omega.space != self.space:
            raise MalformedInput("form lives on another space")

    def flat(self, X: ClassedSection) -> KForm:
        """``ω♭(X) = i_X ω``."""
        return insertion(X, self.omega)


def poisson(pi: MultiVector) -> PoissonData:
    return PoissonData(pi.space, pi)


def presymplectic(omega: KForm) -> PresymplecticData:
    return PresymplecticData(omega.space, omega)


# ---------------------------------------------------------------------------
# checks and reduction


def check_poisson(P: PoissonData) -> Report:
    failures = []
    jac = schouten(P.pi, P.pi)
    if not jac.is_zero():
        failures.append(f"[pi, pi] = {jac!r}")
    if not mv_class(P.pi).in_W:
        failures.append("pi is not in the W-component")
    return _report(failures)


def check_presymplectic(Q: PresymplecticData) -> Report:
    failures = []
    d = de_rham(Q.omega)
    if not d.is_zero():
        failures.append(f"d omega = {d!r}")
    if not form_class(Q.omega).in_W:
        failures.append("omega is not in the W-component")
    return _report(failures)


def reduce_poisson(P: PoissonData) -> PoissonData:
    rep = check_poisson(P)
    if not rep:
        raise CheckFails("; ".join(rep.failures))
    red = reduce_mv(P.pi)
    assert schouten(red, red).is_zero()
    return PoissonData(red.space, red)


def reduce_presymplectic(Q: PresymplecticData) -> PresymplecticData:
    rep = check_presymplectic(Q)
    if not rep:
        raise CheckFails("; ".join(rep.failures))
    red = reduce_form(Q.omega)
    assert de_rham(red).is_zero()
    return PresymplecticData(red.space, red)


def cotangent_algebroid(P: PoissonData) -> AlgebroidData:
    """``T*M`` with anchor ``π♯`` and ``c^m_ij = ∂_m π^{ij}``."""
    rep = check_poisson(P)
    if not rep:
        raise CheckFails("; ".join(rep.failures))
    n = P.space.dT
    struct = [[[P.entry(i, j).partial(m) for m in range(n)] for j in range(n)] for i in range(n)]
    return AlgebroidData(cotangent_bundle(P.space), P.sharp_matrix(), struct)


def cotangent_bracket(P: PoissonData, alpha: KForm, beta: KForm) -> KForm:
    """``L_{α♯} β − L_{β♯} α − d(π(α, β))`` computed with the Cartan operations."""
    a, b = P.sharp(alpha), P.sharp(beta)
    f = KForm.function(P.space, P.pair(alpha, beta), alpha.flavor)
    return lie_derivative(a, beta) - lie_derivative(b, alpha) - de_rham(f)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class DiracGraph:
    """Graph of a bivector (``kind == "bivector"``) or of a 2-form (``kind == "twoform"``)."""

    kind: str
    data: object

    def __post_init__(self):
        if self.kind == "bivector" and not isinstance(self.data, PoissonData):
            raise MalformedInput("bivector graph needs Poisson data")
        if self.kind == "twoform" and not isinstance(self.data, PresymplecticData):
            raise MalformedInput("2-form graph needs presymplectic data")
        if self.kind not in ("bivector", "twoform"):
            raise MalformedInput(f"unknown graph kind {self.kind!r}")

    @property
    def space(self) -> ConSpace:
        return self.data.space

    @classmethod
    def of(cls, obj) -> DiracGraph:
        if isinstance(obj, PoissonData):
            return cls("bivector", obj)
        if isinstance(obj, PresymplecticData):
            return cls("twoform", obj)
        if isinstance(obj, MultiVector):
            return cls("bivector", poisson(obj))
        if isinstance(obj, KForm):
            return cls("twoform", presymplectic(obj))
        raise MalformedInput("graphs are built from bivectors or 2-forms")


Pair = tuple  # (ClassedSection, KForm)


def frame(L: DiracGraph) -> list[Pair]:
    s = L.space
    n = s.dT
    out = []
    for i in range(n):
        if L.kind == "bivector":
            dx = KForm.basis(s, (i,))
            out.append((L.data.sharp(dx), dx))
        else:
            d = vector_field(s, [Poly.const(n, int(j == i)) for j in range(n)])
            # the Courant bracket is taken in the strong flavor
            out.append((d, KForm(s, 1, L.data.flat(d).comps, "strong")))
    return out


def pairing(u: Pair, v: Pair) -> Poly:
    """``α(Y) + β(X)`` for ``u = (X, α)``, ``v = (Y, β)``."""
    (X, a), (Y, b) = u, v
    return _eval1(a, Y) + _eval1(b, X)


def _eval1(alpha: KForm, X: ClassedSection) -> Poly:
    out = Poly.zero(alpha.space.dT)
    for (i,), c in alpha.comps.items():
        x = X.components[i]
        if x:
            out = out + c * x
    return out


def residual(L: DiracGraph, u: Pair) -> tuple[Poly, ...]:
    """Zero exactly when ``u`` is a section of the graph."""
    X, theta = u
    s = L.space
    if L.kind == "bivector":
        image = L.data.sharp(theta)
        return tuple(a - b for a, b in zip(X.components, image.components))
    image = L.data.flat(X)
    n = s.dT
    return tuple(theta.coefficient((i,)) - image.coefficient((i,)) for i in range(n))


@dataclass(frozen=True)
class DiracReport:
    lagrangian: bool
    involutive: bool
    classes_ok: bool
    oracle_involutive: bool
    witnesses: tuple = ()

    @property
    def ok(self) -> bool:
        return self.lagrangian and self.involutive and self.classes_ok

    def __bool__(self) -> bool:
        return self.ok


def dirac_check(L: DiracGraph, samples: int = 10, seed: int = 0) -> DiracReport:
    """Lagrangian, involutive and W-classed, with the closedness oracle recorded alongside."""
    fr = frame(L)
    witnesses = []
    lag = True
    for a, b in itertools.combinations_with_replacement(range(len(fr)), 2):
        p = pairing(fr[a], fr[b])
        if p:
            lag = False
            witnesses.append(f"pairing of frame sections {a + 1},{b + 1} is {p}")
    if lag and not sample_lagrangian(L, samples, seed):
        lag = False
        witnesses.append("frame is not its own perpendicular at a sample point")
    inv = True
    for a, b in itertools.combinations(range(len(fr)), 2):
        X, al = fr[a]
        Y, be = fr[b]
        br = courant(X, al, Y, be)
        res = residual(L, br)
        if any(res):
            inv = False
            witnesses.append(f"Courant bracket of frame sections {a + 1},{b + 1} leaves the graph: "
                             f"{[str(r) for r in res]}")
    if L.kind == "bivector":
        oracle = schouten(L.data.pi, L.data.pi).is_zero()
        classes = mv_class(L.data.pi).in_W
    else:
        oracle = de_rham(L.data.omega).is_zero()
        classes = form_class(L.data.omega).in_W
    if not classes:
        witnesses.append("underlying tensor is not in the W-component")
    return DiracReport(lag, inv, classes, oracle, tuple(witnesses))


def sample_points_on_C(space: ConSpace, count: int, seed: int = 0) -> list[tuple[Fraction, ...]]:
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(space.dW)]
        pts.append(tuple(pt + [Fraction(0)] * (space.dT - space.dW)))
    return pts


def sample_lagrangian(L: DiracGraph, count: int = 10, seed: int = 0) -> bool:
    """At each sample point the frame spans a subspace equal to its own perpendicular."""
    n = L.space.dT
    fr = frame(L)
    # pairing matrix [[0, I], [I, 0]] on (vector, covector) coordinates
    for pt in sample_points_on_C(L.space, count, seed):
        rows = []
        for X, a in fr:
            rows.append([c.eval(pt) for c in X.components] + [a.coefficient((i,)).eval(pt) for i in range(n)])
        span = Subspace(2 * n, rows)
        if span.dim != n:
            return False
        swapped = Subspace(2 * n, [r[n:] + r[:n] for r in span.basis])
        if swapped.annihilator() != span:
            return False
    return True


def dirac_reduce(L: DiracGraph) -> DiracGraph:
    rep = dirac_check(L)
    if not rep:
        raise CheckFails("; ".join(rep.witnesses))
    if L.kind == "bivector":
        out = DiracGraph("bivector", reduce_poisson(L.data))
    else:
        out = DiracGraph("twoform", reduce_presymplectic(L.data))
    assert dirac_check(out).ok
    return out


# ---------------------------------------------------------------------------
# Poisson–Nijenhuis


@dataclass(frozen=True)
class PNData:
    pi: PoissonData
    A: EndField

    def __post_init__(self):
        if self.A.space != self.pi.space:
            raise MalformedInput("Poisson and Nijenhuis data on different spaces")


def _lie_end(Y: ClassedSection, A: EndField, X: ClassedSection) -> ClassedSection:
    """``(L_Y A) X = [Y, AX] − A[Y, X]``."""
    a = vf_bracket(Y, A.apply(X))
    b = A.apply(vf_bracket(Y, X))
    return vector_field(A.space, [p - q for p, q in zip(a.components, b.components)])


def schouten_invariant(S: PNData, i: int, j: int, k: int) -> Poly:
    """``C_{π,A}(dx^i, ∂_j, dx^k)``."""
    P, A = S.pi, S.A
    s = P.space
    n = s.dT
    alpha, beta = KForm.basis(s, (i,)), KForm.basis(s, (k,))
    X = vector_field(s, [Poly.const(n, int(r == j)) for r in range(n)])
    t1 = _eval1(beta, _lie_end(P.sharp(alpha), A, X))
    t2 = _eval1(alpha, _lie_end(P.sharp(beta), A, X))
    t3 = apply_field(A.apply(X), P.pair(alpha, beta))
    a_star_alpha = KForm(s, 1, {(r,): A.matrix[i][r] for r in range(n)})
    t4 = apply_field(X, P.pair(a_star_alpha, beta))
    return t1 - t2 + t3 - t4


def _matmul(a, b, n):
    return [[sum((a[r][m] * b[m][c] for m in range(n)), Poly.zero(n)) for c in range(n)] for r in range(n)]


@dataclass(frozen=True)
class PNReport:
    poisson: Report
    nijenhuis: bool
    compatible: bool
    invariant: bool
    witnesses: tuple = ()

    @property
    def ok(self) -> bool:
        return self.poisson.ok and self.nijenhuis and self.compatible and self.invariant

    def __bool__(self) -> bool:
        return self.ok


def check_pn(S: PNData) -> PNReport:
    n = S.pi.space.dT
    witnesses = []
    pois = check_poisson(S.pi)
    witnesses.extend(pois.failures)
    nij = end_class(S.A).in_W and is_nijenhuis(S.A)
    if not nij:
        witnesses.append("A is not a W-classed Nijenhuis tensor")
    Pi = [[S.pi.entry(i, j) for j in range(n)] for i in range(n)]
    At = S.A.transpose().matrix
    comp = _matmul(Pi, At, n) == _matmul(S.A.matrix, Pi, n)
    if not comp:
        witnesses.append("pi A^T != A pi")
    inv = True
    for i, j, k in itertools.product(range(n), repeat=3):
        c = schouten_invariant(S, i, j, k)
        if c:
            inv = False
            witnesses.append(f"C(dx{i + 1}, d/dx{j + 1}, dx{k + 1}) = {c}")
    return PNReport(pois, nij, comp, inv, tuple(witnesses))


def reduce_pn(S: PNData) -> PNData:
    rep = check_pn(S)
    if not rep:
        raise CheckFails("; ".join(rep.witnesses))
    out = PNData(reduce_poisson(S.pi), reduce_end(S.A))
    assert check_pn(out).ok
    return out
