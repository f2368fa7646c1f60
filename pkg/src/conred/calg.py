"""Finite-dimensional constraint vector spaces, algebras, modules and Lie algebras.

Everything lives in coordinates.  A :class:`ConVectorSpace` is a flag
``N ⊆ W ⊆ Q^dim``; maps are matrices acting on column vectors.  Structure
constants are stored as nested tuples of coordinate vectors, e.g.
``mult[a][b]`` is the product ``e_a · e_b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cindex import ConDim, ConIndexSet
from .errors import (
    BaseMismatch,
    DimensionMismatch,
    IllDefinedQuotient,
    InvariantViolation,
    NoDualBasis,
    NonCommutativeBase,
    NotConstraintMap,
    ShapeMismatch,
)
from .exact import ZERO, Mat, Quotient, Subspace, Vec, kernel, kron, rank, solve, unit, vadd, vec, vscale

# ---------------------------------------------------------------------------
# vector spaces and maps


@dataclass(frozen=True)
class ConVectorSpace:
    dim: int
    W: Subspace
    N: Subspace
    # columns span the Total part inside some ambient space, when this flag
    # was cut out of a bigger one (kernels, images, Hom spaces, derivations)
    inclusion: Mat | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.W.ambient_dim != self.dim or self.N.ambient_dim != self.dim:
            raise DimensionMismatch("flag components live in a different ambient space")
        if not self.W.contains(self.N):
            raise InvariantViolation("N-component is not contained in the W-component")

    @classmethod
    def make(cls, dim: int, W: Sequence[Sequence] = (), N: Sequence[Sequence] = ()) -> ConVectorSpace:
        return cls(dim, Subspace(dim, W), Subspace(dim, N))

    @classmethod
    def from_dims(cls, n_T: int, n_W: int, n_N: int) -> ConVectorSpace:
        """Standard flag ``span(e_1..e_nN) ⊆ span(e_1..e_nW) ⊆ Q^nT``."""
        ConDim(n_T, n_W, n_N)
        return cls(n_T, Subspace.span_units(n_T, range(n_W)), Subspace.span_units(n_T, range(n_N)))

    @classmethod
    def plain(cls, dim: int) -> ConVectorSpace:
        return cls(dim, Subspace.full(dim), Subspace.zero(dim))

    @property
    def T(self) -> Subspace:
        return Subspace.full(self.dim)

    def dims(self) -> ConDim:
        return ConDim(self.dim, self.W.dim, self.N.dim)

    def is_plain(self) -> bool:
        return self.W.dim == self.dim and self.N.dim == 0


GROUND = ConVectorSpace.plain(1)


@dataclass(frozen=True)
class ConLinearMap:
    source: ConVectorSpace
    target: ConVectorSpace
    matrix: Mat

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ShapeMismatch(
                f"matrix shape {self.matrix.shape} does not match {self.target.dim}x{self.source.dim}"
            )

    def is_constraint(self) -> bool:
        return self.target.W.contains(self.source.W.image(self.matrix)) and self.target.N.contains(
            self.source.N.image(self.matrix)
        )

    def require_constraint(self) -> None:
        if not self.is_constraint():
            raise NotConstraintMap("matrix does not map W into W and N into N")

    def __matmul__(self, other: ConLinearMap) -> ConLinearMap:
        return ConLinearMap(other.source, self.target, self.matrix @ other.matrix)


def identity_map(E: ConVectorSpace) -> ConLinearMap:
    return ConLinearMap(E, E, Mat.identity(E.dim))


@dataclass(frozen=True)
class MorphismClass:
    mono: bool
    epi: bool
    regular_mono: bool
    regular_epi: bool
    iso: bool


def classify_morphism(phi: ConLinearMap) -> MorphismClass:
    """Mono/epi/regular/iso verdicts read off the matrix and the flags."""
    phi.require_constraint()
    E, F, M = phi.source, phi.target, phi.matrix
    r = rank(M)
    mono = r == E.dim
    epi = r == F.dim and E.W.image(M) == F.W
    regular_mono = mono and F.N.preimage(M).intersect(E.W) == E.N
    regular_epi = epi and E.N.image(M) == F.N
    iso = mono and regular_epi
    if iso != (regular_mono and epi):
        raise InvariantViolation("the two isomorphism characterizations disagree")
    return MorphismClass(mono, epi, regular_mono, regular_epi, iso)


def subflag(T: Subspace, W: Subspace, N: Subspace) -> ConVectorSpace:
    """Re-coordinatize a flag ``N ⊆ W ⊆ T`` on the canonical basis of ``T``."""
    coords = lambda S: [T.coordinates(v) for v in S.basis]
    inc = Mat.from_columns(list(T.basis), T.ambient_dim)
    return ConVectorSpace(T.dim, Subspace(T.dim, coords(W)), Subspace(T.dim, coords(N)), inc)


def kernel_image(phi: ConLinearMap, which: str) -> ConVectorSpace:
    """Kernel, image or regular image flag; ``inclusion`` records the embedding."""
    phi.require_constraint()
    E, F, M = phi.source, phi.target, phi.matrix
    if which == "kernel":
        K = kernel(M)
        KW = K.intersect(E.W)
        return subflag(K, KW, KW.intersect(E.N))
    T, W = E.T.image(M), E.W.image(M)
    if which == "image":
        return subflag(T, W, E.N.image(M))
    if which == "regular_image":
        return subflag(T, W, W.intersect(F.N))
    raise ValueError(f"unknown construction {which!r}")


def _tensor_sub(a: Subspace, b: Subspace) -> Subspace:
    return Subspace(a.ambient_dim * b.ambient_dim, (kron(u, v) for u in a.basis for v in b.basis))


def tensor_flags(E: ConVectorSpace, F: ConVectorSpace, strong: bool) -> tuple[Subspace, Subspace]:
    t = _tensor_sub
    if strong:
        N = t(E.N, F.T) + t(E.T, F.N)
        W = t(E.W, F.W) + N
    else:
        W = t(E.W, F.W)
        N = t(E.N, F.W) + t(E.W, F.N)
    return W, N


def _inclusion_functionals(S: Subspace, target: Subspace, nE: int, nF: int) -> list[Vec]:
    """Linear functionals on vec(Phi) whose joint kernel is ``{Phi : Phi(S) ⊆ target}``.

    ``vec`` is row-major: entry ``Phi[j][i]`` sits at index ``j*nE + i``.
    """
    out = []
    for w in S.basis:
        for psi in target.annihilator().basis:
            out.append(kron(psi, w))
    return out


def hom_flags(E: ConVectorSpace, F: ConVectorSpace) -> tuple[Subspace, Subspace]:
    n = E.dim * F.dim
    condW = _inclusion_functionals(E.W, F.W, E.dim, F.dim) + _inclusion_functionals(E.N, F.N, E.dim, F.dim)
    condN = _inclusion_functionals(E.W, F.N, E.dim, F.dim)
    W = kernel(Mat(condW, n)) if condW else Subspace.full(n)
    N = kernel(Mat(condN, n)) if condN else Subspace.full(n)
    return W, N


def hom_space(E: ConVectorSpace, F: ConVectorSpace) -> ConVectorSpace:
    W, N = hom_flags(E, F)
    return ConVectorSpace(E.dim * F.dim, W, N)


def dual_space(E: ConVectorSpace) -> ConVectorSpace:
    return ConVectorSpace(E.dim, E.N.annihilator(), E.W.annihilator())


def construct(kind: str, E, F=None):
    """``dsum``, ``tensor``, ``strong_tensor``, ``dual`` and ``hom`` of flags or modules."""
    if isinstance(E, ConModuleFD):
        return _construct_module(kind, E, F)
    if kind == "dual":
        return dual_space(E)
    if F is None:
        raise DimensionMismatch(f"{kind} needs two arguments")
    if kind == "dsum":
        n = E.dim + F.dim
        left = lambda v: tuple(v) + (ZERO,) * F.dim
        right = lambda v: (ZERO,) * E.dim + tuple(v)
        W = Subspace(n, [left(v) for v in E.W.basis] + [right(v) for v in F.W.basis])
        N = Subspace(n, [left(v) for v in E.N.basis] + [right(v) for v in F.N.basis])
        return ConVectorSpace(n, W, N)
    if kind in ("tensor", "strong_tensor"):
        W, N = tensor_flags(E, F, kind == "strong_tensor")
        return ConVectorSpace(E.dim * F.dim, W, N)
    if kind == "hom":
        return hom_space(E, F)
    raise ValueError(f"unknown construction {kind!r}")


def hom_vector(m: Mat) -> Vec:
    """Row-major vectorization used for Hom spaces."""
    return tuple(x for row in m.rows for x in row)


def hom_matrix(v: Sequence[Fraction], nE: int, nF: int) -> Mat:
    return Mat((tuple(v[j * nE:(j + 1) * nE]) for j in range(nF)), nE)


# ---------------------------------------------------------------------------
# canonical isomorphisms over the ground field


def canonical_iso(which: str, E: ConVectorSpace, F: ConVectorSpace, G: ConVectorSpace | None = None) -> ConLinearMap:
    """The explicit comparison maps between duals, tensor products and Hom spaces.

    * ``hom_as_strong_tensor``: ``F ⊠ E* → Hom(E, F)``, ``y⊗α ↦ (x ↦ y α(x))``
    * ``dual_of_strong_tensor``: ``E* ⊗ F* → (E ⊠ F)*``, ``α⊗β ↦ (x⊗y ↦ α(x)β(y))``
    * ``dual_of_tensor``: ``E* ⊠ F* → (E ⊗ F)*`` by the same formula
    * ``hom_adjunction``: ``Hom(E⊗F, G) → Hom(F, G ⊠ E*)``, ``Φ ↦ (y ↦ Σ_i Φ(e_i⊗y) ⊗ e^i)``

    The matrix is built by evaluating the formula on standard basis vectors;
    whether it respects the flags is left to :func:`classify_morphism`.
    """
    for S in (E, F) + ((G,) if G is not None else ()):
        if not isinstance(S, ConVectorSpace):
            raise NoDualBasis("canonical isomorphisms are implemented over the ground field only")
    nE, nF = E.dim, F.dim
    if which == "hom_as_strong_tensor":
        src = construct("strong_tensor", F, dual_space(E))
        tgt = hom_space(E, F)
        cols = []
        for j, i in itertools.product(range(nF), range(nE)):
            y, alpha = unit(nF, j), unit(nE, i)
            phi = Mat(((y[r] * alpha[c] for c in range(nE)) for r in range(nF)), nE)
            cols.append(hom_vector(phi))
        return ConLinearMap(src, tgt, Mat.from_columns(cols, tgt.dim))
    if which in ("dual_of_tensor", "dual_of_strong_tensor"):
        strong_src = which == "dual_of_tensor"
        src = construct("strong_tensor" if strong_src else "tensor", dual_space(E), dual_space(F))
        tgt = dual_space(construct("tensor" if strong_src else "strong_tensor", E, F))
        cols = []
        for i, j in itertools.product(range(nE), range(nF)):
            alpha, beta = unit(nE, i), unit(nF, j)
            # value on the basis vector e_a ⊗ f_b is alpha(e_a) beta(f_b)
            cols.append(tuple(alpha[a] * beta[b] for a in range(nE) for b in range(nF)))
        return ConLinearMap(src, tgt, Mat.from_columns(cols, tgt.dim))
    if which == "hom_adjunction":
        if G is None:
            raise DimensionMismatch("hom_adjunction needs three spaces")
        nG = G.dim
        EF = construct("tensor", E, F)
        src = hom_space(EF, G)
        GE = construct("strong_tensor", G, dual_space(E))
        tgt = hom_space(F, GE)
        cols = []
        for k in range(nG * nE * nF):
            phi = hom_matrix(unit(nG * nE * nF, k), nE * nF, nG)
            # psi(y) = Σ_i phi(e_i ⊗ y) ⊗ e^i, as an (nG*nE) x nF matrix
            psi_cols = []
            for j in range(nF):
                out = [ZERO] * (nG * nE)
                for i in range(nE):
                    value = phi.apply(kron(unit(nE, i), unit(nF, j)))
                    for g in range(nG):
                        out[g * nE + i] += value[g]
                psi_cols.append(tuple(out))
            cols.append(hom_vector(Mat.from_columns(psi_cols, nG * nE)))
        return ConLinearMap(src, tgt, Mat.from_columns(cols, tgt.dim))
    raise ValueError(f"unknown canonical isomorphism {which!r}")


def is_iso_direct(phi: ConLinearMap) -> bool:
    """Independent isomorphism test: invertible matrix carrying W onto W and N onto N."""
    M = phi.matrix
    return (
        M.nrows == M.ncols == rank(M)
        and phi.source.W.image(M) == phi.target.W
        and phi.source.N.image(M) == phi.target.N
    )


# ---------------------------------------------------------------------------
# algebras


def _bilinear(table, x: Sequence[Fraction], y: Sequence[Fraction], n: int) -> Vec:
    out = [ZERO] * n
    for a, xa in enumerate(x):
        if not xa:
            continue
        row = table[a]
        for b, yb in enumerate(y):
            if not yb:
                continue
            c = xa * yb
            for k, v in enumerate(row[b]):
                if v:
                    out[k] += c * v
    return tuple(out)


def _table(raw, n: int) -> tuple[tuple[Vec, ...], ...]:
    t = tuple(tuple(vec(raw[a][b]) for b in range(n)) for a in range(n))
    if len(raw) != n or any(len(r) != n for r in raw) or any(len(v) != n for r in t for v in r):
        raise ShapeMismatch(f"structure constants must form a {n}x{n}x{n} array")
    return t


@dataclass(frozen=True)
class ConAlgebraFD:
    space: ConVectorSpace
    mult: tuple
    unit: Vec
    strong: bool = False

    def __post_init__(self):
        n = self.space.dim
        object.__setattr__(self, "mult", _table(self.mult, n))
        object.__setattr__(self, "unit", vec(self.unit))
        problems = self.violations()
        if problems:
            raise InvariantViolation("; ".join(problems))

    @property
    def dim(self) -> int:
        return self.space.dim

    def mul(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        return _bilinear(self.mult, x, y, self.dim)

    def violations(self) -> list[str]:
        n, out = self.dim, []
        basis = [unit(n, i) for i in range(n)]
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.mul(self.mul(basis[a], basis[b]), basis[c]) != self.mul(basis[a], self.mul(basis[b], basis[c])):
                out.append(f"associativity fails on basis triple {(a, b, c)}")
                break
        for a in range(n):
            if self.mul(self.unit, basis[a]) != basis[a] or self.mul(basis[a], self.unit) != basis[a]:
                out.append(f"unit fails on basis vector {a}")
                break
        W, N = self.space.W, self.space.N
        if n and not W.contains_vector(self.unit):
            out.append("unit is not in the W-component")
        if not all(W.contains_vector(self.mul(u, v)) for u in W.basis for v in W.basis):
            out.append("W-component is not closed under the product")
        left = W.basis if not self.strong else tuple(basis)
        if not all(N.contains_vector(self.mul(u, v)) and N.contains_vector(self.mul(v, u)) for u in left for v in N.basis):
            out.append("N-component is not a two-sided ideal" + (" in the Total algebra" if self.strong else " in W"))
        return out

    def is_commutative(self) -> bool:
        n = self.dim
        return all(self.mult[a][b] == self.mult[b][a] for a in range(n) for b in range(n))

    def right_mult(self, a: Sequence[Fraction]) -> Mat:
        """Matrix of ``x ↦ x·a``."""
        n = self.dim
        return Mat.from_columns([self.mul(unit(n, b), a) for b in range(n)], n)

    def left_mult(self, a: Sequence[Fraction]) -> Mat:
        n = self.dim
        return Mat.from_columns([self.mul(a, unit(n, b)) for b in range(n)], n)


def ground_algebra() -> ConAlgebraFD:
    return ConAlgebraFD(GROUND, (((1,),),), (1,), strong=True)


def gaussian_rationals(W: Sequence[Sequence] = ((1, 0),), N: Sequence[Sequence] = ()) -> ConAlgebraFD:
    """``Q(i)`` on the basis ``(1, i)`` with a chosen flag, default ``(Q(i), Q, 0)``."""
    mult = (((1, 0), (0, 1)), ((0, 1), (-1, 0)))
    return ConAlgebraFD(ConVectorSpace.make(2, W, N), mult, (1, 0), strong=True)


# ---------------------------------------------------------------------------
# modules


@dataclass(frozen=True)
class ConModuleFD:
    """Right module: ``action[a]`` is the matrix of ``x ↦ x·e_a``."""

    algebra: ConAlgebraFD
    space: ConVectorSpace
    action: tuple
    strong: bool = False

    def __post_init__(self):
        acts = tuple(m if isinstance(m, Mat) else Mat(m, self.space.dim) for m in self.action)
        object.__setattr__(self, "action", acts)
        if len(acts) != self.algebra.dim or any(m.shape != (self.space.dim, self.space.dim) for m in acts):
            raise ShapeMismatch("need one square action matrix per algebra basis vector")
        problems = self.violations()
        if problems:
            raise InvariantViolation("; ".join(problems))

    @property
    def dim(self) -> int:
        return self.space.dim

    def act(self, a: Sequence[Fraction]) -> Mat:
        """Matrix of ``x ↦ x·a`` for an arbitrary algebra element."""
        out = Mat.zeros(self.dim, self.dim)
        for c, m in zip(a, self.action):
            if c:
                out = out + m.scale(c)
        return out

    def violations(self) -> list[str]:
        A, out = self.algebra, []
        n = A.dim
        for a, b in itertools.product(range(n), repeat=2):
            if self.action[b] @ self.action[a] != self.act(A.mult[a][b]):
                out.append(f"action is not associative on algebra basis pair {(a, b)}")
                break
        if self.act(A.unit) != Mat.identity(self.dim):
            out.append("algebra unit does not act as identity")
        E, AW, AN = self.space, A.space.W, A.space.N

        def closed(S: Subspace, alg: Sequence[Vec], target: Subspace) -> bool:
            return all(target.contains_vector(self.act(a).apply(x)) for x in S.basis for a in alg)

        if not closed(E.W, AW.basis, E.W):
            out.append("E_W·A_W ⊄ E_W")
        if not closed(E.N, AW.basis, E.N):
            out.append("E_N·A_W ⊄ E_N")
        if self.strong:
            full = [unit(n, i) for i in range(n)]
            if not closed(E.N, full, E.N):
                out.append("E_N is not a Total submodule")
            if not closed(E.T, AN.basis, E.N):
                out.append("E_T·A_N ⊄ E_N")
        return out


def regular_module(A: ConAlgebraFD, W: Sequence[Sequence] | None = None, N: Sequence[Sequence] | None = None,
                   strong: bool = False) -> ConModuleFD:
    """``A_T`` acting on itself from the right, with a chosen flag (default: A's own flag)."""
    space = A.space if W is None else ConVectorSpace.make(A.dim, W, N or ())
    acts = tuple(A.right_mult(unit(A.dim, a)) for a in range(A.dim))
    return ConModuleFD(A, space, acts, strong)


def _construct_module(kind: str, E: ConModuleFD, F: ConModuleFD | None):
    A = E.algebra
    if F is not None and F.algebra != A:
        raise BaseMismatch("modules over different algebras")
    if kind == "dsum":
        space = construct("dsum", E.space, F.space)
        acts = []
        for mE, mF in zip(E.action, F.action):
            rows = [tuple(r) + (ZERO,) * F.dim for r in mE.rows] + [(ZERO,) * E.dim + tuple(r) for r in mF.rows]
            acts.append(Mat(rows, E.dim + F.dim))
        return ConModuleFD(A, space, tuple(acts), E.strong and F.strong)
    if kind in ("tensor", "strong_tensor"):
        return tensor_over_algebra(E, F, "strong" if kind == "strong_tensor" else "tensor")
    if not A.is_commutative():
        raise NonCommutativeBase("Hom and dual over a non-commutative algebra are not modules")
    if kind == "dual":
        return _hom_module(E, regular_module(A, strong=A.strong))
    if kind == "hom":
        return _hom_module(E, F)
    raise ValueError(f"unknown construction {kind!r}")


def _hom_module(E: ConModuleFD, F: ConModuleFD) -> ConModuleFD:
    """``Hom_A(E, F)`` re-coordinatized on a basis of the A-linear maps."""
    A = E.algebra
    nE, nF = E.dim, F.dim
    n = nE * nF
    # A-linearity: Phi R^E_a = R^F_a Phi, linear in vec(Phi)
    conds = []
    for a in range(A.dim):
        RE, RF = E.action[a], F.action[a]
        for j, i in itertools.product(range(nF), range(nE)):
            row = [ZERO] * n
            for k in range(nE):
                if RE[k, i]:
                    row[j * nE + k] += RE[k, i]
            for k in range(nF):
                if RF[j, k]:
                    row[k * nE + i] -= RF[j, k]
            conds.append(tuple(row))
    HT = kernel(Mat(conds, n)) if conds else Subspace.full(n)
    W, N = hom_flags(E.space, F.space)
    flag = subflag(HT, W.intersect(HT), N.intersect(HT))
    acts = []
    for a in range(A.dim):
        # (Phi·a)(x) = Phi(x)·a = R^F_a Phi
        cols = []
        for v in HT.basis:
            img = hom_vector(F.action[a] @ hom_matrix(v, nE, nF))
            cols.append(HT.coordinates(img))
        acts.append(Mat.from_columns(cols, HT.dim))
    return ConModuleFD(A, flag, tuple(acts))


def tensor_over_algebra(E: ConModuleFD, F: ConModuleFD, flavor: str) -> ConModuleFD:
    """Balanced tensor product over a commutative algebra, flags pushed through the quotient."""
    A = E.algebra
    if F.algebra != A:
        raise BaseMismatch("modules over different algebras")
    if not A.is_commutative():
        raise NonCommutativeBase("balanced tensor products need a commutative algebra")
    if flavor not in ("tensor", "strong"):
        raise ValueError(f"unknown flavor {flavor!r}")
    nE, nF = E.dim, F.dim
    n = nE * nF
    bal = []
    for a in range(A.dim):
        for i, j in itertools.product(range(nE), range(nF)):
            x, y = unit(nE, i), unit(nF, j)
            bal.append(vadd(kron(E.action[a].apply(x), y), vscale(-1, kron(x, F.action[a].apply(y)))))
    B = Subspace(n, bal)
    q = Quotient(Subspace.full(n), B)
    W, N = tensor_flags(E.space, F.space, flavor == "strong")
    push = lambda S: Subspace(q.dim, (q.project(v) for v in S.basis))
    space = ConVectorSpace(q.dim, push(W), push(N))
    acts = []
    for a in range(A.dim):
        big = _kron_mat(E.action[a], Mat.identity(nF))
        acts.append(Mat.from_columns([q.project(big.apply(c)) for c in q.complement.basis], q.dim))
    return ConModuleFD(A, space, tuple(acts), strong=E.strong and F.strong)


def _kron_mat(a: Mat, b: Mat) -> Mat:
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append(tuple(x * y for x in ra for y in rb))
    return Mat(rows, a.ncols * b.ncols)


# ---------------------------------------------------------------------------
# Lie algebras


@dataclass(frozen=True)
class ConLieAlgebraFD:
    """Graded Lie bracket of degree ``shift``; ``degrees[a]`` is the degree of basis vector a."""

    space: ConVectorSpace
    bracket: tuple
    degrees: tuple = ()
    shift: int = 0

    def __post_init__(self):
        n = self.space.dim
        object.__setattr__(self, "bracket", _table(self.bracket, n))
        degs = tuple(self.degrees) if self.degrees else (0,) * n
        if len(degs) != n:
            raise ShapeMismatch("one degree per basis vector")
        object.__setattr__(self, "degrees", degs)
        problems = self.violations()
        if problems:
            raise InvariantViolation("; ".join(problems))

    @property
    def dim(self) -> int:
        return self.space.dim

    def br(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
        return _bilinear(self.bracket, x, y, self.dim)

    def _sign(self, a: int, b: int) -> int:
        k = self.shift
        return -1 if ((self.degrees[a] + k) * (self.degrees[b] + k)) % 2 else 1

    def violations(self) -> list[str]:
        n, out = self.dim, []
        e = [unit(n, i) for i in range(n)]
        for a, b in itertools.product(range(n), repeat=2):
            v = self.bracket[a][b]
            want = self.degrees[a] + self.degrees[b] + self.shift
            if any(c and self.degrees[m] != want for m, c in enumerate(v)):
                out.append(f"bracket of basis pair {(a, b)} is not homogeneous of degree {want}")
                return out
            if v != vscale(-self._sign(a, b), self.bracket[b][a]):
                out.append(f"graded antisymmetry fails on basis pair {(a, b)}")
                return out
        for a, b, c in itertools.product(range(n), repeat=3):
            lhs = self.br(e[a], self.br(e[b], e[c]))
            rhs = vadd(self.br(self.br(e[a], e[b]), e[c]), vscale(self._sign(a, b), self.br(e[b], self.br(e[a], e[c]))))
            if lhs != rhs:
                out.append(f"graded Jacobi fails on basis triple {(a, b, c)}")
                return out
        W, N = self.space.W, self.space.N
        if not all(W.contains_vector(self.br(u, v)) for u in W.basis for v in W.basis):
            out.append("[W, W] ⊄ W")
        if not all(N.contains_vector(self.br(u, v)) and N.contains_vector(self.br(v, u)) for u in W.basis for v in N.basis):
            out.append("[W, N] ⊄ N")
        return out


@dataclass(frozen=True)
class ConGerstenhaberFD:
    """A graded algebra and a degree -1 bracket on the same graded flag."""

    algebra: ConAlgebraFD
    lie: ConLieAlgebraFD

    def __post_init__(self):
        if self.algebra.space != self.lie.space:
            raise ShapeMismatch("product and bracket must live on the same flag")
        if self.lie.shift != -1:
            raise InvariantViolation("Gerstenhaber brackets have degree -1")
        problems = self.violations()
        if problems:
            raise InvariantViolation("; ".join(problems))

    def violations(self) -> list[str]:
        return gerstenhaber_violations(self.algebra, self.lie.bracket, self.lie.degrees)


def gerstenhaber_violations(alg: ConAlgebraFD, bracket, degrees: Sequence[int]) -> list[str]:
    """Graded commutativity, grading of the product, graded Leibniz on basis triples."""
    n = alg.dim
    e = [unit(n, i) for i in range(n)]
    br = lambda x, y: _bilinear(bracket, x, y, n)
    out = []
    for a, b in itertools.product(range(n), repeat=2):
        want = degrees[a] + degrees[b]
        prod = alg.mult[a][b]
        if any(c and degrees[m] != want for m, c in enumerate(prod)):
            return [f"product of basis pair {(a, b)} is not homogeneous"]
        sign = -1 if (degrees[a] * degrees[b]) % 2 else 1
        if prod != vscale(sign, alg.mult[b][a]):
            return [f"product is not graded commutative on {(a, b)}"]
    for a, b, c in itertools.product(range(n), repeat=3):
        lhs = br(e[a], alg.mul(e[b], e[c]))
        sign = -1 if ((degrees[a] - 1) * degrees[b]) % 2 else 1
        rhs = vadd(alg.mul(br(e[a], e[b]), e[c]), vscale(sign, alg.mul(e[b], br(e[a], e[c]))))
        if lhs != rhs:
            out.append(f"graded Leibniz fails on basis triple {(a, b, c)}")
            break
    return out


# ---------------------------------------------------------------------------
# reduction


def reduction_quotient(E: ConVectorSpace) -> Quotient:
    return Quotient(E.W, E.N)


def reduce(x):
    """Reduce ``W / N``; returns the same kind of object with a plain flag."""
    if isinstance(x, ConVectorSpace):
        return ConVectorSpace.plain(reduction_quotient(x).dim)
    if isinstance(x, ConLinearMap):
        x.require_constraint()
        qs, qt = reduction_quotient(x.source), reduction_quotient(x.target)
        cols = [qt.project(x.matrix.apply(c)) for c in qs.complement.basis]
        return ConLinearMap(ConVectorSpace.plain(qs.dim), ConVectorSpace.plain(qt.dim), Mat.from_columns(cols, qt.dim))
    if isinstance(x, ConAlgebraFD):
        q = reduction_quotient(x.space)
        table = _reduced_table(q, x.mul, x.space.N, "product")
        return ConAlgebraFD(ConVectorSpace.plain(q.dim), table, q.project(x.unit) if q.dim else (), strong=True)
    if isinstance(x, ConLieAlgebraFD):
        q = reduction_quotient(x.space)
        table = _reduced_table(q, x.br, x.space.N, "bracket")
        degs = tuple(_degree_of(c, x.degrees) for c in q.complement.basis)
        return ConLieAlgebraFD(ConVectorSpace.plain(q.dim), table, degs, x.shift)
    if isinstance(x, ConGerstenhaberFD):
        return reduce_gerstenhaber(x)
    if isinstance(x, ConModuleFD):
        return _reduce_module(x)
    raise TypeError(f"cannot reduce {type(x).__name__}")


def _degree_of(v: Vec, degrees: Sequence[int]) -> int:
    ds = {degrees[i] for i, c in enumerate(v) if c}
    if len(ds) > 1:
        raise IllDefinedQuotient("complement vector is not homogeneous")
    return ds.pop() if ds else 0


def _reduced_table(q: Quotient, op, N: Subspace, what: str):
    comp = q.complement.basis
    for u in q.outer.basis:
        for v in N.basis:
            if not (N.contains_vector(op(u, v)) and N.contains_vector(op(v, u))):
                raise IllDefinedQuotient(f"{what} does not descend: N is not absorbed by W")
    return tuple(tuple(q.project(op(a, b)) for b in comp) for a in comp)


def reduce_gerstenhaber(G: ConGerstenhaberFD) -> ConGerstenhaberFD:
    alg = reduce(G.algebra)
    lie = reduce(G.lie)
    return ConGerstenhaberFD(alg, lie)


def _reduce_module(E: ConModuleFD) -> ConModuleFD:
    A = E.algebra
    qA, qE = reduction_quotient(A.space), reduction_quotient(E.space)
    for x in E.space.W.basis:
        for a in A.space.N.basis:
            if not E.space.N.contains_vector(E.act(a).apply(x)):
                raise IllDefinedQuotient("E_W·A_N ⊄ E_N, the action does not descend")
    Ared = reduce(A)
    acts = []
    for a in qA.complement.basis:
        R = E.act(a)
        acts.append(Mat.from_columns([qE.project(R.apply(c)) for c in qE.complement.basis], qE.dim))
    return ConModuleFD(Ared, ConVectorSpace.plain(qE.dim), tuple(acts))


def reduced_hom_comparison(E: ConVectorSpace, F: ConVectorSpace) -> Mat:
    """Matrix of the natural map ``Hom(E,F)_red → Hom(E_red, F_red)``."""
    H = hom_space(E, F)
    qH, qE, qF = reduction_quotient(H), reduction_quotient(E), reduction_quotient(F)
    cols = []
    for v in qH.complement.basis:
        phi = hom_matrix(v, E.dim, F.dim)
        red = Mat.from_columns([qF.project(phi.apply(c)) for c in qE.complement.basis], qF.dim)
        cols.append(hom_vector(red) if qE.dim and qF.dim else ())
    if not (qE.dim and qF.dim):
        return Mat.zeros(0, qH.dim)
    return Mat.from_columns(cols, qE.dim * qF.dim)


# ---------------------------------------------------------------------------
# dual bases


@dataclass(frozen=True)
class ConDualBasis:
    """Vectors ``e_n`` in E_T and covectors ``e^n`` as matrices ``E_T → A_T``."""

    index: ConIndexSet
    vectors: tuple
    covectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(vec(v) for v in self.vectors))
        object.__setattr__(self, "covectors", tuple(c if isinstance(c, Mat) else Mat(c) for c in self.covectors))
        if not (len(self.vectors) == len(self.covectors) == len(self.index.T)):
            raise ShapeMismatch("one vector and one covector per index label")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def as_module(E) -> ConModuleFD:
    if isinstance(E, ConModuleFD):
        return E
    return ConModuleFD(ground_algebra(), E, (Mat.identity(E.dim),))


def adapted_dual_basis(E: ConVectorSpace) -> ConDualBasis:
    """Basis of N, then a complement in W, then a complement of W, with its dual basis.

    Labels are positions; the first ``dim N`` labels form the N part of the
    index set and the first ``dim W`` the W part.
    """
    n = E.dim
    qW = Quotient(Subspace.full(n), E.W)
    qN = Quotient(E.W, E.N)
    vectors = list(E.N.basis) + list(qN.complement.basis) + list(qW.complement.basis)
    # rows of P^{-1} solve P^T r = e_k
    Pt = Mat.from_columns(vectors, n).transpose()
    covectors = [Mat([solve(Pt, unit(n, k))], n) for k in range(n)]
    labels = list(range(n))
    index = ConIndexSet(labels, labels[: E.W.dim], labels[: E.N.dim])
    return ConDualBasis(index, vectors, covectors)


def verify_dual_basis(E, db: ConDualBasis) -> Verdict:
    """Reconstruction on a basis plus the four class conditions on vectors and covectors."""
    M = as_module(E)
    A = M.algebra
    n = M.dim
    idx = db.index
    for cov in db.covectors:
        if cov.shape != (A.dim, n):
            return Verdict(False, "covector has the wrong shape")
    for k in range(n):
        x = unit(n, k)
        total = (ZERO,) * n
        for e, cov in zip(db.vectors, db.covectors):
            total = vadd(total, M.act(cov.apply(x)).apply(e))
        if total != x:
            return Verdict(False, f"reconstruction fails on basis vector {k}")
    for j, (label, e, cov) in enumerate(zip(idx.T, db.vectors, db.covectors)):
        if label in idx.W and not M.space.W.contains_vector(e):
            return Verdict(False, f"e_{label} is not in E_W")
        if label in idx.N and not M.space.N.contains_vector(e):
            return Verdict(False, f"e_{label} is not in E_N")
        if label not in idx.N and not _covector_in_w(M, cov):
            return Verdict(False, f"e^{label} is not in (E*)_W")
        if label not in idx.W and not _covector_in_n(M, cov):
            return Verdict(False, f"e^{label} is not in (E*)_N")
    return Verdict(True)


def _covector_in_w(M: ConModuleFD, cov: Mat) -> bool:
    AW, AN = M.algebra.space.W, M.algebra.space.N
    return all(AW.contains_vector(cov.apply(x)) for x in M.space.W.basis) and all(
        AN.contains_vector(cov.apply(x)) for x in M.space.N.basis
    )


def _covector_in_n(M: ConModuleFD, cov: Mat) -> bool:
    AN = M.algebra.space.N
    return all(AN.contains_vector(cov.apply(x)) for x in M.space.W.basis)


def reduce_dual_basis(E, db: ConDualBasis) -> tuple[ConModuleFD, ConDualBasis]:
    """Reduced module and the reduced family indexed by ``W ∖ N`` of the index set."""
    M = as_module(E)
    A = M.algebra
    qE, qA = reduction_quotient(M.space), reduction_quotient(A.space)
    red = _reduce_module(M)
    keep = [j for j, l in enumerate(db.index.T) if l in db.index.W and l not in db.index.N]
    vectors = [qE.project(db.vectors[j]) for j in keep]
    covs = []
    for j in keep:
        cov = db.covectors[j]
        cols = [qA.project(cov.apply(c)) for c in qE.complement.basis]
        covs.append(Mat.from_columns(cols, qA.dim) if cols else Mat.zeros(qA.dim, 0))
    labels = [db.index.T[j] for j in keep]
    return red, ConDualBasis(ConIndexSet(labels, labels, ()), vectors, covs)


# ---------------------------------------------------------------------------
# derivations


def derivation_space(A: ConAlgebraFD) -> tuple[ConVectorSpace, list[Mat]]:
    """Derivations of ``A_T`` with the W/N conditions, on a basis of ``Der(A_T)``.

    Returns the flag and the derivation matrices (column b is ``D(e_b)``).
    """
    n = A.dim
    size = n * n  # D[r][c] at index r*n + c, column c = D(e_c)
    e = [unit(n, i) for i in range(n)]
    conds = []
    for a, b in itertools.product(range(n), repeat=2):
        # D(e_a e_b) - D(e_a) e_b - e_a D(e_b) = 0, each output coordinate r
        prod = A.mult[a][b]
        for r in range(n):
            row = [ZERO] * size
            for c, pc in enumerate(prod):
                if pc:
                    row[r * n + c] += pc
            # D(e_a) e_b = Σ_s D[s][a] (e_s e_b)
            for s in range(n):
                coeff = A.mult[s][b][r]
                if coeff:
                    row[s * n + a] -= coeff
                coeff = A.mult[a][s][r]
                if coeff:
                    row[s * n + b] -= coeff
            conds.append(tuple(row))
    DT = kernel(Mat(conds, size)) if conds else Subspace.full(size)
    flat = ConVectorSpace(n, A.space.W, A.space.N)
    W, N = hom_flags(flat, flat)
    flag = subflag(DT, W.intersect(DT), N.intersect(DT))
    mats = [hom_matrix(v, n, n) for v in DT.basis]
    return flag, mats


def derivations(A: ConAlgebraFD) -> ConVectorSpace:
    return derivation_space(A)[0]


def derivation_lie_algebra(A: ConAlgebraFD) -> ConLieAlgebraFD:
    """Commutator bracket on ``Der(A)``; construction validates bracket closure."""
    flag, mats = derivation_space(A)
    basis_vectors = [hom_vector(m) for m in mats]
    DT = Subspace(A.dim * A.dim, basis_vectors)
    table = []
    for X in mats:
        row = []
        for Y in mats:
            comm = X @ Y - Y @ X
            row.append(DT.coordinates(hom_vector(comm)))
        table.append(tuple(row))
    return ConLieAlgebraFD(flag, tuple(table))


def derivation_is_leibniz(A: ConAlgebraFD, D: Mat) -> bool:
    n = A.dim
    e = [unit(n, i) for i in range(n)]
    return all(
        D.apply(A.mul(e[a], e[b])) == vadd(A.mul(D.apply(e[a]), e[b]), A.mul(e[a], D.apply(e[b])))
        for a in range(n)
        for b in range(n)
    )


__all__ = [
    "ConVectorSpace", "ConLinearMap", "ConAlgebraFD", "ConModuleFD", "ConLieAlgebraFD", "ConGerstenhaberFD",
    "ConDualBasis", "MorphismClass", "Verdict", "classify_morphism", "kernel_image", "construct", "reduce",
    "tensor_over_algebra", "canonical_iso", "verify_dual_basis", "derivations", "derivation_lie_algebra",
    "adapted_dual_basis", "reduce_dual_basis", "identity_map", "is_iso_direct", "gaussian_rationals",
    "regular_module", "ground_algebra", "hom_space", "dual_space", "reduced_hom_comparison",
]
