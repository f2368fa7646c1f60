"""Exact rational matrices and subspaces.

Scalars are :class:`fractions.Fraction`.  Vectors are tuples of Fractions,
matrices are :class:`Mat` (row tuples), and a subspace is stored as the
nonzero rows of its reduced row-echelon basis, which makes equality of
subspaces a structural comparison.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotContained

Vec = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def vec(values: Iterable) -> Vec:
    return tuple(Fraction(v) for v in values)


def unit(n: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(n))


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vscale(c, u: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * a for a in u)


def lincomb(coeffs: Sequence[Fraction], vectors: Sequence[Vec], n: int) -> Vec:
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for k, a in enumerate(v):
                if a:
                    out[k] += c * a
    return tuple(out)


def kron(u: Vec, v: Vec) -> Vec:
    return tuple(a * b for a in u for b in v)


class Mat:
    """Dense rational matrix with an explicit column count (rows may be empty)."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionMismatch("column count needed for a matrix without rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged matrix")
        self.rows = rows
        self.ncols = ncols

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def identity(cls, n: int) -> Mat:
        return cls((unit(n, i) for i in range(n)), n)

    @classmethod
    def zeros(cls, r: int, c: int) -> Mat:
        return cls(((ZERO,) * c for _ in range(r)), c)

    @classmethod
    def from_columns(cls, columns: Sequence[Vec], nrows: int) -> Mat:
        return cls((tuple(col[i] for col in columns) for i in range(nrows)), len(columns))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vec:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> Mat:
        if not self.rows:
            return Mat.zeros(self.ncols, 0)
        return Mat(zip(*self.rows), self.nrows)

    def apply(self, v: Sequence[Fraction]) -> Vec:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(dot(r, v) for r in self.rows)

    def __matmul__(self, other: Mat) -> Mat:
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return Mat((tuple(dot(r, c) for c in cols) for r in self.rows), other.ncols)

    def __add__(self, other: Mat) -> Mat:
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Mat((vadd(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: Mat) -> Mat:
        return self + other.scale(-1)

    def scale(self, c) -> Mat:
        return Mat((vscale(c, r) for r in self.rows), self.ncols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"Mat([{body}], ncols={self.ncols})"

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)


def _rref_rows(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        row_r = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
    return m, pivots


def rref(m: Mat) -> Mat:
    """Reduced row-echelon form; zero rows stay at the bottom so the shape is kept.

    >>> rref(Mat([[1, 2], [2, 4]]))
    Mat([[1, 2], [0, 0]], ncols=2)
    """
    rows, _ = _rref_rows(m.rows, m.ncols)
    return Mat(rows, m.ncols)


def rank(m: Mat) -> int:
    return len(_rref_rows(m.rows, m.ncols)[1])


def kernel(m: Mat) -> Subspace:
    """Null space ``{v : m v = 0}`` as a subspace of ``Q^cols``."""
    rows, pivots = _rref_rows(m.rows, m.ncols)
    n = m.ncols
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(v)
    return Subspace(n, basis)


def solve(m: Mat, b: Sequence[Fraction]) -> Vec | None:
    """One solution of ``m x = b`` (free variables set to zero), or None."""
    if len(b) != m.nrows:
        raise DimensionMismatch("right-hand side length")
    aug = [list(r) + [Fraction(x)] for r, x in zip(m.rows, b)]
    rows, pivots = _rref_rows(aug, m.ncols + 1)
    if m.ncols in pivots:
        return None
    x = [ZERO] * m.ncols
    for r, p in enumerate(pivots):
        x[p] = rows[r][m.ncols]
    return tuple(x)


class Subspace:
    """Subspace of ``Q^n`` held by its canonical (RREF) row basis."""

    __slots__ = ("ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        vectors = [tuple(Fraction(x) for x in v) for v in vectors]
        if any(len(v) != ambient_dim for v in vectors):
            raise DimensionMismatch(f"vector length differs from ambient dimension {ambient_dim}")
        rows, pivots = _rref_rows(vectors, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis: tuple[Vec, ...] = tuple(tuple(r) for r in rows[: len(pivots)])
        self._pivots = tuple(pivots)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, (unit(n, i) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n)

    @classmethod
    def span_units(cls, n: int, indices: Iterable[int]) -> Subspace:
        return cls(n, (unit(n, i) for i in indices))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_mat(self) -> Mat:
        return Mat(self.basis, self.ambient_dim)

    def _check(self, other: Subspace) -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(f"ambient dimensions {self.ambient_dim} and {other.ambient_dim}")

    def contains_vector(self, v: Sequence[Fraction]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length")
        # reduce v against the pivot rows; membership iff the remainder vanishes
        w = list(v)
        for row, p in zip(self.basis, self._pivots):
            c = w[p]
            if c:
                w = [a - c * b if b else a for a, b in zip(w, row)]
        return not any(w)

    def contains(self, other: Subspace) -> bool:
        self._check(other)
        return all(self.contains_vector(v) for v in other.basis)

    def __le__(self, other: Subspace) -> bool:
        return other.contains(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace({self.ambient_dim}, {[list(map(str, v)) for v in self.basis]})"

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def annihilator(self) -> Subspace:
        """``{phi : phi(v) = 0 for v in self}`` in coordinate-dual coordinates."""
        return kernel(Mat(self.basis, self.ambient_dim))

    def intersect(self, other: Subspace) -> Subspace:
        self._check(other)
        return (self.annihilator() + other.annihilator()).annihilator()

    def image(self, m: Mat) -> Subspace:
        if m.ncols != self.ambient_dim:
            raise DimensionMismatch("matrix does not act on this subspace")
        return Subspace(m.nrows, (m.apply(v) for v in self.basis))

    def preimage(self, m: Mat) -> Subspace:
        """``{v : m v in self}``."""
        if m.nrows != self.ambient_dim:
            raise DimensionMismatch("matrix does not land in this subspace")
        ann = self.annihilator()
        if ann.dim == 0:
            return Subspace.full(m.ncols)
        return kernel(Mat(ann.basis, self.ambient_dim) @ m)

    def complement_in(self, outer: Subspace) -> Subspace:
        return quotient_complement(outer, self)

    def coordinates(self, v: Sequence[Fraction]) -> Vec:
        """Coefficients of ``v`` in the canonical basis; v must lie in the subspace."""
        if not self.contains_vector(v):
            raise NotContained("vector outside subspace")
        return tuple(Fraction(v[p]) for p in self._pivots)


def quotient_complement(a: Subspace, b: Subspace) -> Subspace:
    """Deterministic complement of ``b`` inside ``a``.

    Walks the canonical basis of ``a`` (for ``a`` the whole space this is the
    standard basis) and keeps every vector not already spanned.
    """
    a._check(b)
    if not a.contains(b):
        raise NotContained("quotient_complement needs b inside a")
    chosen: list[Vec] = []
    acc = b
    for v in a.basis:
        if not acc.contains_vector(v):
            chosen.append(v)
            acc = Subspace(a.ambient_dim, acc.basis + (v,))
    return Subspace(a.ambient_dim, chosen)


def subspace_ops(kind: str, a: Subspace, b: Subspace | None = None) -> Subspace:
    """Dispatch ``sum``, ``intersect``, ``annihilator`` and ``quotient_complement``."""
    if kind == "annihilator":
        return a.annihilator()
    if b is None:
        raise DimensionMismatch(f"{kind} needs two subspaces")
    if kind == "sum":
        return a + b
    if kind == "intersect":
        return a.intersect(b)
    if kind == "quotient_complement":
        return quotient_complement(a, b)
    raise ValueError(f"unknown subspace operation {kind!r}")


class Quotient:
    """Coordinates on ``outer / inner`` via the pivot-greedy complement.

    ``project(v)`` returns the coordinates of the class of ``v`` in the basis
    of the chosen complement; ``lift(c)`` goes back to a representative.
    """

    def __init__(self, outer: Subspace, inner: Subspace):
        self.outer = outer
        self.inner = inner
        self.complement = quotient_complement(outer, inner)
        self.dim = self.complement.dim
        n = outer.ambient_dim
        # columns: complement basis first, then inner basis
        self._stack = Mat.from_columns(list(self.complement.basis) + list(inner.basis), n)

    def project(self, v: Sequence[Fraction]) -> Vec:
        if not self.outer.contains_vector(v):
            raise NotContained("vector outside the numerator subspace")
        x = solve(self._stack, v)
        assert x is not None
        return x[: self.dim]

    def lift(self, c: Sequence[Fraction]) -> Vec:
        return lincomb(c, self.complement.basis, self.outer.ambient_dim)
