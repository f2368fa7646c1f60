"""Sparse multivariate polynomials over Q.

A :class:`Poly` maps exponent tuples to nonzero Fractions.  Variables are
indexed from 0 internally and rendered ``x1 .. xN`` in text.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, VarMismatch

Exponent = tuple[int, ...]


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise VarMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
                c = Fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> Poly:
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> Poly:
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        if not 0 <= i < nvars:
            raise VarMismatch(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise VarMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k: int) -> Poly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def partial(self, i: int) -> Poly:
        if not 0 <= i < self.nvars:
            raise VarMismatch(f"variable index {i} out of range for {self.nvars} variables")
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                f = list(e)
                f[i] = k - 1
                out[tuple(f)] = c * k
        return Poly._raw(self.nvars, out)

    def substitute_zero(self, indices: Iterable[int]) -> Poly:
        idx = set(indices)
        if any(not 0 <= i < self.nvars for i in idx):
            raise VarMismatch("substitution index out of range")
        return Poly._raw(self.nvars, {e: c for e, c in self.terms.items() if not any(e[i] for i in idx)})

    def eval(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise VarMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(pt, e):
                if k:
                    t *= x**k
            total += t
        return total

    def compose(self, images: Sequence[Poly], nvars: int | None = None) -> Poly:
        """Substitute ``x_i -> images[i]``; the result lives in the images' ring.

        ``nvars`` names that ring explicitly, which matters when there are no images.
        """
        if len(images) != self.nvars:
            raise VarMismatch("one image per variable required")
        m = nvars if nvars is not None else (images[0].nvars if images else 0)
        if any(q.nvars != m for q in images):
            raise VarMismatch("images must share a variable count")
        powers: dict[tuple[int, int], Poly] = {}

        def pw(i: int, k: int) -> Poly:
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        out = Poly.zero(m)
        for e, c in self.terms.items():
            t = Poly.const(m, c)
            for i, k in enumerate(e):
                if k:
                    t = t * pw(i, k)
            out = out + t
        return out

    def reindex(self, nvars: int, mapping: Mapping[int, int]) -> Poly:
        """Move variable ``i`` to ``mapping[i]``; unmapped variables must not occur."""
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    if i not in mapping:
                        raise VarMismatch(f"x{i + 1} occurs but has no image")
                    f[mapping[i]] += k
            f = tuple(f)
            out[f] = out.get(f, 0) + c
        return Poly(nvars, out)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {format_poly(self)!r})"


def _monomial(e: Exponent) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i + 1}")
        elif k:
            parts.append(f"x{i + 1}^{k}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Render in the scene syntax, terms sorted by degree then lexicographically."""
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda e: (-sum(e), tuple(-k for k in e)))
    out = []
    for n, e in enumerate(keys):
        c = p.terms[e]
        mono = _monomial(e)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if n == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_ALLOWED = re.compile(r"[0-9x+\-*^/() \t]*")
_VAR = re.compile(r"x([1-9][0-9]*)")


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse ``x1..xN`` polynomials with integer or ``a/b`` coefficients.

    >>> str(parse_poly("x1^2 - 1/2*x2", 2))
    'x1^2 - 1/2*x2'
    """
    if not isinstance(text, str):
        raise ParseError(f"polynomial must be a string, got {type(text).__name__}")
    bad = _ALLOWED.fullmatch(text)
    if bad is None:
        col = next(i for i, ch in enumerate(text) if not _ALLOWED.fullmatch(ch))
        raise ParseError(f"unexpected character {text[col]!r} in {text!r}", f"column {col + 1}")
    m = re.search(r"[0-9]x", text)
    if m:
        raise ParseError(f"missing operator before variable in {text!r}", f"column {m.start() + 2}")
    if "**" in text:
        raise ParseError(f"use '^' for powers in {text!r}")
    if not text.strip():
        raise ParseError("empty polynomial")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"syntax error in {text!r}", f"column {exc.offset}") from None
    return _eval_node(tree.body, nvars, text)


def _eval_node(node: ast.AST, nvars: int, text: str) -> Poly:
    where = f"column {getattr(node, 'col_offset', 0) + 1}"
    if isinstance(node, ast.Constant):
        if type(node.value) is not int:
            raise ParseError(f"only integer literals allowed in {text!r}", where)
        return Poly.const(nvars, node.value)
    if isinstance(node, ast.Name):
        m = _VAR.fullmatch(node.id)
        if not m:
            raise ParseError(f"unknown symbol {node.id!r}", where)
        i = int(m.group(1)) - 1
        if i >= nvars:
            raise ParseError(f"{node.id} exceeds the {nvars} available variables", where)
        return Poly.var(nvars, i)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p = _eval_node(node.operand, nvars, text)
        return -p if isinstance(node.op, ast.USub) else p
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _eval_node(node.left, nvars, text)
            expo = _eval_node(node.right, nvars, text)
            if not expo.is_constant() or expo.constant_term().denominator != 1 or expo.constant_term() < 0:
                raise ParseError("exponent must be a nonnegative integer", where)
            return base ** int(expo.constant_term())
        left = _eval_node(node.left, nvars, text)
        right = _eval_node(node.right, nvars, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or not right.constant_term():
                raise ParseError("division only by nonzero constants", where)
            return left.scale(1 / right.constant_term())
    raise ParseError(f"unsupported expression in {text!r}", where)


def arith(kind: str, p: Poly, q) -> Poly:
    if kind == "add":
        return p + q
    if kind == "mul":
        return p * q
    if kind == "scale":
        return p.scale(q)
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def partial(p: Poly, i: int) -> Poly:
    return p.partial(i)


def substitute_zero(p: Poly, indices: Iterable[int]) -> Poly:
    return p.substitute_zero(indices)


def eval_poly(p: Poly, point: Sequence) -> Fraction:
    return p.eval(point)
