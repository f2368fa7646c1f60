"""Seeded random objects for property checks: flags, polynomials, classed tensors."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .calg import ConVectorSpace
from .cartan import KForm, MultiVector, vector_field
from .cgeo import BundleMorphism, ClassedSection, ConSpace, TrivBundle
from .cindex import SlotClass, tuple_class
from .exact import Subspace
from .poly import Poly


def rand_vector(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(lo, hi)) for _ in range(n))


def rand_flag(rng: random.Random, n: int) -> ConVectorSpace:
    """Random ``N ⊆ W ⊆ Q^n`` built from random integer spanning vectors."""
    kW = rng.randint(0, n)
    W = Subspace(n, [rand_vector(rng, n) for _ in range(kW)])
    kN = rng.randint(0, W.dim)
    coeffs = [rand_vector(rng, W.dim) for _ in range(kN)]
    N = Subspace(n, [tuple(sum((c[i] * W.basis[i][a] for i in range(W.dim)), Fraction(0)) for a in range(n))
                     for c in coeffs])
    return ConVectorSpace(n, W, N)


def rand_poly(rng: random.Random, nvars: int, degree: int = 2, terms: int = 3,
              variables: Sequence[int] | None = None) -> Poly:
    pool = list(range(nvars)) if variables is None else list(variables)
    out = {}
    for _ in range(terms):
        e = [0] * nvars
        if pool:
            for _ in range(rng.randint(0, degree)):
                e[rng.choice(pool)] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + rng.randint(-3, 3)
    return Poly(nvars, out)


def rand_in_N(rng: random.Random, space: ConSpace, degree: int = 2) -> Poly:
    """Sum of normal coordinates times arbitrary polynomials."""
    out = Poly.zero(space.dT)
    for j in space.normal:
        if rng.random() < 0.7:
            out = out + Poly.var(space.dT, j) * rand_poly(rng, space.dT, max(degree - 1, 0), 2)
    return out


def rand_in_W(rng: random.Random, space: ConSpace, degree: int = 2) -> Poly:
    """Transverse-only polynomial plus an element of the vanishing ideal."""
    return rand_poly(rng, space.dT, degree, 3, space.transverse) + rand_in_N(rng, space, degree)


def rand_by_class(rng: random.Random, space: ConSpace, cls: SlotClass, degree: int = 2) -> Poly:
    """Coefficient making a slot of class ``cls`` W-admissible."""
    if cls is SlotClass.NULL:
        return rand_poly(rng, space.dT, degree)
    if cls is SlotClass.WOBS_ONLY:
        return rand_in_W(rng, space, degree)
    return rand_in_N(rng, space, degree)


def rand_space(rng: random.Random, max_dim: int = 4, min_dim: int = 1) -> ConSpace:
    dT = rng.randint(min_dim, max_dim)
    dW = rng.randint(0, dT)
    dN = rng.randint(0, dW)
    return ConSpace(dT, dW, dN)


def rand_classes(rng: random.Random, k: int) -> tuple[SlotClass, ...]:
    return tuple(rng.choice(list(SlotClass)) for _ in range(k))


def rand_section(rng: random.Random, E: TrivBundle, wobs: bool = True, degree: int = 2) -> ClassedSection:
    space = E.base
    if wobs:
        comps = [rand_by_class(rng, space, c, degree) for c in E.slot_classes]
    else:
        comps = [rand_poly(rng, space.dT, degree) for _ in E.slot_classes]
    return ClassedSection(E, comps)


def rand_null_section(rng: random.Random, E: TrivBundle, degree: int = 2) -> ClassedSection:
    space = E.base
    comps = [rand_poly(rng, space.dT, degree) if c is SlotClass.NULL else rand_in_N(rng, space, degree)
             for c in E.slot_classes]
    return ClassedSection(E, comps)


def rand_field(rng: random.Random, space: ConSpace, wobs: bool = True, degree: int = 2) -> ClassedSection:
    classes = space.tangent_classes()
    if wobs:
        comps = [rand_by_class(rng, space, c, degree) for c in classes]
    else:
        comps = [rand_poly(rng, space.dT, degree) for _ in classes]
    return vector_field(space, comps)


def _rand_alt(rng, cls, space: ConSpace, k: int, flavor: str, mode: str, degree: int, density: float):
    proto = cls(space, k, {}, flavor)
    slots = proto.slot_classes()
    comps = {}
    for I in itertools.combinations(range(space.dT), k):
        if rng.random() > density:
            continue
        tc = tuple_class(slots, I, flavor)
        if mode == "any":
            comps[I] = rand_poly(rng, space.dT, degree)
        elif mode == "W":
            comps[I] = rand_by_class(rng, space, tc, degree)
        else:
            comps[I] = rand_poly(rng, space.dT, degree) if tc is SlotClass.NULL else rand_in_N(rng, space, degree)
    return cls(space, k, comps, flavor)


def rand_form(rng: random.Random, space: ConSpace, k: int, flavor: str = "strong", mode: str = "any",
              degree: int = 2, density: float = 0.7) -> KForm:
    """``mode`` is ``any``, ``W`` (W-component) or ``N`` (N-component)."""
    return _rand_alt(rng, KForm, space, k, flavor, mode, degree, density)


def rand_multivector(rng: random.Random, space: ConSpace, k: int, flavor: str = "strong", mode: str = "any",
                     degree: int = 2, density: float = 0.7) -> MultiVector:
    return _rand_alt(rng, MultiVector, space, k, flavor, mode, degree, density)


def rand_constraint_morphism(rng: random.Random, E: TrivBundle, flat: bool) -> BundleMorphism:
    """Endomorphism over a constraint base map; the W∖N block is leafwise constant iff ``flat``.

    When ``flat`` is false one W∖N entry picks up a leaf coordinate, so the
    base and fiber conditions hold but the connection condition fails.
    """
    s = E.base
    base = []
    for j in range(s.dT):
        if j < s.dN:
            base.append(rand_poly(rng, s.dT, 2))
        elif j < s.dW:
            base.append(rand_in_W(rng, s))
        else:
            base.append(rand_in_N(rng, s))
    cls = E.slot_classes
    mat = []
    for tj in cls:
        row = []
        for si in cls:
            vanish = (si is SlotClass.NULL and tj is not SlotClass.NULL) or (
                si is SlotClass.WOBS_ONLY and tj is SlotClass.TOTAL_ONLY)
            if vanish:
                row.append(rand_in_N(rng, s))
            elif si is SlotClass.WOBS_ONLY and tj is SlotClass.WOBS_ONLY:
                row.append(rand_in_W(rng, s))
            else:
                row.append(rand_poly(rng, s.dT, 2))
        mat.append(row)
    if not flat:
        mid = E.slots_of(SlotClass.WOBS_ONLY)
        j, i = rng.choice(mid), rng.choice(mid)
        leaf = Poly.var(s.dT, rng.randrange(s.dN))
        mat[j][i] = mat[j][i] + leaf * (1 + rand_poly(rng, s.dT, 1, 1, s.transverse) ** 2)
    return BundleMorphism(E, E, tuple(base), tuple(tuple(r) for r in mat))
