"""JSON scene files: parsing named objects and serializing results.

A scene looks like::

    {"space": {"dims": [4, 3, 1]},
     "spaces": {"target": {"dims": [2, 2, 1]}},
     "objects": {"pi": {"kind": "poisson", "bivector": {"kind": "multivector", "degree": 2,
                                                       "components": {"[2,3]": "1", "[1,4]": "1"}}}}}

Anywhere an object is expected, either an identifier or an inline object
may appear.  Indices in files are 1-based.
"""

from __future__ import annotations

import json
from typing import Any

from .algd import AlgebroidData, BialgebroidData, tangent_algebroid
from .cartan import EndField, KForm, MultiVector, vector_field
from .cgeo import (
    BundleMorphism,
    ClassedSection,
    ConSpace,
    TrivBundle,
    cotangent_bundle,
    tangent_bundle,
)
from .cindex import SlotClass
from .dirac import DiracGraph, PNData, PoissonData, PresymplecticData, cotangent_algebroid
from .errors import MalformedInput, ParseError
from .poly import Poly, format_poly, parse_poly

KINDS = ("function", "field", "form", "multivector", "endfield", "bundle", "section", "morphism",
         "algebroid", "bialgebroid", "poisson", "presymplectic", "dirac", "pn", "algebroid_morphism")


class AlgebroidMorphism:
    __slots__ = ("morphism", "source", "target")

    def __init__(self, morphism: BundleMorphism, source: AlgebroidData, target: AlgebroidData):
        self.morphism, self.source, self.target = morphism, source, target


class Function:
    """A polynomial tagged with the space it lives on."""

    __slots__ = ("space", "poly")

    def __init__(self, space: ConSpace, poly: Poly):
        self.space, self.poly = space, poly


def parse_key(key: str, where: str) -> tuple[int, ...]:
    """``"[1,3]"`` to the 0-based tuple ``(0, 2)``; unsorted or repeated keys are rejected."""
    try:
        idx = json.loads(key)
    except json.JSONDecodeError:
        raise ParseError(f"bad index key {key!r}", where) from None
    if not isinstance(idx, list) or any(type(i) is not int or i < 1 for i in idx):
        raise ParseError(f"index key {key!r} must be a list of positive integers", where)
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ParseError(f"index key {key!r} is not strictly increasing", where)
    return tuple(i - 1 for i in idx)


def format_key(I) -> str:
    return "[" + ",".join(str(i + 1) for i in I) + "]"


class Scene:
    def __init__(self, data: Any, source: str = "<scene>"):
        if not isinstance(data, dict):
            raise ParseError("scene must be a JSON object", source)
        self.source = source
        self.raw_spaces = data.get("spaces", {})
        if not isinstance(self.raw_spaces, dict):
            raise ParseError("'spaces' must be an object", source)
        if "space" not in data:
            raise ParseError("scene needs a 'space' entry", source)
        self.space = self._space(data["space"], "space")
        self.raw = data.get("objects", {})
        if not isinstance(self.raw, dict):
            raise ParseError("'objects' must be an object", source)
        self._cache: dict[str, Any] = {}
        self._active: set[str] = set()

    @classmethod
    def load(cls, path: str) -> Scene:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInput(f"cannot read scene {path}: {exc.strerror}") from None
        return cls.loads(text, path)

    @classmethod
    def loads(cls, text: str, source: str = "<scene>") -> Scene:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"{source}:{exc.lineno}:{exc.colno}") from None
        return cls(data, source)

    # -- helpers --------------------------------------------------------

    def _space(self, spec, where: str) -> ConSpace:
        if isinstance(spec, str):
            if spec not in self.raw_spaces:
                raise MalformedInput(f"unknown space {spec!r} at {where}")
            return self._space(self.raw_spaces[spec], f"spaces.{spec}")
        if not isinstance(spec, dict) or "dims" not in spec:
            raise ParseError("space needs 'dims'", where)
        dims = spec["dims"]
        if not isinstance(dims, list) or len(dims) != 3 or any(type(d) is not int for d in dims):
            raise ParseError("'dims' must be three integers [dT, dW, dN]", where)
        try:
            return ConSpace(*dims)
        except Exception as exc:
            raise ParseError(str(exc), where) from None

    def _obj_space(self, spec: dict, where: str) -> ConSpace:
        return self._space(spec["space"], where) if "space" in spec else self.space

    def _poly(self, text, space: ConSpace, where: str) -> Poly:
        if isinstance(text, int) and not isinstance(text, bool):
            text = str(text)
        try:
            return parse_poly(text, space.dT)
        except ParseError as exc:
            raise ParseError(str(exc), where) from None

    def _polys(self, items, space: ConSpace, where: str) -> list[Poly]:
        if not isinstance(items, list):
            raise ParseError("expected a list of polynomials", where)
        return [self._poly(t, space, f"{where}[{k}]") for k, t in enumerate(items)]

    def _matrix(self, rows, space: ConSpace, where: str) -> list[list[Poly]]:
        if not isinstance(rows, list):
            raise ParseError("expected a matrix (list of rows)", where)
        return [self._polys(r, space, f"{where}[{k}]") for k, r in enumerate(rows)]

    def _need(self, spec: dict, key: str, where: str):
        if key not in spec:
            raise ParseError(f"missing field {key!r}", where)
        return spec[key]

    # -- resolution -----------------------------------------------------

    def names(self) -> list[str]:
        return list(self.raw)

    def get(self, name: str):
        if name not in self.raw:
            raise MalformedInput(f"unknown identifier {name!r}")
        if name in self._cache:
            return self._cache[name]
        if name in self._active:
            raise MalformedInput(f"cyclic reference through {name!r}")
        self._active.add(name)
        try:
            obj = self.build(self.raw[name], f"objects.{name}")
        finally:
            self._active.discard(name)
        self._cache[name] = obj
        return obj

    def ref(self, spec, where: str, expect: tuple[type, ...] | None = None):
        obj = self.get(spec) if isinstance(spec, str) else self.build(spec, where)
        if expect and not isinstance(obj, expect):
            raise MalformedInput(f"{where} has the wrong kind of object")
        return obj

    def kind_of(self, name: str) -> str:
        self.get(name)
        return self.raw[name]["kind"]

    def build(self, spec, where: str):
        if not isinstance(spec, dict):
            raise ParseError("object must be a JSON object", where)
        kind = spec.get("kind")
        if kind not in KINDS:
            raise ParseError(f"unknown object kind {kind!r}", where)
        return getattr(self, "_build_" + kind)(spec, where)

    def _build_function(self, spec, where):
        space = self._obj_space(spec, where)
        return Function(space, self._poly(self._need(spec, "poly", where), space, f"{where}.poly"))

    def _build_field(self, spec, where):
        space = self._obj_space(spec, where)
        comps = self._polys(self._need(spec, "components", where), space, f"{where}.components")
        if len(comps) != space.dT:
            raise ParseError(f"field needs {space.dT} components", where)
        return vector_field(space, comps)

    def _alt(self, spec, where, cls):
        space = self._obj_space(spec, where)
        degree = self._need(spec, "degree", where)
        if type(degree) is not int or degree < 0:
            raise ParseError("'degree' must be a nonnegative integer", where)
        flavor = spec.get("flavor", "strong")
        raw = self._need(spec, "components", where)
        if not isinstance(raw, dict):
            raise ParseError("'components' must map index keys to polynomials", where)
        comps = {}
        for key, text in raw.items():
            I = parse_key(key, f"{where}.components")
            if len(I) != degree or any(i >= space.dT for i in I):
                raise ParseError(f"index key {key} does not fit degree {degree} on {space.dT} coordinates", where)
            comps[I] = self._poly(text, space, f"{where}.components[{key}]")
        return cls(space, degree, comps, flavor)

    def _build_form(self, spec, where):
        return self._alt(spec, where, KForm)

    def _build_multivector(self, spec, where):
        return self._alt(spec, where, MultiVector)

    def _build_endfield(self, spec, where):
        space = self._obj_space(spec, where)
        return EndField(space, self._matrix(self._need(spec, "matrix", where), space, f"{where}.matrix"))

    def _build_bundle(self, spec, where):
        space = self._obj_space(spec, where)
        if "of" in spec:
            if spec["of"] == "tangent":
                return tangent_bundle(space)
            if spec["of"] == "cotangent":
                return cotangent_bundle(space)
            raise ParseError(f"unknown bundle {spec['of']!r}", where)
        classes = self._need(spec, "classes", where)
        if not isinstance(classes, list):
            raise ParseError("'classes' must be a list", where)
        try:
            return TrivBundle(space, tuple(SlotClass.parse(c) for c in classes))
        except ValueError as exc:
            raise ParseError(str(exc), where) from None

    def _build_section(self, spec, where):
        E = self.ref(self._need(spec, "bundle", where), f"{where}.bundle", (TrivBundle,))
        comps = self._polys(self._need(spec, "components", where), E.base, f"{where}.components")
        return ClassedSection(E, comps)

    def _build_morphism(self, spec, where):
        E = self.ref(self._need(spec, "source", where), f"{where}.source", (TrivBundle,))
        F = self.ref(self._need(spec, "target", where), f"{where}.target", (TrivBundle,))
        base = self._polys(self._need(spec, "base_map", where), E.base, f"{where}.base_map")
        mat = self._matrix(self._need(spec, "matrix", where), E.base, f"{where}.matrix")
        return BundleMorphism(E, F, base, mat)

    def _build_algebroid(self, spec, where):
        if "of" in spec:
            if spec["of"] == "tangent":
                return tangent_algebroid(self._obj_space(spec, where))
            if spec["of"] == "cotangent":
                P = self.ref(self._need(spec, "poisson", where), f"{where}.poisson", (PoissonData,))
                return cotangent_algebroid(P)
            raise ParseError(f"unknown algebroid {spec['of']!r}", where)
        E = self.ref(self._need(spec, "bundle", where), f"{where}.bundle", (TrivBundle,))
        anchor = self._matrix(self._need(spec, "anchor", where), E.base, f"{where}.anchor")
        struct = {}
        raw = spec.get("structure", {})
        if not isinstance(raw, dict):
            raise ParseError("'structure' must map index pairs to coefficient lists", where)
        for key, col in raw.items():
            I = parse_key(key, f"{where}.structure")
            if len(I) != 2 or I[1] >= E.rank:
                raise ParseError(f"structure key {key} must be a pair of slots", where)
            cs = self._polys(col, E.base, f"{where}.structure[{key}]")
            if len(cs) != E.rank:
                raise ParseError(f"structure entry {key} needs {E.rank} coefficients", where)
            for m, c in enumerate(cs):
                struct[(I[0], I[1], m)] = c
        return AlgebroidData(E, anchor, struct)

    def _build_bialgebroid(self, spec, where):
        A = self.ref(self._need(spec, "A", where), f"{where}.A", (AlgebroidData,))
        D = self.ref(self._need(spec, "Astar", where), f"{where}.Astar", (AlgebroidData,))
        return BialgebroidData(A, D)

    def _build_poisson(self, spec, where):
        P = self.ref(self._need(spec, "bivector", where), f"{where}.bivector", (MultiVector,))
        return PoissonData(P.space, P)

    def _build_presymplectic(self, spec, where):
        w = self.ref(self._need(spec, "form", where), f"{where}.form", (KForm,))
        return PresymplecticData(w.space, w)

    def _build_dirac(self, spec, where):
        return DiracGraph.of(self.ref(self._need(spec, "of", where), f"{where}.of",
                                      (PoissonData, PresymplecticData, MultiVector, KForm)))

    def _build_pn(self, spec, where):
        P = self.ref(self._need(spec, "poisson", where), f"{where}.poisson", (PoissonData,))
        A = self.ref(self._need(spec, "endfield", where), f"{where}.endfield", (EndField,))
        return PNData(P, A)

    def _build_algebroid_morphism(self, spec, where):
        phi = self.ref(self._need(spec, "morphism", where), f"{where}.morphism", (BundleMorphism,))
        A = self.ref(self._need(spec, "source", where), f"{where}.source", (AlgebroidData,))
        B = self.ref(self._need(spec, "target", where), f"{where}.target", (AlgebroidData,))
        return AlgebroidMorphism(phi, A, B)


# ---------------------------------------------------------------------------
# serialization


def space_payload(s: ConSpace) -> dict:
    return {"dims": list(s.dims)}


def _polys_out(ps) -> list[str]:
    return [format_poly(p) for p in ps]


def to_payload(obj) -> dict:
    """Inline scene object for ``obj``; every payload carries its own space."""
    if isinstance(obj, Function):
        return {"kind": "function", "space": space_payload(obj.space), "poly": format_poly(obj.poly)}
    if isinstance(obj, TrivBundle):
        return {"kind": "bundle", "space": space_payload(obj.base), "classes": [c.value for c in obj.slot_classes]}
    if isinstance(obj, ClassedSection):
        if obj.bundle == tangent_bundle(obj.bundle.base):
            return {"kind": "field", "space": space_payload(obj.bundle.base), "components": _polys_out(obj.components)}
        return {"kind": "section", "bundle": to_payload(obj.bundle), "components": _polys_out(obj.components)}
    if isinstance(obj, (KForm, MultiVector)):
        return {
            "kind": "form" if isinstance(obj, KForm) else "multivector",
            "space": space_payload(obj.space),
            "degree": obj.degree,
            "flavor": obj.flavor,
            "components": {format_key(I): format_poly(c) for I, c in sorted(obj.comps.items())},
        }
    if isinstance(obj, EndField):
        return {"kind": "endfield", "space": space_payload(obj.space), "matrix": [_polys_out(r) for r in obj.matrix]}
    if isinstance(obj, BundleMorphism):
        return {
            "kind": "morphism",
            "source": to_payload(obj.source),
            "target": to_payload(obj.target),
            "base_map": _polys_out(obj.base_map),
            "matrix": [_polys_out(r) for r in obj.matrix],
        }
    if isinstance(obj, AlgebroidData):
        k = obj.rank
        struct = {}
        for i in range(k):
            for j in range(i + 1, k):
                col = obj.struct[i][j]
                if any(col):
                    struct[format_key((i, j))] = _polys_out(col)
        return {"kind": "algebroid", "bundle": to_payload(obj.bundle),
                "anchor": [_polys_out(r) for r in obj.anchor], "structure": struct}
    if isinstance(obj, BialgebroidData):
        return {"kind": "bialgebroid", "A": to_payload(obj.A), "Astar": to_payload(obj.Astar)}
    if isinstance(obj, PoissonData):
        return {"kind": "poisson", "bivector": to_payload(obj.pi)}
    if isinstance(obj, PresymplecticData):
        return {"kind": "presymplectic", "form": to_payload(obj.omega)}
    if isinstance(obj, DiracGraph):
        return {"kind": "dirac", "of": to_payload(obj.data)}
    if isinstance(obj, PNData):
        return {"kind": "pn", "poisson": to_payload(obj.pi), "endfield": to_payload(obj.A)}
    if isinstance(obj, AlgebroidMorphism):
        return {"kind": "algebroid_morphism", "morphism": to_payload(obj.morphism),
                "source": to_payload(obj.source), "target": to_payload(obj.target)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def object_space(obj) -> ConSpace:
    for attr in ("space", "base"):
        if hasattr(obj, attr):
            return getattr(obj, attr)
    if isinstance(obj, ClassedSection):
        return obj.bundle.base
    if isinstance(obj, BundleMorphism):
        return obj.source.base
    if isinstance(obj, BialgebroidData):
        return obj.A.base
    if isinstance(obj, PNData):
        return obj.pi.space
    if isinstance(obj, AlgebroidMorphism):
        return obj.morphism.source.base
    raise TypeError(f"no space for {type(obj).__name__}")


def scene_payload(name: str, obj) -> dict:
    """A complete one-object scene, loadable by :class:`Scene`."""
    return {"space": space_payload(object_space(obj)), "objects": {name: to_payload(obj)}}
