"""Command line front end: ``conred {classify,reduce,check,cartan,selftest}``.

Reports go to stdout as JSON with sorted keys, a one-line summary goes to
stderr.  Exit status: 0 pass, 1 a check failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import selftest
from .algd import (
    AlgebroidData,
    BialgebroidData,
    check_bialgebroid,
    check_classical,
    check_comorphism,
    check_constraint,
    check_morphism,
    reduce_algebroid,
    reduce_algebroid_morphism,
)
from .cartan import (
    EndField,
    KForm,
    MultiVector,
    courant,
    de_rham,
    end_class,
    form_class,
    insertion,
    is_nijenhuis,
    lie_derivative,
    mv_class,
    nijenhuis,
    reduce_end,
    reduce_field,
    reduce_form,
    reduce_mv,
    schouten,
    vf_bracket,
)
from .cgeo import (
    BundleMorphism,
    ClassedSection,
    TrivBundle,
    check_bundle_morphism,
    fn_class,
    fn_reduce,
    reduce_bundle,
    reduce_morphism,
    reduce_section,
    section_class,
    tangent_bundle,
)
from .dirac import (
    DiracGraph,
    PNData,
    PoissonData,
    PresymplecticData,
    check_pn,
    check_poisson,
    check_presymplectic,
    dirac_check,
    dirac_reduce,
    poisson,
    presymplectic,
    reduce_pn,
    reduce_poisson,
    reduce_presymplectic,
)
from .errors import CheckFails, ConredError, MalformedInput, ParseError
from .poly import format_poly
from .scene import AlgebroidMorphism, Function, Scene, format_key, scene_payload, to_payload

CHECK_KINDS = ("poisson", "presymplectic", "dirac", "algebroid", "bialgebroid", "morphism",
               "comorphism", "pn", "bundle-morphism")
CARTAN_OPS = ("d", "lie", "insert", "schouten", "courant", "nijenhuis", "bracket")


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would print and exit on its own; route usage errors through the report path
    def error(self, message):
        raise _ArgumentError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conred", description="Exact constraint reduction toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("classify", help="W/N class of a scene object")
    c.add_argument("scene")
    c.add_argument("name")
    r = sub.add_parser("reduce", help="reduce a scene object; the output is itself a scene")
    r.add_argument("scene")
    r.add_argument("name")
    k = sub.add_parser("check", help="run a structural check")
    k.add_argument("kind", choices=CHECK_KINDS)
    k.add_argument("scene")
    k.add_argument("name")
    o = sub.add_parser("cartan", help="Cartan calculus operation on scene objects")
    o.add_argument("op", choices=CARTAN_OPS)
    o.add_argument("scene")
    o.add_argument("names", nargs="+")
    sub.add_parser("selftest", help="run the acceptance suite")
    return p


# ---------------------------------------------------------------------------
# classify


def _flags(c) -> dict:
    return {"in_N": c.in_N, "in_W": c.in_W}


def classify(obj) -> dict:
    if isinstance(obj, Function):
        return _flags(fn_class(obj.space, obj.poly))
    if isinstance(obj, ClassedSection):
        return _flags(section_class(obj))
    if isinstance(obj, KForm):
        return _flags(form_class(obj))
    if isinstance(obj, MultiVector):
        return _flags(mv_class(obj))
    if isinstance(obj, EndField):
        return _flags(end_class(obj))
    if isinstance(obj, PoissonData):
        return _flags(mv_class(obj.pi))
    if isinstance(obj, PresymplecticData):
        return _flags(form_class(obj.omega))
    if isinstance(obj, DiracGraph):
        return classify(obj.data)
    if isinstance(obj, PNData):
        return {"poisson": classify(obj.pi), "endfield": classify(obj.A)}
    if isinstance(obj, TrivBundle):
        return {"rank": list(obj.rank_triple()), "classes": [c.value for c in obj.slot_classes]}
    if isinstance(obj, BundleMorphism):
        chk = check_bundle_morphism(obj)
        return {"base_ok": chk.base_ok, "fiber_ok": chk.fiber_ok, "connection_ok": chk.connection_ok}
    if isinstance(obj, AlgebroidData):
        classical = check_classical(obj)
        out = {"classical": classical.ok}
        if classical.ok:
            out["constraint"] = check_constraint(obj).ok
        return out
    if isinstance(obj, BialgebroidData):
        return {"A": classify(obj.A), "Astar": classify(obj.Astar)}
    if isinstance(obj, AlgebroidMorphism):
        return {"morphism": classify(obj.morphism)}
    raise MalformedInput(f"cannot classify a {type(obj).__name__}")


# ---------------------------------------------------------------------------
# reduce


def reduce_object(obj):
    if isinstance(obj, Function):
        return Function(obj.space.reduced(), fn_reduce(obj.space, obj.poly))
    if isinstance(obj, ClassedSection):
        if obj.bundle == tangent_bundle(obj.bundle.base):
            return reduce_field(obj)
        return reduce_section(obj)
    if isinstance(obj, KForm):
        return reduce_form(obj)
    if isinstance(obj, MultiVector):
        return reduce_mv(obj)
    if isinstance(obj, EndField):
        return reduce_end(obj)
    if isinstance(obj, TrivBundle):
        return reduce_bundle(obj)
    if isinstance(obj, BundleMorphism):
        return reduce_morphism(obj)
    if isinstance(obj, AlgebroidData):
        return reduce_algebroid(obj)
    if isinstance(obj, BialgebroidData):
        rep = check_bialgebroid(obj)
        if not rep:
            raise CheckFails("; ".join(rep.failures))
        return BialgebroidData(reduce_algebroid(obj.A), reduce_algebroid(obj.Astar))
    if isinstance(obj, PoissonData):
        return reduce_poisson(obj)
    if isinstance(obj, PresymplecticData):
        return reduce_presymplectic(obj)
    if isinstance(obj, DiracGraph):
        return dirac_reduce(obj)
    if isinstance(obj, PNData):
        return reduce_pn(obj)
    if isinstance(obj, AlgebroidMorphism):
        return AlgebroidMorphism(reduce_algebroid_morphism(obj.morphism),
                                 reduce_algebroid(obj.source), reduce_algebroid(obj.target))
    raise MalformedInput(f"cannot reduce a {type(obj).__name__}")


# ---------------------------------------------------------------------------
# check


def _want(obj, types, what: str):
    if not isinstance(obj, types):
        raise MalformedInput(f"expected {what}, got {type(obj).__name__}")
    return obj


def run_check(kind: str, obj) -> dict:
    if kind == "poisson":
        P = poisson(obj) if isinstance(obj, MultiVector) else _want(obj, PoissonData, "a poisson object")
        rep = check_poisson(P)
        return {"ok": rep.ok, "witnesses": list(rep.failures)}
    if kind == "presymplectic":
        Q = presymplectic(obj) if isinstance(obj, KForm) else _want(obj, PresymplecticData, "a presymplectic object")
        rep = check_presymplectic(Q)
        return {"ok": rep.ok, "witnesses": list(rep.failures)}
    if kind == "dirac":
        if isinstance(obj, (PoissonData, PresymplecticData)):
            obj = DiracGraph.of(obj)
        rep = dirac_check(_want(obj, DiracGraph, "a dirac object"))
        return {"ok": rep.ok, "lagrangian": rep.lagrangian, "involutive": rep.involutive,
                "classes_ok": rep.classes_ok, "closedness_oracle": rep.oracle_involutive,
                "witnesses": list(rep.witnesses)}
    if kind == "algebroid":
        A = _want(obj, AlgebroidData, "an algebroid")
        classical = check_classical(A)
        if not classical:
            return {"ok": False, "classical": False, "witnesses": list(classical.failures)}
        rep = check_constraint(A)
        return {"ok": rep.ok, "classical": True, "constraint": rep.ok, "witnesses": list(rep.failures)}
    if kind == "bialgebroid":
        rep = check_bialgebroid(_want(obj, BialgebroidData, "a bialgebroid"))
        return {"ok": rep.ok, "witnesses": list(rep.failures)}
    if kind in ("morphism", "comorphism"):
        m = _want(obj, AlgebroidMorphism, "an algebroid_morphism")
        fn = check_morphism if kind == "morphism" else check_comorphism
        rep = fn(m.morphism, m.source, m.target)
        return {"ok": rep.ok, "witnesses": list(rep.failures)}
    if kind == "pn":
        rep = check_pn(_want(obj, PNData, "a pn object"))
        return {"ok": rep.ok, "poisson": rep.poisson.ok, "nijenhuis": rep.nijenhuis,
                "compatible": rep.compatible, "invariant": rep.invariant, "witnesses": list(rep.witnesses)}
    if kind == "bundle-morphism":
        chk = check_bundle_morphism(_want(obj, BundleMorphism, "a morphism"))
        return {"ok": chk.ok, "base_ok": chk.base_ok, "fiber_ok": chk.fiber_ok,
                "connection_ok": chk.connection_ok, "witnesses": list(chk.witnesses)}
    raise MalformedInput(f"unknown check {kind!r}")


# ---------------------------------------------------------------------------
# cartan


def _arity(names: Sequence[str], n: int, op: str) -> None:
    if len(names) != n:
        raise MalformedInput(f"cartan {op} takes {n} object(s), got {len(names)}")


def _as_mv(obj) -> MultiVector:
    if isinstance(obj, ClassedSection):
        return MultiVector.from_field(obj)
    if isinstance(obj, Function):
        return MultiVector(obj.space, 0, {(): obj.poly})
    return _want(obj, MultiVector, "a multivector")


def run_cartan(op: str, objs: list) -> dict:
    if op == "d":
        _arity(objs, 1, op)
        obj = objs[0]
        if isinstance(obj, Function):
            obj = KForm(obj.space, 0, {(): obj.poly})
        return {"result": to_payload(de_rham(_want(obj, KForm, "a form")))}
    if op in ("lie", "insert"):
        _arity(objs, 2, op)
        X, w = _want(objs[0], ClassedSection, "a field"), objs[1]
        if op == "lie" and isinstance(w, Function):
            return {"result": to_payload(Function(w.space, lie_derivative(X, w.poly)))}
        w = _want(w, KForm, "a form")
        return {"result": to_payload(lie_derivative(X, w) if op == "lie" else insertion(X, w))}
    if op == "schouten":
        _arity(objs, 2, op)
        return {"result": to_payload(schouten(_as_mv(objs[0]), _as_mv(objs[1])))}
    if op == "courant":
        _arity(objs, 4, op)
        X, Y = (_want(objs[i], ClassedSection, "a field") for i in (0, 2))
        a, b = (_want(objs[i], KForm, "a 1-form") for i in (1, 3))
        V, th = courant(X, a, Y, b)
        return {"result": {"field": to_payload(V), "form": to_payload(th)}}
    if op == "nijenhuis":
        _arity(objs, 1, op)
        A = _want(objs[0], EndField, "an endfield")
        torsion = {format_key(ij): [format_poly(c) for c in v.components]
                   for ij, v in sorted(nijenhuis(A).items()) if not v.is_zero()}
        return {"ok": is_nijenhuis(A), "torsion": torsion}
    if op == "bracket":
        if objs and isinstance(objs[0], AlgebroidData):
            _arity(objs, 3, op)
            A = objs[0]
            a, b = (_want(o, ClassedSection, "a section") for o in objs[1:])
            if a.bundle != A.bundle or b.bundle != A.bundle:
                raise MalformedInput("sections must live on the algebroid's bundle")
            return {"result": to_payload(ClassedSection(A.bundle, A.bracket(a.components, b.components)))}
        _arity(objs, 2, op)
        X, Y = (_want(o, ClassedSection, "a field") for o in objs)
        return {"result": to_payload(vf_bracket(X, Y))}
    raise MalformedInput(f"unknown cartan op {op!r}")


# ---------------------------------------------------------------------------
# driver


def _dispatch(args) -> dict:
    if args.command == "selftest":
        results = selftest.run_all()
        return {"ok": all(r[1] for r in results),
                "criteria": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results]}
    scene = Scene.load(args.scene)
    if args.command == "classify":
        return {"ok": True, "kind": scene.kind_of(args.name), "class": classify(scene.get(args.name))}
    if args.command == "reduce":
        red = reduce_object(scene.get(args.name))
        return {"ok": True, "reduced": scene_payload(args.name, red)}
    if args.command == "check":
        return run_check(args.kind, scene.get(args.name))
    return run_cartan(args.op, [scene.get(n) for n in args.names])


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    report: dict[str, Any] = {"command": argv}
    try:
        args = _parser().parse_args(argv)
        body = _dispatch(args)
        report.update(body)
        code = 0 if body.get("ok", True) else 1
        report["verdict"] = "pass" if code == 0 else "fail"
    except _ArgumentError as exc:
        report.update(verdict="error", error="UsageError", message=str(exc))
        code = 2
    except ParseError as exc:
        report.update(verdict="error", error="ParseError", message=str(exc), location=exc.location)
        code = 2
    except MalformedInput as exc:
        report.update(verdict="error", error=type(exc).__name__, message=str(exc))
        code = 2
    except ConredError as exc:
        report.update(verdict="fail", error=type(exc).__name__, message=str(exc))
        code = 1
    out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    summary = report["verdict"]
    if "error" in report:
        summary += f": {report['error']}: {report['message']}"
    err.write(summary + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
