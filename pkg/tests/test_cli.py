import io
import json
import random
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conred import randgen as rg
from conred.cartan import EndField, KForm, MultiVector
from conred.cgeo import ClassedSection, ConSpace, TrivBundle
from conred.cli import classify, reduce_object, run
from conred.errors import MalformedInput, ParseError
from conred.scene import Function, Scene, parse_key, scene_payload, to_payload

SCENES = Path(__file__).resolve().parent.parent / "scenes"
seeds = st.integers(0, 2**32 - 1)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, json.loads(out.getvalue()), err.getvalue()


def write_scene(tmp_path, data, name="scene.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_check_poisson_canonical_passes():
    code, rep, err = invoke("check", "poisson", str(SCENES / "canonical.json"), "pi")
    assert code == 0 and rep["verdict"] == "pass" and err.startswith("pass")


def test_check_poisson_reports_witness():
    code, rep, _ = invoke("check", "poisson", str(SCENES / "canonical.json"), "bad_pi")
    assert code == 1 and rep["witnesses"] == ["pi is not in the W-component"]


def test_classify_alpha_is_null():
    code, rep, _ = invoke("classify", str(SCENES / "alpha.json"), "alpha")
    assert code == 0 and rep["class"] == {"in_N": True, "in_W": True}


def test_reduce_outside_W_fails():
    code, rep, _ = invoke("reduce", str(SCENES / "canonical.json"), "g")
    assert code == 1 and rep["error"] == "NotInWobs"


def test_reduce_emits_a_loadable_scene():
    code, rep, _ = invoke("reduce", str(SCENES / "canonical.json"), "pi")
    assert code == 0
    scene = Scene(rep["reduced"])
    assert scene.space == ConSpace(2, 2, 0)
    assert classify(scene.get("pi")) == {"in_N": False, "in_W": True}


def test_cartan_ops():
    code, rep, _ = invoke("cartan", "d", str(SCENES / "alpha.json"), "alpha")
    assert code == 0 and rep["result"]["components"] == {"[1,2]": "1"}
    code, rep, _ = invoke("cartan", "lie", str(SCENES / "canonical.json"), "X", "beta")
    assert rep["result"]["components"] == {"[2]": "x3 + x4", "[4]": "x1"}
    code, rep, _ = invoke("cartan", "schouten", str(SCENES / "canonical.json"), "X", "f")
    assert code == 0 and rep["result"]["degree"] == 0


def test_cartan_arity_is_malformed():
    code, rep, _ = invoke("cartan", "insert", str(SCENES / "canonical.json"), "X")
    assert code == 2 and rep["verdict"] == "error"


def test_unknown_identifier_and_usage():
    assert invoke("classify", str(SCENES / "canonical.json"), "nope")[0] == 2
    assert invoke("frobnicate")[0] == 2
    assert invoke("check", "nonsense", str(SCENES / "canonical.json"), "pi")[0] == 2


def test_missing_file_is_malformed(tmp_path):
    assert invoke("classify", str(tmp_path / "absent.json"), "x")[0] == 2


def test_parse_errors_carry_locations(tmp_path):
    path = write_scene(tmp_path, {"space": {"dims": [2, 1, 1]},
                                  "objects": {"f": {"kind": "function", "poly": "x1 +* 2"}}})
    code, rep, _ = invoke("classify", path, "f")
    assert code == 2 and rep["error"] == "ParseError" and rep["location"] == "objects.f.poly"
    bad_json = tmp_path / "broken.json"
    bad_json.write_text('{"space": ')
    code, rep, _ = invoke("classify", str(bad_json), "f")
    assert code == 2 and rep["location"].endswith(":1:11")


def test_parse_key():
    assert parse_key("[1,3]", "k") == (0, 2)
    for bad in ("[3,1]", "[1,1]", "[0]", "x"):
        with pytest.raises(ParseError):
            parse_key(bad, "k")


def test_reference_cycle_is_malformed(tmp_path):
    path = write_scene(tmp_path, {"space": {"dims": [2, 2, 0]},
                                  "objects": {"a": {"kind": "dirac", "of": "b"}, "b": {"kind": "dirac", "of": "a"}}})
    assert invoke("classify", path, "a")[0] == 2


def test_output_is_deterministic():
    argv = ("check", "dirac", str(SCENES / "canonical.json"), "L")
    first, second = io.StringIO(), io.StringIO()
    run(list(argv), first, io.StringIO())
    run(list(argv), second, io.StringIO())
    assert first.getvalue() == second.getvalue()


def test_check_kinds_on_an_algebroid_scene(tmp_path):
    data = {
        "space": {"dims": [2, 1, 1]},
        "objects": {
            "TA": {"kind": "algebroid", "of": "tangent"},
            "id": {"kind": "morphism", "source": {"kind": "bundle", "of": "tangent"},
                   "target": {"kind": "bundle", "of": "tangent"},
                   "base_map": ["x1", "x2"], "matrix": [["1", "0"], ["0", "1"]]},
            "m": {"kind": "algebroid_morphism", "morphism": "id", "source": "TA", "target": "TA"},
            "twist": {"kind": "morphism", "source": {"kind": "bundle", "classes": ["N", "W"]},
                      "target": {"kind": "bundle", "classes": ["N", "W"]},
                      "base_map": ["x1", "x2"], "matrix": [["1", "0"], ["0", "x1"]]},
        },
    }
    path = write_scene(tmp_path, data)
    assert invoke("check", "algebroid", path, "TA")[0] == 0
    assert invoke("check", "morphism", path, "m")[0] == 0
    assert invoke("check", "comorphism", path, "m")[0] == 0
    assert invoke("check", "bundle-morphism", path, "id")[0] == 0
    code, rep, _ = invoke("check", "bundle-morphism", path, "twist")
    assert code == 1 and rep["connection_ok"] is False
    assert invoke("check", "poisson", path, "TA")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "conred", "classify", str(SCENES / "alpha.json"), "alpha"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["class"]["in_N"] is True


# --- round trip ----------------------------------------------------------------------


def _rand_W_object(rng):
    s = rg.rand_space(rng, 4)
    choice = rng.randrange(6)
    if choice == 0:
        return Function(s, rg.rand_in_W(rng, s))
    if choice == 1:
        return rg.rand_field(rng, s)
    if choice == 2:
        return rg.rand_form(rng, s, rng.randint(0, min(2, s.dT)), rng.choice(["strong", "tensor"]), "W")
    if choice == 3:
        return rg.rand_multivector(rng, s, rng.randint(0, min(2, s.dT)), "strong", "W")
    if choice == 4:
        return rg.rand_section(rng, TrivBundle(s, rg.rand_classes(rng, 3)))
    n = s.dT
    from conred.cindex import SlotClass
    cls = s.tangent_classes()
    # W entries on W->W slots, N entries where the hom rule demands it
    rows = []
    for tj in cls:
        row = []
        for si in cls:
            if (si is SlotClass.NULL and tj is not SlotClass.NULL) or (si.in_w and tj is SlotClass.TOTAL_ONLY):
                row.append(rg.rand_in_N(rng, s))
            elif si.in_w:
                row.append(rg.rand_in_W(rng, s))
            else:
                row.append(rg.rand_poly(rng, n, 2))
        rows.append(row)
    return EndField(s, rows)


@given(seeds)
def test_reduced_objects_round_trip(seed):
    rng = random.Random(seed)
    obj = _rand_W_object(rng)
    assert classify(obj).get("in_W", True)
    red = reduce_object(obj)
    scene = Scene.loads(json.dumps(scene_payload("r", red)))
    again = scene.get("r")
    assert to_payload(again) == to_payload(red)
    c = classify(again)
    assert c["in_W"] is True
    assert scene.space.dN == 0 and scene.space.dW == scene.space.dT


@given(seeds)
def test_payload_round_trip_before_reduction(seed):
    rng = random.Random(seed)
    obj = _rand_W_object(rng)
    scene = Scene.loads(json.dumps(scene_payload("o", obj)))
    assert to_payload(scene.get("o")) == to_payload(obj)
