import copy
import json
from fractions import Fraction

import pytest

from gearkin.exact import RationalFunction
from gearkin.mechanism import (
    MechanismError,
    dump_mechanism,
    exact_sin_cos,
    gear_ratio,
    is_exact_angle,
    kutzbach_dof,
    load_mechanism,
    mechanism_from_dict,
    mechanism_to_dict,
    parse_scalar,
)

from conftest import DATA


def base_doc():
    return json.loads((DATA / "minimal.json").read_text())


def expect_error(doc, fragment, location=None):
    with pytest.raises(MechanismError) as exc:
        mechanism_from_dict(doc)
    assert fragment in exc.value.message
    if location is not None:
        assert exc.value.location == location
    return exc.value


def test_grm_counts(grm):
    assert (grm.n, grm.t, grm.c, grm.k) == (7, 7, 4, 11)
    assert grm.turning_ids == (8, 9, 10, 11, 12, 13, 14)
    assert grm.mesh_ids == (15, 16, 17, 18)
    assert grm.inputs == (8, 9, 11)
    assert grm.outputs == (10, 12, 13, 14)
    assert kutzbach_dof(grm) == 3


def test_symbols_keep_declaration_order(grm):
    assert grm.symbols[:8] == ("d1", "d2", "d3", "d4", "d5", "d6", "d7p", "d7pp")
    d4 = grm.joint(15).diameter_tail
    assert isinstance(d4, RationalFunction) and str(d4) == "d4"


def test_gear_ratio(minimal, two_stage):
    assert str(gear_ratio(minimal.meshes[0])) == "d1/d2"
    assert gear_ratio(two_stage.meshes[0]) == Fraction(2, 3)


def test_tree_paths(grm):
    assert [s[0] for s in grm.tree_path(4, 1)] == [8, 10]
    assert [s[0] for s in grm.tree_path(6, 7)] == [11, 12, 13]
    assert grm.tree_path(3, 3) == []
    assert grm.child_link(13) == 7


def test_round_trip(grm, minimal, two_stage):
    for m in (grm, minimal, two_stage):
        again = load_mechanism(dump_mechanism(m))
        assert mechanism_to_dict(again) == mechanism_to_dict(m)


def test_teeth_stand_in_for_missing_diameters():
    doc = base_doc()
    g = doc["gear_meshes"][0]
    del g["d_tail"], g["d_head"]
    g.update(teeth_tail=20, teeth_head=30, y=10)
    doc["turning_joints"][1]["y"] = 25
    m = mechanism_from_dict(doc)
    assert gear_ratio(m.meshes[0]) == Fraction(2, 3)


def test_parse_scalar_linear_grammar():
    assert parse_scalar(3) == {None: Fraction(3)}
    assert parse_scalar("d1/2 + d2/2") == {"d1": Fraction(1, 2), "d2": Fraction(1, 2)}
    assert parse_scalar("-(d1 + d4)/2") == {"d1": Fraction(-1, 2), "d4": Fraction(-1, 2)}
    assert parse_scalar("A1 - 2*d2") == {"A1": Fraction(1), "d2": Fraction(-2)}
    for bad in ("d1*d2", "1/d1", "d1**2", "foo(", True):
        with pytest.raises(MechanismError):
            parse_scalar(bad)


def test_exact_angles():
    assert exact_sin_cos(90) == (1, 0)
    assert exact_sin_cos(-90) == (-1, 0)
    assert exact_sin_cos(450) == (1, 0)
    assert is_exact_angle(180) and not is_exact_angle(30)
    s, c = exact_sin_cos(30)
    assert abs(s - Fraction(1, 2)) < Fraction(1, 10**60)


def test_bind_and_scale(grm, minimal):
    half = minimal.bind({"d1": 2})
    assert half.used_symbols() == {"d2"}
    scaled = minimal.bind({"d1": 2, "d2": 3}).scaled(5)
    assert scaled.meshes[0].diameter_tail == 10
    assert scaled.turning[1].y == Fraction(25, 2)


def test_json_syntax_error_has_location():
    with pytest.raises(MechanismError) as exc:
        load_mechanism('{"links": [\n')
    assert exc.value.location.startswith("line 2")


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d["links"].pop(0), "ground link"),
        (lambda d: d["links"].append({"id": 7}), "contiguous"),
        (lambda d: d["links"].append({"id": 1}), "duplicate link ids"),
        (lambda d: d["turning_joints"][1].update(id=9), "block"),
        (lambda d: d["turning_joints"][1].update(head=1), "spanning tree"),
        (lambda d: d["turning_joints"][1].update(tail=2), "same link"),
        (lambda d: d["gear_meshes"][0].update(head=9), "unknown link"),
        (lambda d: d["gear_meshes"][0].update(d_head=0), "strictly positive"),
        (lambda d: d["gear_meshes"][0].update(sign=2), "sign must be"),
        (lambda d: d["gear_meshes"][0].update(x=1), "y-z plane"),
        (lambda d: d["turning_joints"][1].update(axis="a", phi_deg=90), "offset angle"),
        (lambda d: d["turning_joints"][1].update(phi_deg=30), "no exact sine"),
        (lambda d: d.update(inputs=[3, 4]), "degrees of freedom"),
        (lambda d: d.update(inputs=[5]), "not a turning joint"),
        (lambda d: d.update(inputs=[3, 3]), "duplicate input"),
        (lambda d: d["turning_joints"][0].pop("axis"), "missing field"),
        (lambda d: d["gear_meshes"][0].update(y="d1*d2"), "not linear"),
        (lambda d: d.update(symbols=["d1"]), "not declared"),
    ],
)
def test_validation_errors(mutate, fragment):
    doc = base_doc()
    mutate(doc)
    expect_error(doc, fragment)


def test_teeth_must_agree_with_numeric_diameters():
    doc = base_doc()
    g = doc["gear_meshes"][0]
    g.update(d_tail=4, d_head=6, teeth_tail=20, teeth_head=20, y=2)
    doc["turning_joints"][1]["y"] = 5
    expect_error(doc, "teeth ratio", "gear_meshes[id=5]")


def test_inexact_angles_allowed_when_numeric():
    doc = {
        "links": [{"id": 0}, {"id": 1}],
        "turning_joints": [{"id": 2, "tail": 0, "head": 1, "axis": "a", "phi_deg": 30, "y": 0, "z": 0}],
        "inputs": [2],
    }
    m = mechanism_from_dict(copy.deepcopy(doc))
    assert m.c == 0 and m.inputs == (2,)
