from dataclasses import replace
from fractions import Fraction

import pytest

from gearkin.crosscheck import compare_methods, reconcile
from gearkin.matroid import solve_transfer_ratios
from gearkin.mechanism import mechanism_from_dict
from gearkin.tt import (
    MeshAssignment,
    TTError,
    assign_meshes,
    derive_mesh_sign,
    f_circuit,
    f_circuit_equations,
    find_transfer_vertex,
    solve_tt,
    terminal_equation,
)

GRM_TT = [
    ["-n41", "0", "0"],
    ["-n41*n52", "-n52", "0"],
    ["-n41*n52*n67*n73", "-n52*n67*n73", "-n67*n73"],
    ["-n41*n52*n67", "-n52*n67", "-n67"],
]


def undeclared(m):
    return replace(m, meshes=tuple(replace(g, declared_sign=None) for g in m.meshes))


def test_carriers(grm):
    assert [find_transfer_vertex(g, grm) for g in grm.meshes] == [0, 1, 2, 2]
    axes = [(a.tail_axis_label, a.head_axis_label) for a in assign_meshes(grm)]
    assert axes == [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]


def test_terminal_equations(grm):
    rendered = [terminal_equation(a).render() for a in assign_meshes(grm)]
    assert rendered == ["w40 = -n14*w10", "w51 = -n25*w21", "w62 = -n76*w72", "w72 = n37*w32"]


def test_unit_ratio_coupling():
    a = MeshAssignment(1, 4, 5, 9, "a", "b", Fraction(1), 1)
    ((p_tail, k_tail), (p_head, k_head)) = terminal_equation(a).coefficients
    assert (p_tail, p_head) == ((4, 9), (5, 9))
    assert k_tail == 1 and k_head == -1


def test_f_circuits(grm):
    assert f_circuit(grm, 5, 1).render(grm) == "w51 = -w10 + w50"
    assert f_circuit(grm, 6, 2).render(grm) == "w62 = -w21 + w61"
    assert f_circuit(grm, 4, 0).render(grm) == "w40 = w40"
    assert len(f_circuit_equations(grm)) == 8


def test_f_circuit_holds_on_link_velocities(grm):
    # absolute link speeds, arbitrary; joint rate = head speed - tail speed
    speed = {l.id: Fraction(l.id * l.id - 3 * l.id + 1) for l in grm.links}
    rates = {j.id: speed[j.head] - speed[j.tail] for j in grm.turning}
    for eq in f_circuit_equations(grm):
        assert eq.evaluate(rates) == speed[eq.link] - speed[eq.carrier]


def test_grm_tt_matrix(grm):
    X = solve_tt(grm)
    assert X.row_labels == ("w10", "w21", "w32", "w72")
    assert X.col_labels == ("w40", "w50", "w61")
    assert X.row_joints == (10, 12, 14, 13)
    assert X.formatted() == GRM_TT


def test_grm_tt_equals_matroid_after_renaming(grm):
    mat = solve_transfer_ratios(grm)
    rec = reconcile(grm, solve_tt(grm), mat, ratios=True)
    assert rec.row_labels == ("w10", "w21", "w72", "w32")
    assert rec.first_difference(mat) is None
    assert compare_methods(grm).matched
    assert compare_methods(grm, ratios=True).matched


def test_derived_signs(grm):
    bare = undeclared(grm)
    assert [derive_mesh_sign(bare, g) for g in bare.meshes] == [-1, -1, -1, 1]
    flipped = replace(grm.meshes[0], declared_sign=1)
    assert derive_mesh_sign(grm, flipped) == 1
    assert solve_tt(bare).formatted() == GRM_TT


def test_small_fixtures(minimal, two_stage):
    assert solve_tt(minimal).formatted() == [["-n12"]]
    assert solve_tt(minimal, symbolic_ratios=False).formatted() == [["-d1/d2"]]
    assert solve_tt(two_stage, symbolic_ratios=False).formatted() == [["-2/3"], ["1/2"]]


def chain(axes, mesh, extra=None):
    """Links 0..n in a chain with the given axis labels; one mesh."""
    n = len(axes)
    doc = {
        "links": [{"id": i} for i in range(n + 1)],
        "turning_joints": [
            {"id": n + 1 + i, "tail": i, "head": i + 1, "axis": ax, "phi_deg": 0, "y": 5 * i, "z": 0}
            for i, ax in enumerate(axes)
        ],
        "gear_meshes": [
            {"id": 2 * n + 1, "tail": mesh[0], "head": mesh[1], "d_tail": 2, "d_head": 2,
             "phi_deg": 0, "y": 1, "z": 0, **(extra or {})}
        ],
        "inputs": list(range(n + 1, 2 * n)),
    }
    return mechanism_from_dict(doc)


def test_degenerate_mesh():
    m = chain(["a", "a"], (0, 2))
    with pytest.raises(TTError, match="degenerate mesh"):
        find_transfer_vertex(m.meshes[0], m)


def test_ambiguous_carrier():
    m = chain(["a", "b", "c"], (0, 3))
    with pytest.raises(TTError, match="ambiguous carrier"):
        find_transfer_vertex(m.meshes[0], m)


def test_single_edge_path_is_degenerate():
    m = chain(["a"], (0, 1))
    with pytest.raises(TTError, match="degenerate"):
        solve_tt(m)


def test_underivable_sign_is_reported():
    m = chain(["a", "b"], (0, 2), {"y": 0})  # pitch point on the tail-side axis
    with pytest.raises(TTError, match="sign underivable"):
        derive_mesh_sign(m, m.meshes[0])
    declared = chain(["a", "b"], (0, 2), {"y": 0, "sign": -1})
    assert derive_mesh_sign(declared, declared.meshes[0]) == -1


def test_inputs_that_do_not_determine_network(grm):
    with pytest.raises(TTError, match="inputs do not determine the T-T network"):
        solve_tt(grm.with_inputs([8, 9, 10]))
