"""Through-and-across (T-T) oriented-graph velocity analysis.

Unknowns are the tree-edge relative velocities ``w<head><tail>``, one per
turning joint and equal to that joint's rate.  Each mesh contributes one
terminal equation between its two ports relative to the carrier link, and
each port is expanded into tree-edge velocities by a fundamental-circuit sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import GearkinError
from .exact import (
    ExactScalar,
    RationalFunctionField,
    SingularMatrixError,
    as_exact,
    sign_of,
    solve_linear,
)
from .matroid import moment_coefficient
from .mechanism import GearMesh, Mechanism, gear_ratio
from .transfer import TransferMatrix

__all__ = [
    "TTError",
    "MeshAssignment",
    "FCircuitEquation",
    "TerminalEquation",
    "omega_label",
    "edge_label",
    "ratio_symbol_name",
    "ratio_symbol_names",
    "find_transfer_vertex",
    "derive_mesh_sign",
    "assign_meshes",
    "terminal_equation",
    "f_circuit",
    "f_circuit_equations",
    "solve_tt",
]


class TTError(GearkinError):
    pass


def _pair(a: int, b: int) -> str:
    return f"{a}{b}" if a < 10 and b < 10 else f"{a}_{b}"


def omega_label(a: int, b: int) -> str:
    """Name of the velocity of link a relative to link b."""
    return f"w{_pair(a, b)}"


def edge_label(m: Mechanism, jid: int) -> str:
    """Tree-edge variable of a turning joint: its head relative to its tail."""
    j = m.joint(jid)
    return omega_label(j.head, j.tail)


def ratio_symbol_name(mesh: GearMesh) -> str:
    """n<tail><head>, standing for d_tail / d_head."""
    return f"n{_pair(mesh.tail, mesh.head)}"


def _describe_path(m: Mechanism, steps) -> str:
    if not steps:
        return "(empty path)"
    parts = [str(steps[0][1])]
    for jid, _, to in steps:
        parts.append(f"-{m.joint(jid).axis_label}- {to}")
    return " ".join(parts)


def _carrier_steps(m: Mechanism, mesh: GearMesh):
    """(carrier, tail-side step, head-side step) on the path tail -> head."""
    steps = m.tree_path(mesh.tail, mesh.head)
    changes = [
        i
        for i in range(len(steps) - 1)
        if m.joint(steps[i][0]).axis_label != m.joint(steps[i + 1][0]).axis_label
    ]
    if not changes:
        raise TTError(
            f"degenerate mesh {mesh.id}: both gears on one axis "
            f"(path {_describe_path(m, steps)})"
        )
    if len(changes) > 1:
        where = ", ".join(str(steps[i][2]) for i in changes)
        raise TTError(
            f"ambiguous carrier for mesh {mesh.id}: axis changes at links {where} "
            f"(path {_describe_path(m, steps)})"
        )
    i = changes[0]
    return steps[i][2], steps[i], steps[i + 1]


def find_transfer_vertex(mesh: GearMesh, m: Mechanism) -> int:
    """The interior link on the tree path where the turning axis changes."""
    return _carrier_steps(m, mesh)[0]


def derive_mesh_sign(m: Mechanism, mesh: GearMesh) -> int:
    """Declared sign if present, else read from the screw geometry.

    The two path edges adjacent to the carrier have moment coefficients P_a
    (tail side) and P_b (head side) about the pitch point; the mesh sign is
    sgn(P_b / P_a), taking all symbols as positive.
    """
    if mesh.declared_sign is not None:
        return mesh.declared_sign
    _, tail_step, head_step = _carrier_steps(m, mesh)
    pa = moment_coefficient(mesh, m.joint(tail_step[0]))
    pb = moment_coefficient(mesh, m.joint(head_step[0]))
    s = sign_of(as_exact(pb / pa)) if pa != 0 else None
    if not s:
        raise TTError(f"mesh {mesh.id}: sign underivable; declare it")
    return s


@dataclass(frozen=True)
class MeshAssignment:
    mesh: int
    tail: int
    head: int
    carrier: int
    tail_axis_label: str
    head_axis_label: str
    ratio_symbol: ExactScalar
    sign: int


@dataclass(frozen=True)
class FCircuitEquation:
    """w<link><carrier> = sum of sign * (tree-edge velocity) over the path."""

    link: int
    carrier: int
    terms: tuple[tuple[int, int], ...]  # (turning joint id, +1/-1)

    def evaluate(self, rates: Mapping[int, object]) -> ExactScalar:
        return as_exact(sum((s * rates[j] for j, s in self.terms), Fraction(0)))

    def render(self, m: Mechanism) -> str:
        parts = []
        for k, (jid, s) in enumerate(self.terms):
            name = edge_label(m, jid)
            parts.append(("" if s > 0 else "-") if k == 0 else (" + " if s > 0 else " - "))
            parts.append(name)
        return f"{omega_label(self.link, self.carrier)} = {''.join(parts)}"


@dataclass(frozen=True)
class TerminalEquation:
    """ratio * w<tail,carrier> - sign * w<head,carrier> = 0."""

    assignment: MeshAssignment

    @property
    def coefficients(self) -> tuple[tuple[tuple[int, int], ExactScalar], ...]:
        a = self.assignment
        return (((a.tail, a.carrier), a.ratio_symbol), ((a.head, a.carrier), Fraction(-a.sign)))

    def render(self) -> str:
        a = self.assignment
        inv = f"n{_pair(a.head, a.tail)}"
        return (
            f"{omega_label(a.tail, a.carrier)} = {'-' if a.sign < 0 else ''}{inv}*"
            f"{omega_label(a.head, a.carrier)}"
        )


def ratio_symbol_names(m: Mechanism) -> list[str]:
    """One n symbol per mesh; parallel meshes between the same links get the mesh id appended."""
    names = [ratio_symbol_name(g) for g in m.meshes]
    if len(set(names)) != len(names):
        names = [f"{n}_m{g.id}" for n, g in zip(names, m.meshes)]
    return names


def assign_meshes(m: Mechanism, symbolic_ratios: bool = True) -> list[MeshAssignment]:
    """Carrier, axis pair, ratio and resolved sign for every mesh.

    With ``symbolic_ratios`` each mesh gets its own symbol n<tail><head>;
    otherwise the ratio is d_tail / d_head from the mechanism.
    """
    names = ratio_symbol_names(m)
    fld = RationalFunctionField(names)
    out = []
    for g, name in zip(m.meshes, names):
        carrier, ts, hs = _carrier_steps(m, g)
        out.append(
            MeshAssignment(
                mesh=g.id,
                tail=g.tail,
                head=g.head,
                carrier=carrier,
                tail_axis_label=m.joint(ts[0]).axis_label,
                head_axis_label=m.joint(hs[0]).axis_label,
                ratio_symbol=fld.gen(name) if symbolic_ratios else gear_ratio(g),
                sign=derive_mesh_sign(m, g),
            )
        )
    return out


def terminal_equation(a: MeshAssignment) -> TerminalEquation:
    return TerminalEquation(a)


def f_circuit(m: Mechanism, link: int, carrier: int) -> FCircuitEquation:
    terms = []
    for jid, frm, to in m.tree_path(carrier, link):
        j = m.joint(jid)
        terms.append((jid, 1 if (j.tail, j.head) == (frm, to) else -1))
    return FCircuitEquation(link, carrier, tuple(terms))


def f_circuit_equations(m: Mechanism) -> list[FCircuitEquation]:
    """Tail port then head port for each mesh, in mesh order."""
    out = []
    for g in m.meshes:
        carrier = find_transfer_vertex(g, m)
        out.append(f_circuit(m, g.tail, carrier))
        out.append(f_circuit(m, g.head, carrier))
    return out


def solve_tt(
    m: Mechanism, symbolic_ratios: bool = True, assignments: list[MeshAssignment] | None = None
) -> TransferMatrix:
    """Non-input tree-edge velocities in terms of the input ones.

    Rows and columns are ordered by the child link of each tree edge.
    """
    if assignments is None:
        assignments = assign_meshes(m, symbolic_ratios)
    by_child = sorted(m.turning_ids, key=m.child_link)
    ins = [j for j in by_child if j in m.inputs]
    outs = [j for j in by_child if j not in m.inputs]
    col = {j: i for i, j in enumerate(by_child)}

    rows = []
    for a in assignments:
        row = [Fraction(0)] * len(by_child)
        for (link, carrier), coeff in terminal_equation(a).coefficients:
            for jid, s in f_circuit(m, link, carrier).terms:
                row[col[jid]] = as_exact(row[col[jid]] + s * coeff)
        rows.append(row)

    if len(outs) != len(rows):
        raise TTError(
            f"inputs do not determine the T-T network "
            f"({len(outs)} unknown tree edges, {len(rows)} mesh equations)"
        )
    A = [[r[col[j]] for j in outs] for r in rows]
    B = [[-r[col[j]] for j in ins] for r in rows]
    try:
        X = solve_linear(A, B)
    except SingularMatrixError:
        raise TTError("inputs do not determine the T-T network (singular system)") from None

    return TransferMatrix(
        tuple(edge_label(m, j) for j in outs),
        tuple(edge_label(m, j) for j in ins),
        tuple(tuple(r) for r in X),
        tuple(outs),
        tuple(ins),
    )
