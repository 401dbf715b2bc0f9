"""Screw-based velocity analysis over the cycle basis.

Each turning joint is a unit screw (L, M, N | P, Q, R) about an axis in the
base y-z plane.  For every fundamental cycle the moment components give one
scalar equation in the turning-joint rates; partitioning those equations
into input and output columns and solving gives the transfer matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .digraph import graph_matrices
from .errors import GearkinError
from .exact import (
    ExactScalar,
    RationalFunction,
    RationalFunctionField,
    SingularMatrixError,
    as_exact,
    dependent_rows,
    is_zero,
    solve_linear,
    transpose,
)
from .mechanism import GearMesh, Mechanism, TurningJoint, exact_sin_cos
from .transfer import TransferMatrix

__all__ = [
    "CoefficientMatrix",
    "TransferSingularError",
    "RatioFormError",
    "joint_unit_vector",
    "moment_vector",
    "moment_coefficient",
    "coefficient_matrix",
    "mesh_relative_velocity",
    "closure_residual",
    "solve_transfer",
    "ratio_symbol",
    "ratio_coefficient_matrix",
    "solve_transfer_ratios",
]

Vec3 = tuple


class TransferSingularError(GearkinError):
    def __init__(self, message: str, joints: Sequence[frozenset[int]] = ()):
        super().__init__(message)
        self.joints = list(joints)


class RatioFormError(GearkinError):
    pass


def joint_unit_vector(phi) -> Vec3:
    """Axis direction (L, M, N) = (0, -sin phi, cos phi) in the base frame."""
    s, c = exact_sin_cos(phi)
    return (Fraction(0), -s, c)


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        as_exact(a[1] * b[2] - a[2] * b[1]),
        as_exact(a[2] * b[0] - a[0] * b[2]),
        as_exact(a[0] * b[1] - a[1] * b[0]),
    )


def moment_vector(mesh: GearMesh, joint: TurningJoint) -> Vec3:
    """(P, Q, R): moment of the joint axis about the mesh's pitch point."""
    arm = (Fraction(0), as_exact(joint.y - mesh.y), as_exact(joint.z - mesh.z))
    return _cross(arm, joint_unit_vector(joint.phi))


def moment_coefficient(mesh: GearMesh, joint: TurningJoint) -> ExactScalar:
    """P = (z_k - z_c) sin phi_k + (y_k - y_c) cos phi_k."""
    s, c = exact_sin_cos(joint.phi)
    return as_exact((joint.z - mesh.z) * s + (joint.y - mesh.y) * c)


@dataclass(frozen=True)
class CoefficientMatrix:
    """c x t matrix; rows are cycles (mesh ids), columns turning joints."""

    entries: tuple[tuple[ExactScalar, ...], ...]
    mesh_ids: tuple[int, ...]
    joint_ids: tuple[int, ...]

    def columns(self, jids: Sequence[int]) -> list[list[ExactScalar]]:
        idx = [self.joint_ids.index(j) for j in jids]
        return [[row[i] for i in idx] for row in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def coefficient_matrix(m: Mechanism, T=None) -> CoefficientMatrix:
    """Entry (j, k) = T(j, k) * P(mesh_j, joint_k); zero wherever T is zero."""
    if T is None:
        T = graph_matrices(m).T
    rows = []
    for mesh, trow in zip(m.meshes, T):
        rows.append(
            tuple(
                as_exact(s * moment_coefficient(mesh, joint)) if s else Fraction(0)
                for s, joint in zip(trow, m.turning)
            )
        )
    return CoefficientMatrix(tuple(rows), m.mesh_ids, m.turning_ids)


def _as_vector(theta, ids: Sequence[int]) -> list:
    if isinstance(theta, Mapping):
        return [theta.get(j, 0) for j in ids]
    theta = list(theta)
    if len(theta) != len(ids):
        raise ValueError(f"expected {len(ids)} rates, got {len(theta)}")
    return theta


def mesh_relative_velocity(m: Mechanism, mesh: GearMesh, theta_t, T=None) -> Vec3:
    """Angular velocity of a mesh pair: minus the signed sum of its cycle's joint twists."""
    if T is None:
        T = graph_matrices(m).T
    row = T[m.mesh_ids.index(mesh.id)]
    rates = _as_vector(theta_t, m.turning_ids)
    acc = [Fraction(0)] * 3
    for s, joint, rate in zip(row, m.turning, rates):
        if not s or is_zero(rate):
            continue
        u = joint_unit_vector(joint.phi)
        for i in range(3):
            acc[i] = acc[i] - s * u[i] * rate
    return tuple(as_exact(a) for a in acc)


def closure_residual(m: Mechanism, C, theta_all) -> list[tuple]:
    """Per-cycle sum of signed twists (velocity | moment); zero when consistent.

    ``theta_all`` gives a rate per joint (turning then meshes, or a mapping by
    joint id).  A mesh rate may be a scalar about the mesh axis or a full
    angular-velocity 3-vector.
    """
    joint_ids = m.turning_ids + m.mesh_ids
    rates = _as_vector(theta_all, joint_ids)
    out = []
    for crow, mesh in zip(C, m.meshes):
        acc = [Fraction(0)] * 6
        for s, jid, rate in zip(crow, joint_ids, rates):
            if not s:
                continue
            joint = m.joint(jid)
            if isinstance(joint, TurningJoint):
                u = joint_unit_vector(joint.phi)
                r = moment_vector(mesh, joint)
                twist = (*u, *r)
                for i in range(6):
                    acc[i] = acc[i] + s * twist[i] * rate
            else:
                # the mesh's own screw passes through its pitch point: no moment
                if isinstance(rate, (tuple, list)):
                    w = rate
                else:
                    w = tuple(x * rate for x in joint_unit_vector(joint.phi))
                for i in range(3):
                    acc[i] = acc[i] + s * w[i]
        out.append(tuple(as_exact(a) for a in acc))
    return out


def _label(jid: int) -> str:
    return f"theta{jid}"


def solve_transfer(m: Mechanism, P: CoefficientMatrix | None = None) -> TransferMatrix:
    """Output joint rates as a linear map of the input joint rates."""
    if P is None:
        P = coefficient_matrix(m)
    outs, ins = m.outputs, m.inputs
    if len(outs) != len(P.mesh_ids):
        raise TransferSingularError(
            f"{len(outs)} output joints but {len(P.mesh_ids)} independent cycles"
        )
    Pr = P.columns(outs)
    PE = P.columns(ins)
    try:
        X = solve_linear(Pr, [[-x for x in row] for row in PE])
    except SingularMatrixError:
        deps = [frozenset(outs[i] for i in d) for d in dependent_rows(transpose(Pr))]
        where = "; ".join("{" + ", ".join(map(str, sorted(d))) + "}" for d in deps)
        raise TransferSingularError(
            f"P_r singular: chosen inputs do not determine the mechanism "
            f"(dependent output joints {where})",
            deps,
        ) from None
    return TransferMatrix(
        tuple(_label(j) for j in outs),
        tuple(_label(j) for j in ins),
        tuple(tuple(row) for row in X),
        tuple(outs),
        tuple(ins),
    )


def ratio_symbol(mesh: GearMesh) -> str:
    return f"i{mesh.id}"


def _gen_name(x) -> str | None:
    if isinstance(x, RationalFunction) and x.den == 1 and x.num.nterms() == 1:
        (e, c), = x.num.terms.items()
        if c == 1 and sum(e) == 1:
            return x.field.symbols[e.index(1)]
    return None


def _split(e: ExactScalar, dt: str, dh: str) -> tuple[Fraction, Fraction] | None:
    """Write 2e as a*dh + b*dt with rational a, b."""
    if not isinstance(e, RationalFunction):
        return (Fraction(0), Fraction(0)) if e == 0 else None
    if not e.den.is_constant():
        return None
    fld = e.field
    poly = e.num.scale(2 / e.den.constant())
    coeff = {}
    for name in {dt, dh}:
        exp = tuple(1 if s == name else 0 for s in fld.symbols)
        coeff[name] = poly.terms.get(exp, Fraction(0))
    if len(poly.terms) != sum(1 for v in coeff.values() if v):
        return None
    return coeff[dh], (coeff[dt] if dt != dh else Fraction(0))


def ratio_coefficient_matrix(m: Mechanism, P: CoefficientMatrix | None = None):
    """Rows divided by half the head pitch diameter, in gear-ratio symbols i<mesh>.

    Returns ``(CoefficientMatrix, field)``.  Each symbolic entry must be a
    rational combination of the mesh's two pitch diameters.
    """
    if P is None:
        P = coefficient_matrix(m)
    fld = RationalFunctionField([ratio_symbol(g) for g in m.meshes])
    rows = []
    for mesh, row in zip(m.meshes, P.entries):
        dt, dh = mesh.diameter_tail, mesh.diameter_head
        if not isinstance(dt, RationalFunction) and not isinstance(dh, RationalFunction):
            rows.append(tuple(as_exact(x * 2 / dh) for x in row))
            continue
        nt, nh = _gen_name(dt), _gen_name(dh)
        if nt is None or nh is None:
            raise RatioFormError(
                f"mesh {mesh.id}: gear-ratio form needs single-symbol diameters on both gears"
            )
        i = fld.gen(ratio_symbol(mesh)) if nt != nh else Fraction(1)
        new = []
        for jid, x in zip(P.joint_ids, row):
            ab = _split(x, nt, nh)
            if ab is None:
                raise RatioFormError(
                    f"mesh {mesh.id}, joint {jid}: coefficient {x} is not a combination "
                    f"of {nt} and {nh}"
                )
            a, b = ab
            new.append(as_exact(a + b * i) if nt != nh else as_exact(a + b))
        rows.append(tuple(new))
    return CoefficientMatrix(tuple(rows), P.mesh_ids, P.joint_ids), fld


def solve_transfer_ratios(m: Mechanism) -> TransferMatrix:
    """Transfer matrix expressed in the per-mesh gear ratios i<mesh> = d_tail/d_head."""
    R, _ = ratio_coefficient_matrix(m)
    return solve_transfer(m, R)
