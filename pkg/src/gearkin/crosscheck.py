"""Bring T-T results into the Matroid solver's symbols and row order."""

from __future__ import annotations

from dataclasses import dataclass

from .exact import RationalFunction, RationalFunctionField
from .matroid import ratio_symbol, solve_transfer, solve_transfer_ratios
from .mechanism import GearMesh, Mechanism, gear_ratio
from .transfer import TransferMatrix
from .tt import ratio_symbol_names, solve_tt


def _symbolic_diameters(g: GearMesh) -> bool:
    return isinstance(g.diameter_tail, RationalFunction) or isinstance(g.diameter_head, RationalFunction)


def reconcile(m: Mechanism, tt: TransferMatrix, reference: TransferMatrix, ratios: bool) -> TransferMatrix:
    """Rename each n<tail><head> and permute rows/columns to match ``reference``.

    With ``ratios`` the n symbols of meshes with symbolic diameters become
    i<mesh>; every other n becomes d_tail / d_head of its mesh.
    """
    names = ratio_symbol_names(m)
    if ratios:
        fld = RationalFunctionField([ratio_symbol(g) for g in m.meshes])
        mapping = {
            n: fld.gen(ratio_symbol(g)) if _symbolic_diameters(g) else gear_ratio(g)
            for n, g in zip(names, m.meshes)
        }
    else:
        fld = m.field
        mapping = {n: gear_ratio(g) for n, g in zip(names, m.meshes)}
    renamed = tt.substitute(mapping, fld) if tt.symbols() else tt
    return renamed.aligned(reference.row_joints, reference.col_joints)


@dataclass(frozen=True)
class Comparison:
    matroid: TransferMatrix
    tt: TransferMatrix
    tt_reconciled: TransferMatrix
    difference: tuple | None

    @property
    def matched(self) -> bool:
        return self.difference is None


def compare_methods(m: Mechanism, ratios: bool = False) -> Comparison:
    """Solve with both methods and compare after reconciliation."""
    mat = solve_transfer_ratios(m) if ratios else solve_transfer(m)
    symbolic = ratios or m.has_symbols()
    tt = solve_tt(m, symbolic_ratios=symbolic)
    rec = reconcile(m, tt, mat, ratios) if symbolic else tt.aligned(mat.row_joints, mat.col_joints)
    return Comparison(mat, tt, rec, mat.first_difference(rec))
