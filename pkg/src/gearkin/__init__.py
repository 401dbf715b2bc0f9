"""Exact velocity analysis of geared mechanisms by two graph-based methods."""

from .errors import GearkinError
from .exact import RationalFunctionField, SingularMatrixError, UnboundSymbolError
from .mechanism import Mechanism, MechanismError, kutzbach_dof, load_mechanism, load_mechanism_file
from .digraph import graph_matrices
from .matroid import coefficient_matrix, solve_transfer, solve_transfer_ratios
from .tt import find_transfer_vertex, solve_tt
from .crosscheck import compare_methods
from .oracle import brute_force_transfer
from .transfer import TransferMatrix

__all__ = [
    "GearkinError",
    "MechanismError",
    "SingularMatrixError",
    "UnboundSymbolError",
    "RationalFunctionField",
    "Mechanism",
    "TransferMatrix",
    "load_mechanism",
    "load_mechanism_file",
    "kutzbach_dof",
    "graph_matrices",
    "coefficient_matrix",
    "solve_transfer",
    "solve_transfer_ratios",
    "find_transfer_vertex",
    "solve_tt",
    "compare_methods",
    "brute_force_transfer",
]
