"""Directed-graph matrices of a mechanism.

Rows and columns use fixed orderings: links ascending, turning joints
ascending, then meshes ascending.  All entries are Python ints in {-1, 0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import rank
from .mechanism import Mechanism

__all__ = [
    "GraphMatrices",
    "incidence_matrix",
    "path_matrix",
    "spanning_tree_matrix",
    "cycle_basis",
    "graph_matrices",
    "format_matrices",
]

Matrix = list  # list[list[int]]


class InternalConsistencyError(AssertionError):
    pass


@dataclass(frozen=True)
class GraphMatrices:
    gamma0: Matrix
    gamma: Matrix
    G: Matrix
    Gstar: Matrix
    Z: Matrix
    T: Matrix
    C: Matrix
    link_ids: tuple[int, ...]
    turning_ids: tuple[int, ...]
    mesh_ids: tuple[int, ...]

    @property
    def joint_ids(self) -> tuple[int, ...]:
        return self.turning_ids + self.mesh_ids


def incidence_matrix(m: Mechanism) -> Matrix:
    """(n+1) x k node-edge incidence: +1 at the head link, -1 at the tail."""
    joints = (*m.turning, *m.meshes)
    out = [[0] * len(joints) for _ in m.links]
    for col, j in enumerate(joints):
        out[j.head][col] = 1
        out[j.tail][col] = -1
    return out


def path_matrix(m: Mechanism) -> Matrix:
    """t x n matrix of signed tree-edge membership on each link's path to ground.

    +1 where the edge points along the walk towards ground, -1 where it points
    against it.
    """
    row = {jid: i for i, jid in enumerate(m.turning_ids)}
    Z = [[0] * m.n for _ in range(m.t)]
    for link in range(1, m.n + 1):
        for jid, frm, to in m.path_to_ground(link):
            j = m.joint(jid)
            Z[row[jid]][link - 1] = 1 if (j.tail, j.head) == (frm, to) else -1
    return Z


def spanning_tree_matrix(Gstar: Matrix, Z: Matrix) -> Matrix:
    """T = Gstar^T . Z^T  (c x t)."""
    if not Gstar:
        return []
    c = len(Gstar[0])
    t = len(Z)
    n = len(Gstar)
    return [[sum(Gstar[l][j] * Z[k][l] for l in range(n)) for k in range(t)] for j in range(c)]


def cycle_basis(T: Matrix) -> Matrix:
    """C = [T | U] with U the identity over the mesh columns."""
    c = len(T)
    C = [list(row) + [int(i == j) for j in range(c)] for i, row in enumerate(T)]
    if c and rank(C) != c:
        raise InternalConsistencyError(f"cycle-basis matrix has rank < {c}")
    return C


def graph_matrices(m: Mechanism) -> GraphMatrices:
    g0 = incidence_matrix(m)
    gamma = [list(r) for r in g0[1:]]
    G = [r[: m.t] for r in gamma]
    Gstar = [r[m.t :] for r in gamma]
    Z = path_matrix(m)
    T = spanning_tree_matrix(Gstar, Z)
    C = cycle_basis(T)
    return GraphMatrices(
        gamma0=g0,
        gamma=gamma,
        G=G,
        Gstar=Gstar,
        Z=Z,
        T=T,
        C=C,
        link_ids=tuple(l.id for l in m.links),
        turning_ids=m.turning_ids,
        mesh_ids=m.mesh_ids,
    )


def _block(name: str, rows: Matrix, ncols: int, col_labels) -> str:
    lines = [f"#{name} rows={len(rows)} cols={ncols}"]
    lines.append("# cols: " + " ".join(str(c) for c in col_labels))
    lines.extend(" ".join(str(v) for v in row) for row in rows)
    return "\n".join(lines)


def format_matrices(gm: GraphMatrices) -> str:
    """Plain-text dump of gamma0, gamma, Z, T and C."""
    links = gm.link_ids[1:]
    blocks = [
        _block("gamma0", gm.gamma0, len(gm.joint_ids), gm.joint_ids),
        _block("gamma", gm.gamma, len(gm.joint_ids), gm.joint_ids),
        _block("Z", gm.Z, len(links), links),
        _block("T", gm.T, len(gm.turning_ids), gm.turning_ids),
        _block("C", gm.C, len(gm.joint_ids), gm.joint_ids),
    ]
    return "\n\n".join(blocks) + "\n"
