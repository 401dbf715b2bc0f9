"""Brute-force numeric checker for transfer matrices.

Works from the raw joint list only: builds its own spanning-tree walk and
cycle orientation, writes the full six-component twist closure of every
cycle (mesh rotations as free 3-vector unknowns, mesh screws through the
pitch point), and solves the lot by Gauss-Jordan elimination with full
largest-magnitude pivoting.  Nothing here is shared with the solvers except
the exact scalar helpers.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Mapping

from .errors import GearkinError
from .exact import evaluate
from .mechanism import Mechanism, exact_sin_cos
from .transfer import TransferMatrix


class OracleError(GearkinError):
    pass


def _rot_x(phi) -> list[list[Fraction]]:
    s, c = exact_sin_cos(phi)
    one, zero = Fraction(1), Fraction(0)
    return [[one, zero, zero], [zero, c, -s], [zero, s, c]]


def _axis(phi) -> list[Fraction]:
    R = _rot_x(phi)
    return [R[i][2] for i in range(3)]  # R . e_z


def _cross(a, b) -> list[Fraction]:
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _tree_walk(m: Mechanism) -> dict[int, tuple[int, int]]:
    nbrs: dict[int, list] = {}
    for j in m.turning:
        nbrs.setdefault(j.tail, []).append((j.head, j))
        nbrs.setdefault(j.head, []).append((j.tail, j))
    up = {0: None}
    todo = deque([0])
    while todo:
        u = todo.popleft()
        for v, j in nbrs.get(u, []):
            if v not in up:
                up[v] = (u, j)
                todo.append(v)
    return up


def _route(up, a: int, b: int) -> list[tuple]:
    """Tree edges from a to b as (joint, +1 if walked tail->head)."""

    def chain(x):
        out = []
        while up[x] is not None:
            p, j = up[x]
            out.append((x, p, j))
            x = p
        return out

    ca, cb = chain(a), chain(b)
    nodes_a = [a] + [p for _, p, _ in ca]
    nodes_b = set([b] + [p for _, p, _ in cb])
    meet = next(x for x in nodes_a if x in nodes_b)
    route = []
    for x, p, j in ca:
        if x == meet:
            break
        route.append((j, 1 if (j.tail, j.head) == (x, p) else -1))
    back = []
    for x, p, j in cb:
        if x == meet:
            break
        back.append((j, 1 if (j.tail, j.head) == (p, x) else -1))
    return route + back[::-1]


def _gauss_jordan(rows: list[list[Fraction]], ncols: int):
    """In-place RREF with full pivoting; returns (pivot column per pivot row, rank)."""
    nrows = len(rows)
    free_cols = list(range(ncols))
    pivots = []
    r = 0
    while r < nrows and free_cols:
        best = None
        for i in range(r, nrows):
            for c in free_cols:
                v = abs(rows[i][c])
                if v and (best is None or v > best[0]):
                    best = (v, i, c)
        if best is None:
            break
        _, i, c = best
        rows[r], rows[i] = rows[i], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i2 in range(nrows):
            if i2 != r and rows[i2][c]:
                f = rows[i2][c]
                rows[i2] = [x - f * y for x, y in zip(rows[i2], rows[r])]
        pivots.append(c)
        free_cols.remove(c)
        r += 1
    return pivots, r


def independent_rank(rows: list[list[Fraction]]) -> int:
    work = [list(r) for r in rows]
    return _gauss_jordan(work, len(work[0]) if work else 0)[1]


def brute_force_transfer(m: Mechanism, bindings: Mapping[str, object] | None = None) -> TransferMatrix:
    """Numeric output-joint rates per unit input rate."""
    bindings = dict(bindings or {})
    num = lambda x: evaluate(x, bindings)  # noqa: E731
    up = _tree_walk(m)
    tids = sorted(j.id for j in m.turning)
    tcol = {jid: i for i, jid in enumerate(tids)}
    ncyc = len(m.meshes)
    t = len(tids)
    nunk = t + 3 * ncyc

    moment_rows: list[list[Fraction]] = []
    rows: list[list[Fraction]] = []
    for ci, g in enumerate(sorted(m.meshes, key=lambda g: g.id)):
        pitch = [Fraction(0), num(g.y), num(g.z)]
        vel = [[Fraction(0)] * nunk for _ in range(3)]
        mom = [[Fraction(0)] * nunk for _ in range(3)]
        # cycle: across the mesh tail -> head, back to the tail through the tree
        for j, s in _route(up, g.head, g.tail):
            u = _axis(j.phi)
            arm = [Fraction(0), num(j.y) - pitch[1], num(j.z) - pitch[2]]
            mo = _cross(arm, u)
            for a in range(3):
                vel[a][tcol[j.id]] += s * u[a]
                mom[a][tcol[j.id]] += s * mo[a]
        for a in range(3):
            vel[a][t + 3 * ci + a] = Fraction(1)
        rows.extend(vel)
        rows.extend(mom)
        moment_rows.extend(r[:t] for r in mom if any(r[:t]))

    r = independent_rank(moment_rows) if moment_rows else 0
    if r != ncyc:
        raise OracleError(f"moment rank {r} != mesh count {ncyc}")
    if t - r != len(m.inputs):
        raise OracleError(f"E = t - r = {t - r} but {len(m.inputs)} inputs declared")

    inputs = sorted(m.inputs)
    outputs = [j for j in tids if j not in inputs]
    unknown_cols = [tcol[j] for j in outputs] + list(range(t, nunk))
    ne = len(inputs)
    aug = []
    for row in rows:
        aug.append([row[c] for c in unknown_cols] + [-row[tcol[j]] for j in inputs])
    nu = len(unknown_cols)
    pivots, rk = _gauss_jordan(aug, nu)
    for row in aug[rk:]:
        if any(row[nu:]):
            # with full moment rank this happens only when P_r is singular
            raise OracleError("P_r singular: closure equations constrain the chosen inputs")
    solution: dict[int, list[Fraction]] = {}
    for i, c in enumerate(pivots):
        solution[c] = aug[i][nu:]
    missing = [outputs[c] for c in range(len(outputs)) if c not in solution]
    if missing:
        raise OracleError(f"P_r singular: joints {missing} not determined by the inputs")
    X = [solution[c] for c in range(len(outputs))]
    assert all(len(row) == ne for row in X)
    return TransferMatrix(
        tuple(f"theta{j}" for j in outputs),
        tuple(f"theta{j}" for j in inputs),
        tuple(tuple(row) for row in X),
        tuple(outputs),
        tuple(inputs),
    )
