from gearkin.digraph import cycle_basis, format_matrices, graph_matrices, incidence_matrix
from gearkin.exact import matmul, rank, transpose

from conftest import GOLDEN


def test_grm_matches_golden_dump(grm):
    assert format_matrices(graph_matrices(grm)) == (GOLDEN / "grm_matrices.txt").read_text()


def test_grm_shapes(grm):
    gm = graph_matrices(grm)
    assert (len(gm.gamma0), len(gm.gamma0[0])) == (8, 11)
    assert (len(gm.Z), len(gm.Z[0])) == (7, 7)
    assert (len(gm.C), len(gm.C[0])) == (4, 11)


def test_grm_cycle_rows(grm):
    T = graph_matrices(grm).T
    # walk 1 -> 0 -> 4: against joint 10 (0->1), along joint 8 (0->4)
    assert T[0] == [1, 0, -1, 0, 0, 0, 0]
    # walk 7 -> 2 -> 1 -> 6: against 13 and 12, along 11
    assert T[2] == [0, 0, 0, 1, -1, -1, 0]


def test_incidence_columns_sum_to_zero(grm, two_stage):
    for m in (grm, two_stage):
        g0 = incidence_matrix(m)
        assert all(sum(col) == 0 for col in zip(*g0))


def test_cycle_basis_is_orthogonal_to_incidence(grm, minimal, two_stage):
    for m in (grm, minimal, two_stage):
        gm = graph_matrices(m)
        assert all(v == 0 for row in matmul(gm.gamma, transpose(gm.C)) for v in row)
        assert rank(gm.C) == m.c
        assert matmul(gm.G, gm.Z) == [[-int(i == j) for j in range(m.n)] for i in range(m.n)]


def test_empty_cycle_basis():
    assert cycle_basis([]) == []


def test_minimal_dump(minimal):
    text = format_matrices(graph_matrices(minimal))
    assert "#C rows=1 cols=3\n# cols: 3 4 5\n1 -1 1\n" in text
