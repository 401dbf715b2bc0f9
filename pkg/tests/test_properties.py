"""Invariants on randomly generated mechanisms."""

import random
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gearkin.crosscheck import compare_methods
from gearkin.digraph import graph_matrices
from gearkin.exact import matmul, rank, transpose
from gearkin.matroid import closure_residual, mesh_relative_velocity, solve_transfer
from gearkin.oracle import brute_force_transfer
from gearkin.tt import solve_tt

from mechgen import mechanism_for_seed

seeds = st.integers(min_value=0, max_value=2**32 - 1)
prop = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@prop
@given(seeds)
def test_generated_mechanisms_are_within_bounds(seed):
    m = mechanism_for_seed(seed)
    assert m.n + 1 <= 10 and 1 <= m.c <= 5
    for g in m.meshes:
        assert 1 <= g.diameter_tail <= 20 and 1 <= g.diameter_head <= 20


@prop
@given(seeds)
def test_cycle_basis_annihilates_incidence(seed):
    m = mechanism_for_seed(seed)
    gm = graph_matrices(m)
    assert all(v == 0 for row in matmul(gm.gamma, transpose(gm.C)) for v in row)
    assert rank(gm.C) == m.c


@prop
@given(seeds, st.lists(st.integers(-9, 9), min_size=9, max_size=9))
def test_closure_on_solved_rates(seed, raw):
    m = mechanism_for_seed(seed)
    X = solve_transfer(m)
    v = [Fraction(x) for x in raw[: len(X.col_joints)]]
    rates = dict(zip(X.col_joints, v)) | dict(zip(X.row_joints, X.apply(v)))
    gm = graph_matrices(m)
    full = dict(rates)
    for g in m.meshes:
        full[g.id] = mesh_relative_velocity(m, g, rates, gm.T)
    assert all(x == 0 for row in closure_residual(m, gm.C, full) for x in row)


@prop
@given(seeds)
def test_matroid_equals_oracle(seed):
    m = mechanism_for_seed(seed)
    assert solve_transfer(m).first_difference(brute_force_transfer(m)) is None


@prop
@given(seeds)
def test_matroid_equals_tt(seed):
    m = mechanism_for_seed(seed)
    assert compare_methods(m).matched


@prop
@given(seeds)
def test_tt_equals_oracle_after_alignment(seed):
    m = mechanism_for_seed(seed)
    oracle = brute_force_transfer(m)
    tt = solve_tt(m, symbolic_ratios=False).aligned(oracle.row_joints, oracle.col_joints)
    assert tt.first_difference(oracle) is None


@prop
@given(seeds, st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=12))
def test_scale_invariance(seed, factor):
    m = mechanism_for_seed(seed)
    assert solve_transfer(m.scaled(factor)).first_difference(solve_transfer(m)) is None


def test_grm_methods_agree_on_random_diameter_draws(grm):
    rng = random.Random(2024)
    symbolic = solve_transfer(grm)
    for _ in range(100):
        values = {s: Fraction(rng.randint(4, 80), 4) for s in grm.symbols}
        bound = grm.bind(values)
        expected = symbolic.evaluate(values)
        assert solve_transfer(bound).first_difference(expected) is None
        assert compare_methods(bound).matched
        assert brute_force_transfer(bound).first_difference(expected) is None
