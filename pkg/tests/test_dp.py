"""The layered dynamic program: solve_dp, step sizes, Graver-best steps."""

import random

import pytest

from nfoldip.dp import (
    _run_layers_exact,
    _run_layers_hybrid,
    critical_step_sizes,
    graver_best_step,
    solve_dp,
)
from nfoldip.graver import GraverBasis, graver_basis, graver_complexity, n_fold_product
from nfoldip.matrices import Bimatrix, IntegerMatrix, split_bricks
from nfoldip.objective import LinearObjective, PiecewiseObjective
from nfoldip.oracle import EnumerationBudget, product_graver
from nfoldip.solver import NFoldInstance, _cached_g2
from nfoldip.statespace import build_state_space, terminal_states

from conftest import random_bimatrix, random_bounds


def _exact_space(a: Bimatrix):
    g = graver_complexity(a)
    g2 = graver_basis(a.a2)
    space = build_state_space(g2, max(g, 1))
    return space, terminal_states(space, a.a1)


def test_origin_only_space_gives_trivial_step():
    a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]), IntegerMatrix.identity(2))
    space = build_state_space(GraverBasis(2, ()), 1)
    terms = terminal_states(space, a.a1)
    x = (0, 0)
    res = solve_dp(a, 1, x, (-1, -1), (1, 1), 1, space, terms,
                   LinearObjective((1, 1)))
    assert res.trivial and res.weight == 0 and res.step == (0, 0)


def test_unit_gamma_at_an_optimum_has_weight_zero():
    a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]),
                 IntegerMatrix.from_rows([[1, -1]]))
    space, terms = _exact_space(a)
    # minimize x1 + x2 over pairs with equal coordinates summing to b
    w = LinearObjective((1, 1, 1, 1))
    x = (-1, -1, -1, -1)  # bottom of the box: already optimal
    res = solve_dp(a, 2, x, (-1,) * 4, (1,) * 4, 1, space, terms, w)
    assert res.weight == 0


def test_dp_weight_matches_explicit_graver_enumeration():
    budget = EnumerationBudget(max_points=4_000_000, max_norm=6)
    checked = 0
    for seed in range(40):
        rng = random.Random(300 + seed)
        a = Bimatrix(
            IntegerMatrix.from_rows([[rng.randint(-2, 2) for _ in range(2)]]),
            IntegerMatrix.from_rows([[rng.randint(-2, 2) for _ in range(2)]]))
        n = 3
        nt = n * 2
        l, u = random_bounds(rng, nt)
        x = tuple(rng.randint(l[j], u[j]) for j in range(nt))
        w = LinearObjective(tuple(rng.randint(-5, 5) for _ in range(nt)))
        space, terms = _exact_space(a)
        elements = product_graver(a, n, budget)
        gammas = critical_step_sizes(x, l, u, space, w)
        for gamma in gammas:
            res = solve_dp(a, n, x, l, u, gamma, space, terms, w, validate=False)
            best = 0
            for g in elements:
                if all(l[j] <= x[j] + gamma * g[j] <= u[j] for j in range(nt)):
                    best = min(best, sum(wj * gamma * gj
                                         for wj, gj in zip(w.weights, g)))
            assert res.weight == best, (seed, gamma)
            checked += 1
    assert checked >= 20


def test_step_output_is_always_feasible():
    rng = random.Random(8)
    a = random_bimatrix(rng, tmax=2)
    space, terms = _exact_space(a)
    n = 3
    nt = n * a.t
    l, u = random_bounds(rng, nt)
    x = tuple(rng.randint(l[j], u[j]) for j in range(nt))
    w = LinearObjective(tuple(rng.randint(-5, 5) for _ in range(nt)))
    for gamma in critical_step_sizes(x, l, u, space, w) or (1,):
        res = solve_dp(a, n, x, l, u, gamma, space, terms, w, validate=False)
        moved = tuple(xv + gamma * sv for xv, sv in zip(x, res.step))
        assert all(l[j] <= moved[j] <= u[j] for j in range(nt))
        prod = n_fold_product(a, n)
        assert prod.matvec(moved) == prod.matvec(x)


class TestCriticalStepSizes:
    def test_empty_for_origin_only_space(self):
        space = build_state_space(GraverBasis(2, ()), 1)
        assert critical_step_sizes((0, 0), (-5, -5), (5, 5), space,
                                   LinearObjective((1, 1))) == ()

    def test_box_limit_is_included(self):
        basis = GraverBasis(2, ((-1, -1), (1, 1)))
        space = build_state_space(basis, 1)
        gammas = critical_step_sizes((0, 0), (0, 0), (5, 5), space,
                                     LinearObjective((1, 1)))
        assert 5 in gammas

    def test_piecewise_crossing_is_included(self):
        basis = GraverBasis(1, ((-1,), (1,)))
        space = build_state_space(basis, 1)
        obj = PiecewiseObjective(1, {0: ((3,), (0, 2), (0, -6))})
        gammas = critical_step_sizes((0,), (0,), (5,), space, obj)
        # crossing the piece boundary between step sizes 2 and 3
        assert 2 in gammas
        assert 5 in gammas  # the box limit
        assert obj.piece_index(0, 2) != obj.piece_index(0, 3)

    def test_out_of_reach_pairs_contribute_nothing(self):
        basis = GraverBasis(1, ((-1,), (1,)))
        space = build_state_space(basis, 1)
        gammas = critical_step_sizes((0,), (0,), (0,), space,
                                     LinearObjective((1,)))
        assert gammas == ()


class TestGraverBestStep:
    def test_none_for_origin_only_space(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]), IntegerMatrix.identity(2))
        space = build_state_space(GraverBasis(2, ()), 1)
        terms = terminal_states(space, a.a1)
        assert graver_best_step(a, 1, (0, 0), (-2, -2), (2, 2), space, terms,
                                LinearObjective((1, 1))) is None

    def test_none_at_an_optimum(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]),
                     IntegerMatrix.from_rows([[1, -1]]))
        space, terms = _exact_space(a)
        x = (-1, -1, -1, -1)
        assert graver_best_step(a, 2, x, (-1,) * 4, (1,) * 4, space, terms,
                                LinearObjective((1, 1, 1, 1))) is None

    def test_delta_dominates_explicit_enumeration(self):
        budget = EnumerationBudget(max_points=4_000_000, max_norm=6)
        found_improving = 0
        for seed in range(12):
            rng = random.Random(700 + seed)
            a = random_bimatrix(rng, tmax=2)
            n = rng.randint(2, 4)
            nt = n * a.t
            l, u = random_bounds(rng, nt)
            x = tuple(rng.randint(l[j], u[j]) for j in range(nt))
            w = LinearObjective(tuple(rng.randint(-5, 5) for _ in range(nt)))
            space, terms = _exact_space(a)
            step = graver_best_step(a, n, x, l, u, space, terms, w,
                                    validate=False)
            best = 0
            for g in product_graver(a, n, budget):
                gmax = None
                for j in range(nt):
                    if g[j] > 0:
                        room = (u[j] - x[j]) // g[j]
                    elif g[j] < 0:
                        room = (x[j] - l[j]) // (-g[j])
                    else:
                        continue
                    gmax = room if gmax is None else min(gmax, room)
                if gmax is None or gmax < 1:
                    continue
                lin = sum(wj * gj for wj, gj in zip(w.weights, g))
                cand = min(lin * gamma for gamma in range(1, gmax + 1))
                best = min(best, cand)
            if step is None:
                assert best == 0, seed
            else:
                assert step.delta <= best, seed
                found_improving += 1
        assert found_improving >= 3

    def test_deterministic_and_thread_invariant(self):
        rng = random.Random(4)
        a = random_bimatrix(rng, tmax=2)
        n = 3
        nt = n * a.t
        l, u = random_bounds(rng, nt)
        x = tuple(rng.randint(l[j], u[j]) for j in range(nt))
        w = LinearObjective(tuple(rng.randint(-5, 5) for _ in range(nt)))
        space, terms = _exact_space(a)
        first = graver_best_step(a, n, x, l, u, space, terms, w)
        second = graver_best_step(a, n, x, l, u, space, terms, w)
        threaded = graver_best_step(a, n, x, l, u, space, terms, w, threads=4)
        assert first == second == threaded


def test_layer_runner_variants_agree():
    # the hybrid and exact relaxations must produce identical labels
    rng = random.Random(21)
    a = random_bimatrix(rng, tmax=2)
    space, terms = _exact_space(a)
    n = 3
    nt = n * a.t
    l, u = random_bounds(rng, nt)
    x = tuple(rng.randint(l[j], u[j]) for j in range(nt))
    w = LinearObjective(tuple(rng.randint(-5, 5) for _ in range(nt)))
    xb = split_bricks(x, n, a.t)
    lb = split_bricks(l, n, a.t)
    ub = split_bricks(u, n, a.t)
    hybrid = _run_layers_hybrid(space, terms, w, n, a.t, 1, xb, lb, ub, True)
    hybrid_py = _run_layers_hybrid(space, terms, w, n, a.t, 1, xb, lb, ub, False)
    exact = _run_layers_exact(space, terms, w, n, a.t, 1, xb, lb, ub)
    assert hybrid[0] == hybrid_py[0] == exact[0]
    assert hybrid[1] == hybrid_py[1] == exact[1]
    assert hybrid[2] == hybrid_py[2] == exact[2]
