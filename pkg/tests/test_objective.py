"""Linear and piecewise objective evaluation and validation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfoldip.errors import InputError
from nfoldip.objective import EvaluatorObjective, LinearObjective, PiecewiseObjective

from conftest import random_piecewise_coord
import random


def test_linear_value():
    obj = LinearObjective((2, -1, 3))
    assert obj.value((1, 1, 1)) == 4
    assert obj.brick_weights(1, 1) == (-1,)


def test_piecewise_matches_direct_formula():
    # f(v) = -v for v <= 0, 2v for v >= 0 (continuous at 0)
    obj = PiecewiseObjective(1, {0: ((0,), (-1, 2), (0, 0))})
    for v in range(-4, 5):
        expected = -v if v <= 0 else 2 * v
        assert obj.value((v,)) == expected


def test_piecewise_continuity_required():
    with pytest.raises(InputError):
        PiecewiseObjective(1, {0: ((0,), (-1, 2), (0, 5))})


def test_piecewise_convexity_required():
    with pytest.raises(InputError):
        PiecewiseObjective(1, {0: ((0,), (2, -1), (0, 0))})


def test_piecewise_breakpoints_must_increase():
    with pytest.raises(InputError):
        PiecewiseObjective(1, {0: ((2, 2), (0, 1, 2), (0, -2, -4))})


def test_piece_count_cap():
    with pytest.raises(InputError):
        PiecewiseObjective(1, {0: ((0, 1), (0, 1, 2), (0, 0, -1))}, max_pieces=2)


def test_unlisted_coordinates_cost_nothing():
    obj = PiecewiseObjective(3, {1: ((), (5,), (1,))})
    assert obj.value((7, 2, -9)) == 11


def test_value_batch_agrees_with_scalar():
    rng = random.Random(17)
    for _ in range(20):
        lo, hi = -4, 4
        bp, sl, ic = random_piecewise_coord(rng, lo, hi, 3)
        obj = PiecewiseObjective(1, {0: (bp, sl, ic)})
        values = np.arange(lo, hi + 1, dtype=np.int64)
        batch = obj.value_batch(0, values)
        for v, fv in zip(values, batch):
            assert obj.value_coord(0, int(v)) == int(fv)


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(1, 4), st.integers(-5, 5), st.integers(0, 5))
def test_piecewise_breakpoint_values_agree_from_both_sides(beta, width, s0, rise):
    # continuity means the two adjacent affine formulas agree at the breakpoint
    s1 = s0 + rise
    ic1 = (s0 - s1) * beta
    obj = PiecewiseObjective(1, {0: ((beta,), (s0, s1), (0, ic1))})
    left = s0 * beta + 0
    right = s1 * beta + ic1
    assert left == right == obj.value_coord(0, beta)


def test_evaluator_objective_sums_bricks():
    calls = []

    def ev(i, brick):
        calls.append((i, brick))
        return sum(brick) ** 2

    obj = EvaluatorObjective(4, 2, 2, ev)
    assert obj.value((1, 2, 3, 4)) == 9 + 49
    assert obj.brick_delta(0, 2, (1, 2), (1, 0)) == 16 - 9
