"""State-space construction, membership, terminals, row/arc indexing."""

import numpy as np
import pytest

from nfoldip.errors import ResourceLimitError
from nfoldip.graver import GraverBasis, graver_basis
from nfoldip.matrices import IntegerMatrix
from nfoldip.statespace import RowIndex, build_state_space, terminal_states


@pytest.fixture(scope="module")
def g_k33(k33):
    return graver_basis(k33)


def test_empty_generator_set_gives_origin_only():
    space = build_state_space(GraverBasis(3, ()), 5)
    assert len(space) == 1
    assert space.exact
    assert (0, 0, 0) in space
    assert (1, 0, 0) not in space


def test_truncated_count_and_member_for_k33(g_k33):
    space = build_state_space(g_k33, 3)
    assert len(space) == 811
    assert not space.exact
    assert (-3, 2, 1, 2, -3, 1, 1, 1, -2) in space


def test_monotone_in_degree(g_k33):
    sizes = []
    prev = None
    for degree in (1, 2, 3):
        space = build_state_space(g_k33, degree)
        sizes.append(len(space))
        if prev is not None:
            assert set(prev.states) <= set(space.states)
        prev = space
    assert sizes == sorted(sizes)


def test_zero_membership_and_negation_closure(g_k33):
    space = build_state_space(g_k33, 2)
    assert (0,) * 9 in space
    members = set(space.states)
    for s in members:
        assert tuple(-c for c in s) in members


def test_states_are_lex_sorted(g_k33):
    space = build_state_space(g_k33, 2)
    assert list(space.states) == sorted(space.states)


def test_budget_trips():
    basis = graver_basis(IntegerMatrix.from_rows([[1, 1, 1]]))
    with pytest.raises(ResourceLimitError):
        build_state_space(basis, 9, max_states=100)


def test_terminal_states_identity_keeps_origin_only(g_k33):
    space = build_state_space(g_k33, 2)
    terms = terminal_states(space, IntegerMatrix.identity(9))
    assert terms.states == ((0,) * 9,)


def test_terminal_states_zero_row_keeps_everything(g_k33):
    space = build_state_space(g_k33, 2)
    terms = terminal_states(space, IntegerMatrix.zero(1, 9))
    assert len(terms) == len(space)


def test_terminal_states_dimension_mismatch(g_k33):
    space = build_state_space(g_k33, 1)
    with pytest.raises(Exception):
        terminal_states(space, IntegerMatrix.identity(4))


def test_row_index_round_trip(g_k33):
    space = build_state_space(g_k33, 2)
    arr = space.as_array()
    idx = RowIndex(arr)
    got = idx.lookup(arr)
    assert (got == np.arange(len(arr))).all()
    shifted = arr + 1000
    assert (idx.lookup(shifted) == -1).all()


def test_arc_matrix_matches_direct_addition(g_k33):
    space = build_state_space(g_k33, 2)
    mat = space.arc_matrix()
    assert mat is not None
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = int(rng.integers(len(space)))
        d = int(rng.integers(len(space)))
        total = tuple(a + b for a, b in zip(space.states[p], space.states[d]))
        expected = space.index_of(total)
        assert mat[p, d] == expected
