"""Graver bases, kernel lattices, n-fold products, Graver complexity."""

import itertools
import math
import random

import pytest

from nfoldip.errors import ResourceLimitError
from nfoldip.graver import (
    graver_basis,
    graver_complexity,
    kernel_lattice_basis,
    max_nonzero_bricks,
    n_fold_product,
)
from nfoldip.matrices import Bimatrix, IntegerMatrix
from nfoldip.oracle import (
    EnumerationBudget,
    brute_force_graver,
    product_graver,
)
from nfoldip.statespace import build_state_space

from conftest import assert_graver_invariants, random_bimatrix

M121 = IntegerMatrix.from_rows([[1, 2, 1]])
M121_BASIS = set()
for _v in [(2, -1, 0), (0, -1, 2), (1, 0, -1), (1, -1, 1)]:
    M121_BASIS.add(_v)
    M121_BASIS.add(tuple(-c for c in _v))


class TestKernelLatticeBasis:
    def test_single_row_ones(self):
        basis = kernel_lattice_basis(IntegerMatrix.from_rows([[1, 1]]))
        assert len(basis) == 1
        assert basis[0] in ((1, -1), (-1, 1))

    def test_identity_has_trivial_kernel(self):
        assert kernel_lattice_basis(IntegerMatrix.identity(2)) == []

    def test_121_spans_the_full_kernel_lattice(self):
        basis = kernel_lattice_basis(M121)
        assert len(basis) == 2
        for v in basis:
            assert sum(a * b for a, b in zip((1, 2, 1), v)) == 0
        # both reference kernel vectors must be integer combinations
        for target in [(1, 0, -1), (2, -1, 0)]:
            assert _in_lattice(basis, target)
        # saturated lattice: the gcd of maximal minors is 1
        assert _minor_gcd(basis) == 1

    def test_matches_brute_force_kernel_lattice(self):
        rng = random.Random(5)
        for _ in range(10):
            rows = rng.randint(1, 2)
            cols = rng.randint(1, 4)
            m = IntegerMatrix.from_rows(
                [[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)])
            basis = kernel_lattice_basis(m)
            for v in basis:
                assert not any(m.matvec(v))
            # every small kernel vector must lie in the generated lattice
            small = _small_kernel_vectors(m, 2)
            for v in small:
                assert _in_lattice(basis, v), (m, v)


def _small_kernel_vectors(m, bound):
    out = []
    for cand in itertools.product(range(-bound, bound + 1), repeat=m.cols):
        if any(cand) and not any(m.matvec(cand)):
            out.append(cand)
    return out


def _in_lattice(basis, target):
    if not basis:
        return not any(target)
    # bounded search over integer combinations; enough for desk-size checks
    coeff_range = range(-6, 7)
    for coeffs in itertools.product(coeff_range, repeat=len(basis)):
        point = [0] * len(target)
        for c, vec in zip(coeffs, basis):
            for j, val in enumerate(vec):
                point[j] += c * val
        if tuple(point) == tuple(target):
            return True
    return False


def _minor_gcd(basis):
    k = len(basis)
    dim = len(basis[0])
    g = 0
    for rows in itertools.combinations(range(dim), k):
        sub = [[basis[c][r] for c in range(k)] for r in rows]
        g = math.gcd(g, abs(_det(sub)))
    return g


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det(minor)
    return total


class TestGraverBasis:
    def test_121_paper_vectors(self):
        basis = graver_basis(M121)
        assert set(basis.elements) == M121_BASIS
        assert_graver_invariants(M121, basis)

    def test_identity_kernel_is_trivial(self):
        for size in (1, 2, 3):
            assert len(graver_basis(IntegerMatrix.identity(size))) == 0

    def test_k33_circuits(self, k33):
        basis = graver_basis(k33)
        assert len(basis) == 30
        for v in basis:
            assert all(c in (-1, 0, 1) for c in v)
            _assert_alternating_circuit(v)
        assert_graver_invariants(k33, basis)

    def test_elements_sorted_lexicographically(self):
        basis = graver_basis(M121)
        assert list(basis.elements) == sorted(basis.elements)

    def test_budget_errors_are_loud(self):
        with pytest.raises(ResourceLimitError) as err:
            graver_basis(M121, max_elements=1)
        assert err.value.limit_name == "max_elements"
        with pytest.raises(ResourceLimitError):
            graver_basis(IntegerMatrix.from_rows([[3, -5, 7, -11]]), max_norm=1)

    def test_matches_brute_force_on_small_matrices(self):
        budget = EnumerationBudget(max_points=3_000_000, max_norm=3)
        checked = 0
        for seed in range(40):
            rng = random.Random(seed)
            rows = rng.randint(1, 2)
            cols = rng.randint(1, 4)
            m = IntegerMatrix.from_rows(
                [[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)])
            computed = graver_basis(m)
            top = max((max(abs(c) for c in v) for v in computed), default=1)
            bound = max(3, 2 * top)
            reference = brute_force_graver(
                m, EnumerationBudget(budget.max_points, bound))
            assert sorted(computed.elements) == reference, m
            checked += 1
        assert checked == 40


def _assert_alternating_circuit(v):
    """The support must be a single cycle of K(3,3) with alternating signs.

    Cells are edges (slot k, block b) of the bipartite graph; a kernel
    vector of the incidence matrix supported on a cycle has +1/-1
    alternating around it, which forces every touched vertex to meet
    exactly one +1 and one -1 edge.
    """
    edges = [(j % 3, j // 3, v[j]) for j in range(9) if v[j]]
    assert len(edges) in (4, 6)
    for side, idx in ((0, 0), (1, 1)):
        for vertex in range(3):
            touched = [sign for e in edges if e[idx] == vertex
                       for sign in [e[2]]]
            assert sum(touched) == 0
            assert len(touched) in (0, 2)


class TestNFoldProduct:
    def test_single_column_blocks(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1]]), IntegerMatrix.from_rows([[1]]))
        prod = n_fold_product(a, 2)
        assert prod.row_list() == [(1, 1), (1, 0), (0, 1)]

    def test_n_equals_one_stacks_the_blocks(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1, 2], [0, 1]]),
                     IntegerMatrix.from_rows([[3, 4]]))
        prod = n_fold_product(a, 1)
        assert prod.row_list() == [(1, 2), (0, 1), (3, 4)]

    def test_unit_second_block_product_is_bipartite_incidence(self):
        # the 2-fold product of (I3, (1 1 1)) is the displayed 5 x 6
        # incidence matrix of K(3,2)
        a = Bimatrix(IntegerMatrix.identity(3),
                     IntegerMatrix.from_rows([[1, 1, 1]]))
        prod = n_fold_product(a, 2)
        assert (prod.rows, prod.cols) == (5, 6)
        assert prod.row_list() == [
            (1, 0, 0, 1, 0, 0),
            (0, 1, 0, 0, 1, 0),
            (0, 0, 1, 0, 0, 1),
            (1, 1, 1, 0, 0, 0),
            (0, 0, 0, 1, 1, 1),
        ]


class TestGraverComplexity:
    def test_two_for_opposite_signs_pair(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]),
                     IntegerMatrix.from_rows([[1, -1]]))
        assert graver_complexity(a) == 2

    def test_zero_for_full_column_rank_bottom_block(self):
        a = Bimatrix(IntegerMatrix.from_rows([[1, 1]]), IntegerMatrix.identity(2))
        assert graver_complexity(a) == 0
        budget = EnumerationBudget(max_points=100_000, max_norm=3)
        assert product_graver(a, 3, budget) == []

    def test_never_below_the_observed_brick_count(self):
        budget = EnumerationBudget(max_points=2_000_000, max_norm=3)
        for seed in (3, 11, 19):
            rng = random.Random(seed)
            a = random_bimatrix(rng, tmax=2)
            exact = graver_complexity(a)
            for n in (2, 3):
                for g in product_graver(a, n, budget):
                    assert max_nonzero_bricks(g, n, a.t) <= exact


class TestSubsetSumsLandInStateSpace:
    def test_prefix_and_subset_sums_are_states(self):
        # brick sums of n-fold Graver elements always lie in the state set
        budget = EnumerationBudget(max_points=2_000_000, max_norm=4)
        rng = random.Random(99)
        for seed in (0, 4, 7):
            a = random_bimatrix(random.Random(seed), tmax=2)
            complexity = graver_complexity(a)
            if complexity == 0:
                continue
            g2 = graver_basis(a.a2)
            space = build_state_space(g2, complexity)
            for n in (2, 3):
                for g in product_graver(a, n, budget):
                    bricks = [g[i * a.t:(i + 1) * a.t] for i in range(n)]
                    prefix = (0,) * a.t
                    for brick in bricks:
                        prefix = tuple(p + c for p, c in zip(prefix, brick))
                        assert prefix in space
                    for _ in range(3):
                        chosen = [b for b in bricks if rng.random() < 0.5]
                        total = tuple(
                            sum(col) for col in zip(*(chosen or [(0,) * a.t])))
                        assert total in space
