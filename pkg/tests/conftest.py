"""Shared fixtures and seeded generators for the test suite.

All randomness is drawn from seeded random.Random instances so every
run sees the same instances.  Generators keep coordinate windows small
enough for the brute-force oracles to stay inside their budgets.
"""

from __future__ import annotations

import random

import pytest

from nfoldip.matrices import Bimatrix, IntegerMatrix, conforms
from nfoldip.graver import n_fold_product
from nfoldip.models import TableInstance, TransportationInstance
from nfoldip.objective import LinearObjective, PiecewiseObjective
from nfoldip.solver import NFoldInstance

K33_ROWS = [
    [1, 0, 0, 1, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 1],
    [1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 1],
]


@pytest.fixture(scope="session")
def k33() -> IntegerMatrix:
    return IntegerMatrix.from_rows(K33_ROWS)


def random_bimatrix(rng: random.Random, *, rmax=2, smax=2, tmax=3, entry=2) -> Bimatrix:
    r = rng.randint(1, rmax)
    s = rng.randint(1, smax)
    t = rng.randint(1, tmax)
    a1 = IntegerMatrix.from_rows(
        [[rng.randint(-entry, entry) for _ in range(t)] for _ in range(r)])
    a2 = IntegerMatrix.from_rows(
        [[rng.randint(-entry, entry) for _ in range(t)] for _ in range(s)])
    return Bimatrix(a1, a2)


def random_bounds(rng: random.Random, nt: int, *, max_window=2):
    l, u = [], []
    for _ in range(nt):
        lo = rng.randint(-3, 1)
        hi = min(lo + rng.randint(0, max_window), 3)
        l.append(lo)
        u.append(hi)
    return tuple(l), tuple(u)


def random_rhs(rng: random.Random, a: Bimatrix, n: int, l, u, *, feasible: bool):
    nt = n * a.t
    if feasible:
        x = [rng.randint(l[j], u[j]) for j in range(nt)]
        return n_fold_product(a, n).matvec(x)
    return tuple(rng.randint(-3, 3) for _ in range(a.r + n * a.s))


def random_linear_instance(seed: int, *, nmax=4, feasible_bias=0.5) -> NFoldInstance:
    rng = random.Random(seed)
    a = random_bimatrix(rng)
    n = rng.randint(1, nmax)
    nt = n * a.t
    l, u = random_bounds(rng, nt)
    b = random_rhs(rng, a, n, l, u, feasible=rng.random() < feasible_bias)
    w = tuple(rng.randint(-5, 5) for _ in range(nt))
    return NFoldInstance(a, n, tuple(b), l, u, LinearObjective(w))


def random_piecewise_coord(rng: random.Random, lo: int, hi: int, pmax: int):
    """Convex integer piecewise data covering [lo, hi] with <= pmax pieces."""
    pieces = rng.randint(1, pmax)
    interior = max(hi - lo - 1, 0)
    pieces = min(pieces, interior + 1)
    bps = sorted(rng.sample(range(lo + 1, hi), pieces - 1)) if pieces > 1 else []
    slopes = sorted(rng.randint(-5, 5) for _ in range(pieces))
    intercepts = [rng.randint(-3, 3)]
    for k, beta in enumerate(bps):
        intercepts.append(intercepts[-1] + (slopes[k] - slopes[k + 1]) * beta)
    return tuple(bps), tuple(slopes), tuple(intercepts)


def random_piecewise_instance(seed: int, *, nmax=4, pmax=3,
                              feasible_bias=0.7) -> NFoldInstance:
    rng = random.Random(seed)
    a = random_bimatrix(rng)
    n = rng.randint(1, nmax)
    nt = n * a.t
    l, u = random_bounds(rng, nt)
    b = random_rhs(rng, a, n, l, u, feasible=rng.random() < feasible_bias)
    pieces = {j: random_piecewise_coord(rng, l[j], u[j], pmax) for j in range(nt)}
    return NFoldInstance(a, n, tuple(b), l, u, PiecewiseObjective(nt, pieces))


def random_table(seed: int, *, nmax=3, pqmax=3, entry=1) -> TableInstance:
    """Margins of a random base table; entry=1 keeps margins at most 3."""
    rng = random.Random(seed)
    n = rng.randint(1, nmax)
    p = rng.randint(2, pqmax)
    q = rng.randint(2, pqmax)
    tab = [[[rng.randint(0, entry) for _ in range(q)] for _ in range(p)]
           for _ in range(n)]
    vjk = tuple(tuple(sum(tab[i][j][k] for i in range(n)) for k in range(q))
                for j in range(p))
    vik = tuple(tuple(sum(tab[i][j][k] for j in range(p)) for k in range(q))
                for i in range(n))
    vij = tuple(tuple(sum(tab[i][j][k] for k in range(q)) for j in range(p))
                for i in range(n))
    return TableInstance(n, p, q, vjk, vik, vij)


def random_transport(seed: int, *, lmax=2, mmax=2, nmax=3, qmax=3,
                     feasible_bias=0.8) -> TransportationInstance:
    rng = random.Random(seed)
    l = rng.randint(1, lmax)
    m = rng.randint(1, mmax)
    n = rng.randint(1, nmax)
    routing = [[[rng.randint(0, qmax) for _ in range(l)] for _ in range(m)]
               for _ in range(n)]
    supply = tuple(tuple(sum(routing[j][i][k] for j in range(n)) for k in range(l))
                   for i in range(m))
    demand = tuple(tuple(sum(routing[j][i][k] for i in range(m)) for k in range(l))
                   for j in range(n))
    if rng.random() < feasible_bias:
        capacity = tuple(tuple(sum(routing[j][i][k] for k in range(l))
                               + rng.randint(0, 2) for j in range(n))
                         for i in range(m))
    else:
        capacity = tuple(tuple(rng.randint(0, 2) for _ in range(n))
                         for _ in range(m))
    cost = []
    for i in range(m):
        row = []
        for j in range(n):
            cap = capacity[i][j]
            if rng.random() < 0.5 or cap < 2:
                row.append(("linear", rng.randint(0, 4)))
            else:
                beta = rng.randint(1, cap - 1)
                s0 = rng.randint(0, 3)
                s1 = s0 + rng.randint(1, 3)
                row.append(("piecewise", (beta,), (s0, s1), (0, (s0 - s1) * beta)))
        cost.append(tuple(row))
    return TransportationInstance(l, m, n, supply, demand, capacity, tuple(cost))


def assert_graver_invariants(m: IntegerMatrix, basis):
    """Kernel membership, negation closure, pairwise incomparability."""
    elems = list(basis)
    elem_set = set(elems)
    for v in elems:
        assert any(v), "zero vector in basis"
        assert not any(m.matvec(v)), "element outside the kernel"
        assert tuple(-c for c in v) in elem_set, "negation missing"
    for i, v in enumerate(elems):
        for w in elems:
            if w != v and conforms(w, v):
                raise AssertionError(f"{w} dominates {v}")
