"""Brute-force reference implementations for tests and acceptance checks.

Everything in this module answers by exhaustive enumeration and shares no
algorithmic code with the solver modules: minimality filtering, kernel
enumeration and objective evaluation are all reimplemented here from the
raw data.  That keeps the verification path independent of the thing it
verifies.

Norm-bounded kernel enumeration is only sound when the relevant vectors
fit the bound; each caller documents why its bound suffices, or uses
saturates_under_doubling to demonstrate it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimitError
from .matrices import Bimatrix, IntegerMatrix, IntVector


@dataclass(frozen=True)
class EnumerationBudget:
    """Caps for brute-force work: node visits and coordinate norms."""

    max_points: int = 2_000_000
    max_norm: int = 3

    def __post_init__(self):
        if self.max_points < 1 or self.max_norm < 1:
            raise InputError("enumeration budget fields must be positive")


def _blown(name: str, value: int) -> ResourceLimitError:
    return ResourceLimitError(
        f"enumeration exceeded {name}={value}",
        limit_name=name, limit_value=value,
        hint="shrink the test case or raise the oracle budget")


def _dominates(u: IntVector, v: IntVector) -> bool:
    # sign-compatible coordinatewise domination, reimplemented on purpose
    return all(a * b >= 0 and abs(a) <= abs(b) for a, b in zip(u, v))


def _minimal_elements(vectors: list[IntVector]) -> list[IntVector]:
    order = sorted(vectors, key=lambda v: (sum(abs(c) for c in v), v))
    kept: list[IntVector] = []
    for v in order:
        if not any(_dominates(u, v) for u in kept):
            kept.append(v)
    return sorted(kept)


def _kernel_vectors_in_box(m: IntegerMatrix, max_norm: int,
                           budget: EnumerationBudget,
                           counter: list[int]) -> list[IntVector]:
    """All nonzero v with m v = 0 and |v_j| <= max_norm, by pruned search.

    Enumerates only vectors whose first nonzero coordinate is positive and
    mirrors them, pruning on per-row partial sums against what the
    remaining coordinates can still contribute.
    """
    rows = m.row_list()
    cols = m.cols
    suffix = [[0] * (cols + 1) for _ in rows]
    for ri, row in enumerate(rows):
        for j in range(cols - 1, -1, -1):
            suffix[ri][j] = suffix[ri][j + 1] + abs(row[j]) * max_norm
    out: list[IntVector] = []
    vec = [0] * cols
    partial = [0] * len(rows)

    def descend(j: int, any_nonzero: bool):
        counter[0] += 1
        if counter[0] > budget.max_points:
            raise _blown("max_points", budget.max_points)
        if j == cols:
            if any_nonzero and all(p == 0 for p in partial):
                v = tuple(vec)
                out.append(v)
                out.append(tuple(-c for c in v))
            return
        for ri in range(len(rows)):
            if abs(partial[ri]) > suffix[ri][j]:
                return
        lo = 0 if not any_nonzero else -max_norm
        for val in range(lo, max_norm + 1):
            vec[j] = val
            for ri, row in enumerate(rows):
                partial[ri] += row[j] * val
            descend(j + 1, any_nonzero or val > 0)
            for ri, row in enumerate(rows):
                partial[ri] -= row[j] * val
        vec[j] = 0

    descend(0, False)
    return out


def brute_force_graver(m: IntegerMatrix, budget: EnumerationBudget) -> list[IntVector]:
    """Kernel vectors within the norm box, filtered to the minimal ones.

    Sound only when every Graver element of m fits the norm bound; the
    caller is responsible for documenting why it does.
    """
    counter = [0]
    kernel = _kernel_vectors_in_box(m, budget.max_norm, budget, counter)
    return _minimal_elements(kernel)


def saturates_under_doubling(m: IntegerMatrix, budget: EnumerationBudget) -> bool:
    """True when doubling the norm bound finds no new minimal elements."""
    small = brute_force_graver(m, budget)
    double = EnumerationBudget(budget.max_points, 2 * budget.max_norm)
    return brute_force_graver(m, double) == small


def _brick_kernel(a2: IntegerMatrix, max_norm: int, budget: EnumerationBudget,
                  counter: list[int]) -> list[IntVector]:
    return sorted(_kernel_vectors_in_box(a2, max_norm, budget, counter))


def product_graver(a: Bimatrix, n: int, budget: EnumerationBudget) -> list[IntVector]:
    """Graver basis of the n-fold product by direct enumeration.

    Kernel vectors of the product decompose into per-brick kernel vectors
    of the bottom block whose top-block images sum to zero; enumerate
    those within the norm box and filter the minimal ones.
    """
    t = a.t
    counter = [0]
    bricks = [(0,) * t] + _brick_kernel(a.a2, budget.max_norm, budget, counter)
    images = [a.a1.matvec(z) for z in bricks]
    max_img = [max((abs(img[k]) for img in images), default=0) for k in range(a.r)]
    found: list[IntVector] = []
    chosen: list[int] = []

    def descend(i: int, partial: tuple[int, ...]):
        counter[0] += 1
        if counter[0] > budget.max_points:
            raise _blown("max_points", budget.max_points)
        if i == n:
            if all(p == 0 for p in partial) and any(chosen[k] != 0 for k in range(n)):
                flat: list[int] = []
                for bi in chosen:
                    flat.extend(bricks[bi])
                found.append(tuple(flat))
            return
        remaining = n - i
        for k in range(a.r):
            if abs(partial[k]) > remaining * max_img[k]:
                return
        for bi in range(len(bricks)):
            chosen.append(bi)
            descend(i + 1, tuple(p + c for p, c in zip(partial, images[bi])))
            chosen.pop()

    descend(0, (0,) * a.r)
    return _minimal_elements(found)


def brute_force_graver_complexity(a: Bimatrix, n_max: int,
                                  budget: EnumerationBudget) -> int:
    """Max count of nonzero bricks over n-fold Graver elements with n <= n_max.

    A lower bound on the true Graver complexity; it equals it once the
    value has saturated in n.
    """
    t = a.t
    best = 0
    for n in range(1, n_max + 1):
        for g in product_graver(a, n, budget):
            bricks = sum(1 for i in range(n) if any(g[i * t:(i + 1) * t]))
            best = max(best, bricks)
    return best


def _eval_linear(weights, x) -> int:
    return sum(int(w) * int(v) for w, v in zip(weights, x))


def _eval_piecewise_coord(breakpoints, slopes, intercepts, v: int) -> int:
    idx = 0
    for b in breakpoints:
        if v > b:
            idx += 1
        else:
            break
    return int(slopes[idx]) * v + int(intercepts[idx])


def evaluate_objective(objective, x) -> int:
    """Exact objective value, interpreting the objective's raw data directly."""
    kind = getattr(objective, "kind", None)
    if kind == "linear":
        return _eval_linear(objective.weights, x)
    if kind == "piecewise":
        total = 0
        for j, v in enumerate(x):
            bp, sl, ic = objective.coordinate_data(j)
            total += _eval_piecewise_coord(bp, sl, ic, int(v))
        return total
    raise InputError(f"oracle cannot evaluate objective of kind {kind!r}")


def brute_force_solve(inst, budget: EnumerationBudget):
    """Exhaust the box, keep the equality-feasible points, minimize directly.

    Returns (value, point) or None when no feasible point exists.  The
    box size must respect budget.max_points.
    """
    from .graver import n_fold_product  # matrix constructor only

    nt = inst.n * inst.bimatrix.t
    sizes = [inst.u[j] - inst.l[j] + 1 for j in range(nt)]
    total = 1
    for s in sizes:
        total *= s
        if total > budget.max_points:
            raise _blown("max_points", budget.max_points)
    mat = n_fold_product(inst.bimatrix, inst.n)
    rows = np.array(mat.row_list(), dtype=np.int64)
    b = np.array(inst.b, dtype=np.int64)
    lo = np.array(inst.l, dtype=np.int64)
    grids = np.meshgrid(*[np.arange(s, dtype=np.int64) for s in sizes], indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=1) + lo
    mag = int(np.abs(points).max(initial=0)) * max(mat.max_abs(), 1) * nt
    if mag >= 2**62:
        return _brute_force_solve_pyloop(inst, mat, budget)
    feas = points[(points @ rows.T == b).all(axis=1)]
    if feas.shape[0] == 0:
        return None
    values = _objective_values_np(inst.objective, feas)
    order = np.lexsort(tuple(feas[:, j] for j in range(nt - 1, -1, -1)) + (values,))
    best = order[0]
    point = tuple(int(v) for v in feas[best])
    return int(values[best]), point


def _objective_values_np(objective, pts: np.ndarray) -> np.ndarray:
    kind = getattr(objective, "kind", None)
    if kind == "linear":
        w = np.array(objective.weights, dtype=np.int64)
        return pts @ w
    if kind == "piecewise":
        total = np.zeros(len(pts), dtype=np.int64)
        for j in range(pts.shape[1]):
            bp, sl, ic = objective.coordinate_data(j)
            v = pts[:, j]
            if bp:
                # piece index = number of breakpoints strictly below v,
                # mirroring the scalar rule; continuity makes the boundary
                # convention irrelevant for the value
                idx = np.sum(v[:, None] > np.array(bp, dtype=np.int64)[None, :], axis=1)
            else:
                idx = np.zeros(len(v), dtype=np.intp)
            total += np.array(sl, dtype=np.int64)[idx] * v + np.array(ic, dtype=np.int64)[idx]
        return total
    raise InputError(f"oracle cannot evaluate objective of kind {kind!r}")


def _brute_force_solve_pyloop(inst, mat, budget: EnumerationBudget):
    nt = inst.n * inst.bimatrix.t
    rows = mat.row_list()
    best = None
    ranges = [range(inst.l[j], inst.u[j] + 1) for j in range(nt)]
    for point in itertools.product(*ranges):
        if all(sum(r[j] * point[j] for j in range(nt)) == bv
               for r, bv in zip(rows, inst.b)):
            val = evaluate_objective(inst.objective, point)
            key = (val, point)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best


def enumerate_tables(vjk, vik, vij, *, max_nodes: int = 5_000_000):
    """Yield every nonnegative integer table with the three given 2-margins.

    vjk is p x q (sums over the first axis), vik is n x q, vij is n x p.
    Cell-by-cell search with forced values on the last index of each axis.
    """
    n = len(vik)
    p = len(vjk)
    q = len(vjk[0]) if p else 0
    if len(vij) != n or any(len(r) != q for r in vik) or any(len(r) != p for r in vij):
        raise InputError("margin shapes are inconsistent")
    rem_jk = [[vjk[j][k] for k in range(q)] for j in range(p)]
    rem_ik = [[vik[i][k] for k in range(q)] for i in range(n)]
    rem_ij = [[vij[i][j] for j in range(p)] for i in range(n)]
    table = [[[0] * q for _ in range(p)] for _ in range(n)]
    nodes = [0]

    cells = [(i, j, k) for i in range(n) for j in range(p) for k in range(q)]

    def place(ci: int):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise _blown("max_nodes", max_nodes)
        if ci == len(cells):
            yield [[row[:] for row in sl] for sl in table]
            return
        i, j, k = cells[ci]
        forced = set()
        if i == n - 1:
            forced.add(rem_jk[j][k])
        if j == p - 1:
            forced.add(rem_ik[i][k])
        if k == q - 1:
            forced.add(rem_ij[i][j])
        if forced:
            if len(forced) > 1:
                return
            lo = hi = forced.pop()
            if lo < 0:
                return
        else:
            lo, hi = 0, min(rem_jk[j][k], rem_ik[i][k], rem_ij[i][j])
        for v in range(lo, hi + 1):
            if v > rem_jk[j][k] or v > rem_ik[i][k] or v > rem_ij[i][j]:
                continue
            table[i][j][k] = v
            rem_jk[j][k] -= v
            rem_ik[i][k] -= v
            rem_ij[i][j] -= v
            yield from place(ci + 1)
            table[i][j][k] = 0
            rem_jk[j][k] += v
            rem_ik[i][k] += v
            rem_ij[i][j] += v

    yield from place(0)


def brute_force_entry_range(vjk, vik, vij, cell, *, max_nodes: int = 5_000_000):
    """Sorted attainable values of one cell over all tables with the margins."""
    i, j, k = cell
    values = set()
    for table in enumerate_tables(vjk, vik, vij, max_nodes=max_nodes):
        values.add(table[i][j][k])
    return sorted(values)


def enumerate_routings(supply, demand, capacity, *, max_nodes: int = 5_000_000):
    """Yield every feasible integer multicommodity routing.

    supply is m x l, demand is n x l, capacity is m x n.  A routing is
    x[j][i][k]: the amount of commodity k sent from supplier i to
    consumer j.  Channel loads sum(k) x[j][i][k] respect capacity.
    """
    m = len(supply)
    l = len(supply[0]) if m else 0
    n = len(demand)
    rem_supply = [[supply[i][k] for k in range(l)] for i in range(m)]
    routing = [[[0] * l for _ in range(m)] for _ in range(n)]
    nodes = [0]

    def place_consumer(j: int):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise _blown("max_nodes", max_nodes)
        if j == n:
            if all(rem_supply[i][k] == 0 for i in range(m) for k in range(l)):
                yield [[row[:] for row in cons] for cons in routing]
            return
        cells = [(i, k) for i in range(m) for k in range(l)]
        need = [demand[j][k] for k in range(l)]
        load = [0] * m

        def place_cell(ci: int):
            nodes[0] += 1
            if nodes[0] > max_nodes:
                raise _blown("max_nodes", max_nodes)
            if ci == len(cells):
                if all(v == 0 for v in need):
                    yield from place_consumer(j + 1)
                return
            i, k = cells[ci]
            last_supplier = i == m - 1
            hi = min(need[k], rem_supply[i][k], capacity[i][j] - load[i])
            lo = need[k] if last_supplier else 0
            if lo > hi:
                return
            for v in range(lo, hi + 1):
                routing[j][i][k] = v
                need[k] -= v
                rem_supply[i][k] -= v
                load[i] += v
                yield from place_cell(ci + 1)
                routing[j][i][k] = 0
                need[k] += v
                rem_supply[i][k] += v
                load[i] -= v

        yield from place_cell(0)

    yield from place_consumer(0)


def brute_force_transportation(supply, demand, capacity, cost_fn,
                               *, max_nodes: int = 5_000_000):
    """Min total cost over all feasible routings, or None when infeasible.

    cost_fn(i, j, load) evaluates the channel cost exactly.
    """
    m = len(supply)
    n = len(demand)
    l = len(supply[0]) if m else 0
    best = None
    for routing in enumerate_routings(supply, demand, capacity, max_nodes=max_nodes):
        total = 0
        for j in range(n):
            for i in range(m):
                load = sum(routing[j][i][k] for k in range(l))
                total += cost_fn(i, j, load)
        if best is None or total < best[0]:
            best = (total, routing)
    return best
