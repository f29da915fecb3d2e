"""Layered dynamic program for Graver-best augmenting steps.

For a feasible point x and a step size gamma, the DP finds the cheapest
vector g = (g^1, ..., g^n) such that every brick g^i lies in the state
set, every partial sum of bricks lies in the state set, the last partial
sum is annihilated by the top block, and x + gamma*g respects the bounds.
Layer i holds a label per reachable state h (the partial sum of the
first i bricks); an arc from h' to h exists when h - h' is a state whose
gamma-step keeps brick i inside its bounds, weighted by the exact
objective delta of that brick move.

The digraph is never materialized.  Each layer relaxes (reachable
predecessor) x (bounds-feasible difference) pairs, which is at most
|Z|^2 work independent of n.  Relaxation runs on an exact numpy int64
fast path when a-priori magnitude bounds allow, and on a pure-Python
big-int path otherwise; both produce identical labels and identical
tie-breaks (smallest predecessor state index, which is also the
lexicographically smallest predecessor state).

All reported weights are recomputed from the objective in exact Python
arithmetic before a result is returned.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .matrices import Bimatrix, IntVector, join_bricks, norm_1, split_bricks, vec_sub
from .objective import EvaluatorObjective, LinearObjective, PiecewiseObjective
from .statespace import StateSpace, TerminalStates

_NUMPY_MIN_WORK = 2048
_INT64_SAFE = 2**61


@dataclass
class DpStats:
    """Accumulates DP effort for benchmarking."""

    dp_calls: int = 0
    dp_time: float = 0.0


@dataclass(frozen=True)
class DpResult:
    """Outcome of one DP solve: the cheapest step direction for one gamma."""

    step: IntVector
    weight: int
    trivial: bool


@dataclass(frozen=True)
class GraverBestStep:
    """A step at least as improving as any Graver element at any step size."""

    gamma: int
    step: IntVector
    delta: int


def _validate_feasible(a: Bimatrix, n: int, x, l, u, b=None):
    nt = n * a.t
    if len(x) != nt or len(l) != nt or len(u) != nt:
        raise InputError("point/bounds dimension mismatch")
    for j in range(nt):
        if not (l[j] <= x[j] <= u[j]):
            raise InputError(f"point violates bounds at coordinate {j}")
    if b is not None:
        _check_equations(a, n, x, b)


def _check_equations(a: Bimatrix, n: int, x, b):
    t = a.t
    bricks = split_bricks(x, n, t)
    top = [0] * a.r
    for br in bricks:
        img = a.a1.matvec(br)
        top = [p + q for p, q in zip(top, img)]
    if tuple(top) != tuple(b[:a.r]):
        raise InputError("point violates the linking equations")
    for i, br in enumerate(bricks):
        if tuple(a.a2.matvec(br)) != tuple(b[a.r + i * a.s:a.r + (i + 1) * a.s]):
            raise InputError(f"point violates the diagonal equations in brick {i}")


def _layer_weights_numpy(objective, i, t, x_brick, gamma, arr, d_idx):
    sub = arr[d_idx]
    if isinstance(objective, LinearObjective):
        w = np.array(objective.brick_weights(i, t), dtype=np.int64)
        return (sub @ w) * gamma
    base = i * t
    x_arr = np.array(x_brick, dtype=np.int64)
    total = np.zeros(len(d_idx), dtype=np.int64)
    for jj in range(t):
        col = sub[:, jj]
        j = base + jj
        moved = objective.value_batch(j, x_arr[jj] + gamma * col)
        total += moved - objective.value_coord(j, int(x_arr[jj]))
    return total


def _relax_layer(cur, arc_rows, allowed, is_terminal, last, size):
    """One layer of label relaxation over (reachable pred) x (allowed diff).

    Ties keep the first writer; predecessors arrive in ascending index
    order, so equal labels resolve to the smallest predecessor index.
    """
    new_lab: list = [None] * size
    new_pred = [0] * size
    touched: list[int] = []
    for pidx, plab in cur:
        row = arc_rows[pidx]
        for zi, w in allowed:
            sidx = row[zi]
            if sidx < 0:
                continue
            if last and not is_terminal[sidx]:
                continue
            c = plab + w
            cl = new_lab[sidx]
            if cl is None:
                new_lab[sidx] = c
                new_pred[sidx] = pidx
                touched.append(sidx)
            elif c < cl:
                new_lab[sidx] = c
                new_pred[sidx] = pidx
    if not touched:
        raise InputError("no feasible arc in a layer; point infeasible?")
    touched.sort()
    return ([(sidx, new_lab[sidx]) for sidx in touched],
            {sidx: new_pred[sidx] for sidx in touched})


def _run_layers_hybrid(space, terminals, objective, n, t, gamma,
                       x_bricks, l_bricks, u_bricks, numpy_weights):
    """Python relaxation over a precomputed arc table.

    Per-layer windows and arc weights come from vectorized int64 ops when
    the magnitude guard allows, otherwise from exact Python arithmetic.
    """
    states = space.states
    size = len(states)
    arc_rows = space.arc_rows()
    arr = space.as_array()
    scaled_arr = arr * gamma if numpy_weights else None
    scaled = None if numpy_weights else [tuple(gamma * c for c in s) for s in states]
    is_terminal = [False] * size
    for ti in terminals.indices:
        is_terminal[ti] = True
    linear = isinstance(objective, LinearObjective)
    cur: list[tuple[int, int]] = [(space.zero_index, 0)]
    parents: list[dict[int, int]] = []
    for i in range(n):
        xb = x_bricks[i]
        if numpy_weights:
            lo = np.array(l_bricks[i], dtype=np.int64) - np.array(xb, dtype=np.int64)
            hi = np.array(u_bricks[i], dtype=np.int64) - np.array(xb, dtype=np.int64)
            d_idx = np.flatnonzero(((scaled_arr >= lo) & (scaled_arr <= hi)).all(axis=1))
            if len(d_idx) == 0:
                raise InputError("no feasible arc in a layer; point infeasible?")
            w_col = _layer_weights_numpy(objective, i, t, xb, gamma, arr, d_idx)
            allowed = list(zip(d_idx.tolist(), w_col.tolist()))
        else:
            wlo = tuple(lv - xv for lv, xv in zip(l_bricks[i], xb))
            whi = tuple(uv - xv for uv, xv in zip(u_bricks[i], xb))
            allowed = []
            wb = objective.brick_weights(i, t) if linear else None
            for zi, z in enumerate(scaled):
                if all(wlo[j] <= z[j] <= whi[j] for j in range(t)):
                    if linear:
                        w = sum(wb[j] * z[j] for j in range(t))
                    else:
                        w = objective.brick_delta(i, t, xb, z)
                    allowed.append((zi, w))
            if not allowed:
                raise InputError("no feasible arc in a layer; point infeasible?")
        cur, parent = _relax_layer(cur, arc_rows, allowed, is_terminal,
                                   i == n - 1, size)
        parents.append(parent)
    return [k for k, _ in cur], [lab for _, lab in cur], parents


def _run_layers_numpy(space, terminals, objective, a, n, t, gamma,
                      x_bricks, l_bricks, u_bricks):
    """Vectorized int64 layer relaxation (magnitudes pre-checked by caller)."""
    arr = space.as_array()
    scaled = arr * gamma
    arc = space.arc_matrix()
    row_index = None if arc is not None else space.row_index()
    terminal_mask = np.zeros(len(space), dtype=bool)
    if terminals.indices:
        terminal_mask[list(terminals.indices)] = True
    cur_idx = np.array([space.zero_index], dtype=np.int64)
    cur_lab = np.zeros(1, dtype=np.int64)
    parents: list[dict[int, int]] = []
    for i in range(n):
        xb = np.array(x_bricks[i], dtype=np.int64)
        lo = np.array(l_bricks[i], dtype=np.int64) - xb
        hi = np.array(u_bricks[i], dtype=np.int64) - xb
        d_idx = np.flatnonzero(((scaled >= lo) & (scaled <= hi)).all(axis=1))
        if len(d_idx) == 0:
            raise InputError("no feasible arc in a layer; point infeasible?")
        last = i == n - 1
        d_w = _layer_weights_numpy(objective, i, t, x_bricks[i], gamma, arr, d_idx)
        cand = (cur_lab[:, None] + d_w[None, :]).reshape(-1)
        if arc is not None:
            succ = arc[cur_idx[:, None], d_idx[None, :]].reshape(-1).astype(np.int64)
        else:
            rows = (arr[cur_idx][:, None, :] + arr[d_idx][None, :, :]).reshape(-1, t)
            succ = row_index.lookup(rows)
        valid = succ >= 0
        if last:
            valid &= terminal_mask[np.where(succ >= 0, succ, 0)]
        pred = np.repeat(cur_idx, len(d_idx))
        succ_v = succ[valid]
        cand_v = cand[valid]
        pred_v = pred[valid]
        if len(succ_v) == 0:
            raise InputError("no feasible arc in a layer; point infeasible?")
        order = np.lexsort((pred_v, cand_v, succ_v))
        succ_s = succ_v[order]
        first = np.ones(len(succ_s), dtype=bool)
        first[1:] = succ_s[1:] != succ_s[:-1]
        kept = order[first]
        cur_idx = succ_v[kept]
        cur_lab = cand_v[kept]
        parents.append({int(s): int(p) for s, p in zip(cur_idx, pred_v[kept])})
    return ([int(v) for v in cur_idx], [int(v) for v in cur_lab], parents)


def _run_layers_exact(space, terminals, objective, n, t, gamma,
                      x_bricks, l_bricks, u_bricks):
    """Pure big-int fallback for spaces too large for an arc table."""
    states = space.states
    scaled = [tuple(gamma * c for c in s) for s in states]
    terminal_set = set(terminals.indices)
    linear = isinstance(objective, LinearObjective)
    index_of = space.index_of
    cur: list[tuple[int, int]] = [(space.zero_index, 0)]
    parents: list[dict[int, int]] = []
    for i in range(n):
        xb = x_bricks[i]
        wlo = tuple(lv - xv for lv, xv in zip(l_bricks[i], xb))
        whi = tuple(uv - xv for uv, xv in zip(u_bricks[i], xb))
        wb = objective.brick_weights(i, t) if linear else None
        allowed = []
        for zi, z in enumerate(scaled):
            if all(wlo[j] <= z[j] <= whi[j] for j in range(t)):
                if linear:
                    w = sum(wb[j] * z[j] for j in range(t))
                else:
                    w = objective.brick_delta(i, t, xb, z)
                allowed.append((zi, states[zi], w))
        if not allowed:
            raise InputError("no feasible arc in a layer; point infeasible?")
        last = i == n - 1
        new: dict[int, tuple[int, int]] = {}
        for pidx, plab in cur:
            ps = states[pidx]
            for zi, z, w in allowed:
                sidx = index_of(tuple(p + q for p, q in zip(ps, z)))
                if sidx < 0:
                    continue
                if last and sidx not in terminal_set:
                    continue
                c = plab + w
                prev = new.get(sidx)
                if prev is None or c < prev[0]:
                    new[sidx] = (c, pidx)
        if not new:
            raise InputError("no feasible arc in a layer; point infeasible?")
        items = sorted(new.items())
        cur = [(k, v[0]) for k, v in items]
        parents.append({k: v[1] for k, v in items})
    return [k for k, _ in cur], [lab for _, lab in cur], parents


def _numpy_safe(objective, space, gamma, n, x, t) -> bool:
    if isinstance(objective, EvaluatorObjective):
        return False
    arr = space.as_array()
    maxz = int(np.abs(arr).max(initial=0))
    maxx = max((abs(int(v)) for v in x), default=0)
    vmax = maxx + gamma * maxz
    if isinstance(objective, LinearObjective):
        arc = objective.max_abs() * gamma * maxz * t
    else:
        arc = 2 * t * (objective.max_abs() * (vmax + 1) + objective.max_abs())
    return vmax < _INT64_SAFE and arc * max(n, 1) < _INT64_SAFE


def solve_dp(a: Bimatrix, n: int, x, l, u, gamma: int, space: StateSpace,
             terminals: TerminalStates, objective, *,
             validate: bool = True, stats: DpStats | None = None) -> DpResult:
    """Minimum-weight step direction for a fixed step size.

    Returns the vector read off a minimum-weight path through the layered
    state graph.  The all-zero path always exists with weight 0, so the
    returned weight is at most 0.
    """
    started = time.perf_counter()
    if gamma < 1:
        raise InputError("step size must be a positive integer")
    t = space.dim
    if a.t != t:
        raise InputError("state space dimension differs from the bimatrix")
    if validate:
        _validate_feasible(a, n, x, l, u)
    states = space.states
    zero_idx = space.zero_index
    numpy_safe = _numpy_safe(objective, space, gamma, n, x, t)

    x_bricks = split_bricks(x, n, t)
    l_bricks = split_bricks(l, n, t)
    u_bricks = split_bricks(u, n, t)

    if numpy_safe and len(space) >= 192:
        cur_idx, cur_lab, parents = _run_layers_numpy(
            space, terminals, objective, a, n, t, gamma,
            x_bricks, l_bricks, u_bricks)
    elif space.arc_rows() is not None:
        cur_idx, cur_lab, parents = _run_layers_hybrid(
            space, terminals, objective, n, t, gamma,
            x_bricks, l_bricks, u_bricks, numpy_safe)
    else:
        cur_idx, cur_lab, parents = _run_layers_exact(
            space, terminals, objective, n, t, gamma,
            x_bricks, l_bricks, u_bricks)

    best_pos = min(range(len(cur_idx)), key=lambda p: (cur_lab[p], cur_idx[p]))
    end_idx = cur_idx[best_pos]
    bricks: list[IntVector] = []
    idx = end_idx
    for i in range(n - 1, -1, -1):
        pidx = parents[i][idx]
        bricks.append(vec_sub(states[idx], states[pidx]))
        idx = pidx
    if idx != zero_idx:
        raise AssertionError("DP path does not start at the zero state")
    bricks.reverse()
    step = join_bricks(bricks)
    trivial = not any(step)

    applied = tuple(xi + gamma * gi for xi, gi in zip(x, step))
    weight = objective.value(applied) - objective.value(x)
    if weight != cur_lab[best_pos]:
        raise AssertionError("DP label disagrees with the recomputed objective delta")
    _assert_step_valid(a, n, x, l, u, gamma, step)
    if stats is not None:
        stats.dp_calls += 1
        stats.dp_time += time.perf_counter() - started
    return DpResult(step=step, weight=weight, trivial=trivial)


def _assert_step_valid(a: Bimatrix, n: int, x, l, u, gamma: int, step):
    t = a.t
    top = [0] * a.r
    for i in range(n):
        brick = step[i * t:(i + 1) * t]
        if any(a.a2.matvec(brick)):
            raise AssertionError("step brick leaves the diagonal-block kernel")
        img = a.a1.matvec(brick)
        top = [p + q for p, q in zip(top, img)]
        for jj in range(t):
            v = x[i * t + jj] + gamma * brick[jj]
            if not (l[i * t + jj] <= v <= u[i * t + jj]):
                raise AssertionError("step leaves the bounds")
    if any(top):
        raise AssertionError("step violates the linking rows")


def critical_step_sizes(x, l, u, space: StateSpace, objective) -> tuple[int, ...]:
    """The step sizes a Graver-best search must consider.

    For every brick and every nonzero state the largest feasible step
    size is included; for piecewise objectives, every step size at which
    a coordinate crosses into a different affine piece is added as well.
    The set is deduplicated and ascending.
    """
    t = space.dim
    nt = len(x)
    if nt % t:
        raise InputError("point length is not a multiple of the brick size")
    n = nt // t
    arr = space.as_array()
    nz = np.flatnonzero(np.abs(arr).sum(axis=1) > 0)
    if len(nz) == 0:
        return ()
    sub = arr[nz]
    mags = [abs(int(v)) for v in (*x, *l, *u)]
    if max(mags, default=0) >= 2**62:
        return _critical_step_sizes_exact(x, l, u, space, objective, n, t)
    big = np.int64(2**62)
    gammas: set[int] = set()
    piecewise = isinstance(objective, PiecewiseObjective)
    xs = np.array(x, dtype=np.int64).reshape(n, t)
    los = np.array(l, dtype=np.int64).reshape(n, t) - xs
    his = np.array(u, dtype=np.int64).reshape(n, t) - xs
    pos = sub > 0
    neg = sub < 0
    div_pos = np.where(pos, sub, 1)
    div_neg = np.where(neg, sub, 1)
    chunk = max(1, 4_000_000 // max(len(sub) * t, 1))
    for start in range(0, n, chunk):
        end = min(n, start + chunk)
        hi_c = his[start:end][:, None, :]
        lo_c = los[start:end][:, None, :]
        cap_pos = np.where(pos[None, :, :], np.floor_divide(hi_c, div_pos[None, :, :]), big)
        cap_neg = np.where(neg[None, :, :], np.floor_divide(lo_c, div_neg[None, :, :]), big)
        gmax = np.minimum(cap_pos, cap_neg).min(axis=2)
        valid = gmax[gmax >= 1]
        if valid.size:
            gammas.update(int(v) for v in np.unique(valid))
        if piecewise:
            for i in range(start, end):
                _crossing_gammas(objective, i, t, xs[i], sub, gmax[i - start],
                                 gammas)
    return tuple(sorted(gammas))


def _critical_step_sizes_exact(x, l, u, space, objective, n, t):
    gammas: set[int] = set()
    piecewise = isinstance(objective, PiecewiseObjective)
    nz_states = [s for s in space.states if any(s)]
    for i in range(n):
        xb = x[i * t:(i + 1) * t]
        lo = tuple(lv - xv for lv, xv in zip(l[i * t:(i + 1) * t], xb))
        hi = tuple(uv - xv for uv, xv in zip(u[i * t:(i + 1) * t], xb))
        for z in nz_states:
            gmax = None
            for j in range(t):
                if z[j] > 0:
                    cap = hi[j] // z[j]
                elif z[j] < 0:
                    cap = lo[j] // z[j]
                else:
                    continue
                gmax = cap if gmax is None else min(gmax, cap)
            if gmax is not None and gmax >= 1:
                gammas.add(int(gmax))
                if piecewise:
                    for jj in range(t):
                        if z[jj] == 0:
                            continue
                        bp, _, _ = objective.coordinate_data(i * t + jj)
                        for beta in bp:
                            g0 = (beta - xb[jj]) // z[jj]
                            for g in (g0 - 1, g0, g0 + 1):
                                if 1 <= g <= gmax and (
                                        objective.piece_index(i * t + jj, xb[jj] + g * z[jj])
                                        != objective.piece_index(i * t + jj, xb[jj] + (g + 1) * z[jj])):
                                    gammas.add(int(g))
    return tuple(sorted(gammas))


def _crossing_gammas(objective: PiecewiseObjective, i: int, t: int,
                     xb: np.ndarray, sub: np.ndarray, gmax: np.ndarray,
                     gammas: set[int]):
    base = i * t
    for jj in range(t):
        bp, _, _ = objective.coordinate_data(base + jj)
        if not bp:
            continue
        col = sub[:, jj]
        mask = (col != 0) & (gmax >= 1)
        if not mask.any():
            continue
        z = col[mask]
        cap = gmax[mask]
        xv = int(xb[jj])
        for beta in bp:
            g0 = np.floor_divide(beta - xv, z)
            for shift in (-1, 0, 1):
                cand = g0 + shift
                sel = (cand >= 1) & (cand <= cap)
                if not sel.any():
                    continue
                cz = cand[sel]
                zz = z[sel]
                a_idx = _piece_idx_batch(bp, xv + cz * zz)
                b_idx = _piece_idx_batch(bp, xv + (cz + 1) * zz)
                for g in np.unique(cz[a_idx != b_idx]):
                    gammas.add(int(g))


def _piece_idx_batch(bp, values: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.array(bp, dtype=np.int64), values, side="right")


def graver_best_step(a: Bimatrix, n: int, x, l, u, space: StateSpace,
                     terminals: TerminalStates, objective, *,
                     threads: int = 1, validate: bool = True,
                     stats: DpStats | None = None) -> GraverBestStep | None:
    """Best (gamma, step) over all critical step sizes, or None.

    None means no strictly improving step exists; with an exact state
    space that certifies optimality of x.  Ties break toward smaller
    gamma, then lexicographically smaller step.
    """
    if validate:
        _validate_feasible(a, n, x, l, u)
    gammas = critical_step_sizes(x, l, u, space, objective)
    if not gammas:
        return None

    def run(g: int) -> DpResult:
        return solve_dp(a, n, x, l, u, g, space, terminals, objective,
                        validate=False, stats=stats)

    if threads > 1 and len(gammas) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, gammas))
    else:
        results = [run(g) for g in gammas]
    best: tuple[int, int, IntVector] | None = None
    for g, res in zip(gammas, results):
        if res.trivial or res.weight >= 0:
            continue
        key = (res.weight, g, res.step)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return GraverBestStep(gamma=best[1], step=best[2], delta=best[0])
