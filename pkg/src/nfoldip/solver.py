"""Two-phase exact n-fold solver built on Graver-best augmentation.

Phase one finds a feasible point through an auxiliary n-fold program
whose extra variables absorb the right-hand side at unit cost; the
original program is feasible exactly when that program has optimum zero.
Phase two repeatedly applies a Graver-best step found by the layered DP
until no strictly improving step exists.

State-space degrees are chosen adaptively.  The solver tries to compute
the exact Graver complexity cheaply; when that is out of budget (it
usually is for auxiliary bimatrices), augmentation runs over a small
degree and every stall is certified by an independent bounded search
over per-brick kernel vectors before "Optimal" is reported.  For
separable convex objectives a step improving at any step size is already
improving at step size one, so the stall search only needs unit steps.
Feasibility verdicts are additionally anchored by a direct dynamic
program over per-brick solution fibers, so an "Infeasible" answer never
depends on a truncated state space.

Optimality and infeasibility reports are therefore exact unless the
caller explicitly requests the truncated-degree approximate mode, which
reports HeuristicFeasible instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .dp import DpStats, GraverBestStep, graver_best_step, solve_dp
from .errors import InputError, IterationLimitError, ResourceLimitError
from .graver import GraverBasis, graver_basis, graver_complexity
from .matrices import (
    Bimatrix,
    IntegerMatrix,
    IntVector,
    join_bricks,
    norm_1,
    norm_inf,
)
from .objective import EvaluatorObjective, LinearObjective, PiecewiseObjective
from .statespace import (
    DEFAULT_MAX_STATES,
    StateSpace,
    build_state_space,
    terminal_states,
)

STATUS_OPTIMAL = "Optimal"
STATUS_INFEASIBLE = "Infeasible"
STATUS_HEURISTIC = "HeuristicFeasible"

_INITIAL_DEGREE = 3
_QUICK_MAX_ELEMENTS = 1500
_QUICK_MAX_PAIRS = 30_000
_VERIFIER_MAX_NODES = 8_000_000
_VERIFIER_MAX_CANDIDATES = 2_000_000
_GUARD_MAX_NODES = 8_000_000


@dataclass(frozen=True)
class NFoldInstance:
    """One n-fold program: bimatrix, size, right-hand side, bounds, objective.

    graver_complexity_override asserts a known Graver complexity and is
    trusted; degree switches on the truncated approximate mode.
    """

    bimatrix: Bimatrix
    n: int
    b: IntVector
    l: IntVector
    u: IntVector
    objective: object
    graver_complexity_override: int | None = None
    degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        object.__setattr__(self, "u", tuple(int(v) for v in self.u))
        a = self.bimatrix
        if self.n < 1:
            raise InputError("instance needs n >= 1")
        if len(self.b) != a.r + self.n * a.s:
            raise InputError(
                f"right-hand side needs {a.r + self.n * a.s} entries, got {len(self.b)}")
        nt = self.n * a.t
        if len(self.l) != nt or len(self.u) != nt:
            raise InputError(f"bounds need {nt} entries")
        if any(lo > hi for lo, hi in zip(self.l, self.u)):
            raise InputError("lower bound exceeds upper bound")
        dim = getattr(self.objective, "dim", None)
        if dim is not None and dim != nt:
            raise InputError("objective dimension does not match the instance")
        if self.graver_complexity_override is not None and self.graver_complexity_override < 1:
            raise InputError("graver_complexity_override must be positive")
        if self.degree is not None and self.degree < 1:
            raise InputError("degree must be positive")

    @property
    def nt(self) -> int:
        return self.n * self.bimatrix.t

    def feasibility_key(self) -> tuple:
        return (self.bimatrix.cache_key(), self.n, self.b, self.l, self.u)

    def bit_length(self) -> int:
        total = 0
        for v in itertools.chain(self.b, self.l, self.u):
            total += max(abs(v), 1).bit_length()
        obj = self.objective
        if isinstance(obj, LinearObjective):
            for v in obj.weights:
                total += max(abs(v), 1).bit_length()
        elif isinstance(obj, PiecewiseObjective):
            total += obj.data_bit_length()
        return total

    def iteration_cap(self) -> int:
        return 10 * self.n * self.bit_length() + 100


@dataclass(frozen=True)
class SolveReport:
    """Solver outcome: status, point, exact value, and the descent trace."""

    status: str
    point: IntVector | None
    objective_value: int | None
    iterations: int
    trace: tuple[tuple[int, int, int], ...]
    exact: bool
    aux_iterations: int = 0


@dataclass(frozen=True)
class Certificate:
    """Optimality verdict for a feasible point."""

    verdict: str  # "Optimal" | "Improvable"
    step: IntVector | None = None


_g2_cache: dict[tuple, GraverBasis] = {}
_space_cache: dict[tuple, StateSpace] = {}
_complexity_cache: dict[tuple, int | None] = {}
_feasible_cache: dict[tuple, tuple[IntVector | None, int]] = {}
_kernel_box_cache: dict[tuple, tuple[IntVector, ...]] = {}


def clear_caches():
    for c in (_g2_cache, _space_cache, _complexity_cache, _feasible_cache,
              _kernel_box_cache):
        c.clear()


def _cached_g2(a: Bimatrix, *, max_elements: int = 200_000) -> GraverBasis:
    key = (a.a2.rows, a.a2.cols, a.a2.entries)
    got = _g2_cache.get(key)
    if got is None:
        got = graver_basis(a.a2, max_elements=max_elements)
        _g2_cache[key] = got
    return got


def _cached_space(a: Bimatrix, degree: int, *,
                  max_states: int = DEFAULT_MAX_STATES) -> StateSpace:
    key = (a.cache_key(), degree)
    got = _space_cache.get(key)
    if got is None:
        got = build_state_space(_cached_g2(a), degree, max_states=max_states)
        _space_cache[key] = got
    return got


def _mark_exact(a: Bimatrix, space: StateSpace) -> StateSpace:
    if space.exact:
        return space
    upgraded = StateSpace(space.dim, space.states, space.degree, True)
    _space_cache[(a.cache_key(), space.degree)] = upgraded
    return upgraded


def _quick_complexity(a: Bimatrix) -> int | None:
    """Exact Graver complexity when cheap, None when over the quick budget."""
    key = a.cache_key()
    if key in _complexity_cache:
        return _complexity_cache[key]
    try:
        value = graver_complexity(a, max_elements=_QUICK_MAX_ELEMENTS,
                                  max_pairs=_QUICK_MAX_PAIRS)
    except ResourceLimitError:
        value = None
    _complexity_cache[key] = value
    return value


def state_space_for(inst: NFoldInstance, *,
                    max_states: int = DEFAULT_MAX_STATES) -> StateSpace:
    """Bind override / computed complexity / degree to a state space.

    Uses the override when present, otherwise computes the Graver
    complexity (raising a ResourceLimitError naming the override option
    when that is out of budget and no degree was given); an explicit
    degree selects the truncated approximate set.
    """
    a = inst.bimatrix
    if inst.graver_complexity_override is not None:
        complexity = inst.graver_complexity_override
    elif inst.degree is not None:
        complexity = _quick_complexity(a)
    else:
        complexity = _quick_complexity(a)
        if complexity is None:
            try:
                complexity = graver_complexity(a)
                _complexity_cache[a.cache_key()] = complexity
            except ResourceLimitError as err:
                raise ResourceLimitError(
                    "Graver complexity computation exceeded its budget; supply "
                    "a known value via graver_complexity_override "
                    "(--graver-complexity) or use a truncation degree (--degree)",
                    limit_name=err.limit_name, limit_value=err.limit_value,
                    hint="--graver-complexity") from err
    degree = inst.degree if inst.degree is not None else complexity
    if degree is None or degree < 1:
        # trivial kernel: complexity 0, the state set is just the origin
        degree = 1
    space = _cached_space(a, degree, max_states=max_states)
    if not space.exact and complexity is not None and degree >= complexity:
        space = _mark_exact(a, space)
    return space


def _pos(v: IntVector) -> IntVector:
    return tuple(max(c, 0) for c in v)


def _neg(v: IntVector) -> IntVector:
    return tuple(max(-c, 0) for c in v)


def _auxiliary_bimatrix(a: Bimatrix) -> Bimatrix:
    r, s, t = a.r, a.s, a.t
    i_r = IntegerMatrix.identity(r)
    neg_i_r = IntegerMatrix(r, r, tuple(-e for e in i_r.entries))
    i_s = IntegerMatrix.identity(s)
    neg_i_s = IntegerMatrix(s, s, tuple(-e for e in i_s.entries))
    a1 = a.a1.hstack(i_r).hstack(neg_i_r).hstack(IntegerMatrix.zero(r, s)) \
        .hstack(IntegerMatrix.zero(r, s))
    a2 = a.a2.hstack(IntegerMatrix.zero(s, r)).hstack(IntegerMatrix.zero(s, r)) \
        .hstack(i_s).hstack(neg_i_s)
    return Bimatrix(a1, a2)


def _auxiliary_start(inst: NFoldInstance):
    """Start point, bounds and objective for the auxiliary program.

    The original variables start at the in-bounds point closest to zero;
    the auxiliaries absorb the positive and negative parts of the
    resulting residual.  The auxiliary upper bound is the max-norm of the
    right-hand side, enlarged to the residual norm when zero is not
    within the original bounds.
    """
    a = inst.bimatrix
    r, s, t, n = a.r, a.s, a.t, inst.n
    xbar_bricks = []
    for i in range(n):
        lo = inst.l[i * t:(i + 1) * t]
        hi = inst.u[i * t:(i + 1) * t]
        xbar_bricks.append(tuple(min(max(0, lv), uv) for lv, uv in zip(lo, hi)))
    b0 = inst.b[:r]
    top = [0] * r
    for br in xbar_bricks:
        img = a.a1.matvec(br)
        top = [p + q for p, q in zip(top, img)]
    rho0 = tuple(bv - tv for bv, tv in zip(b0, top))
    rho_bricks = []
    for i in range(n):
        bi = inst.b[r + i * s:r + (i + 1) * s]
        img = a.a2.matvec(xbar_bricks[i])
        rho_bricks.append(tuple(bv - iv for bv, iv in zip(bi, img)))
    cap = max(norm_inf(inst.b),
              max(norm_inf(rho0), max((norm_inf(rb) for rb in rho_bricks), default=0)))
    z_bricks = []
    l_bricks = []
    u_bricks = []
    w_bricks = []
    for i in range(n):
        p = _pos(rho0) if i == 0 else (0,) * r
        q = _neg(rho0) if i == 0 else (0,) * r
        sv = _pos(rho_bricks[i])
        tv = _neg(rho_bricks[i])
        z_bricks.append(xbar_bricks[i] + p + q + sv + tv)
        l_bricks.append(inst.l[i * t:(i + 1) * t] + (0,) * (2 * r + 2 * s))
        u_bricks.append(inst.u[i * t:(i + 1) * t] + (cap,) * (2 * r + 2 * s))
        w_bricks.append((0,) * t + (1,) * (2 * r + 2 * s))
    aux = NFoldInstance(
        bimatrix=_auxiliary_bimatrix(a),
        n=n,
        b=inst.b,
        l=join_bricks(l_bricks),
        u=join_bricks(u_bricks),
        objective=LinearObjective(join_bricks(w_bricks)),
    )
    return aux, join_bricks(z_bricks), join_bricks(xbar_bricks)


def _extract_x_part(aux_point: IntVector, a: Bimatrix, n: int) -> IntVector:
    t = a.t
    width = t + 2 * a.r + 2 * a.s
    bricks = [aux_point[i * width:i * width + t] for i in range(n)]
    return join_bricks(bricks)


def _point_is_feasible(inst: NFoldInstance, x) -> bool:
    a = inst.bimatrix
    nt = inst.nt
    if len(x) != nt:
        return False
    if any(not (lo <= v <= hi) for lo, v, hi in zip(inst.l, x, inst.u)):
        return False
    t = a.t
    top = [0] * a.r
    for i in range(inst.n):
        br = x[i * t:(i + 1) * t]
        if tuple(a.a2.matvec(br)) != inst.b[a.r + i * a.s:a.r + (i + 1) * a.s]:
            return False
        img = a.a1.matvec(br)
        top = [p + q for p, q in zip(top, img)]
    return tuple(top) == inst.b[:a.r]


# --- independent feasibility guard -----------------------------------------

def _enumerate_fiber(a2: IntegerMatrix, lo, hi, rhs, counter, max_nodes: int):
    """All integer x with lo <= x <= hi and a2 x = rhs, in ascending order."""
    rows = a2.row_list()
    cols = a2.cols
    suff_min = [[0] * (cols + 1) for _ in rows]
    suff_max = [[0] * (cols + 1) for _ in rows]
    for ri, row in enumerate(rows):
        for j in range(cols - 1, -1, -1):
            cands = (row[j] * lo[j], row[j] * hi[j])
            suff_min[ri][j] = suff_min[ri][j + 1] + min(cands)
            suff_max[ri][j] = suff_max[ri][j + 1] + max(cands)
    out = []
    vec = [0] * cols
    partial = [0] * len(rows)

    def descend(j: int):
        counter[0] += 1
        if counter[0] > max_nodes:
            raise ResourceLimitError(
                f"feasibility guard exceeded max_nodes={max_nodes}",
                limit_name="max_nodes", limit_value=max_nodes,
                hint="raise the guard budget for larger instances")
        if j == cols:
            if all(p == rv for p, rv in zip(partial, rhs)):
                out.append(tuple(vec))
            return
        for ri in range(len(rows)):
            if partial[ri] + suff_min[ri][j] > rhs[ri]:
                return
            if partial[ri] + suff_max[ri][j] < rhs[ri]:
                return
        for val in range(lo[j], hi[j] + 1):
            vec[j] = val
            for ri, row in enumerate(rows):
                partial[ri] += row[j] * val
            descend(j + 1)
            for ri, row in enumerate(rows):
                partial[ri] -= row[j] * val

    descend(0)
    return out


def _direct_feasibility_dp(inst: NFoldInstance, *,
                           max_nodes: int = _GUARD_MAX_NODES) -> IntVector | None:
    """Exact feasibility by brick fibers and running top-block sums.

    Independent of Graver machinery: enumerate the solutions of each
    brick's diagonal equations within its box, then walk bricks keeping
    every reachable partial sum of top-block images, pruned by what the
    remaining bricks can still contribute.
    """
    a = inst.bimatrix
    r, s, t, n = a.r, a.s, a.t, inst.n
    b0 = inst.b[:r]
    counter = [0]
    fibers = []
    for i in range(n):
        lo = inst.l[i * t:(i + 1) * t]
        hi = inst.u[i * t:(i + 1) * t]
        rhs = inst.b[r + i * s:r + (i + 1) * s]
        fiber = _enumerate_fiber(a.a2, lo, hi, rhs, counter, max_nodes)
        if not fiber:
            return None
        fibers.append(fiber)
    images = [[a.a1.matvec(xb) for xb in fiber] for fiber in fibers]
    suff_min = [[0] * r for _ in range(n + 1)]
    suff_max = [[0] * r for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for k in range(r):
            vals = [img[k] for img in images[i]]
            suff_min[i][k] = suff_min[i + 1][k] + min(vals)
            suff_max[i][k] = suff_max[i + 1][k] + max(vals)
    layers: list[dict[tuple, tuple[tuple, int]]] = []
    cur: dict[tuple, None] = {(0,) * r: None}
    for i in range(n):
        nxt: dict[tuple, tuple[tuple, int]] = {}
        for partial in cur:
            for fi, img in enumerate(images[i]):
                counter[0] += 1
                if counter[0] > max_nodes:
                    raise ResourceLimitError(
                        f"feasibility guard exceeded max_nodes={max_nodes}",
                        limit_name="max_nodes", limit_value=max_nodes,
                        hint="raise the guard budget for larger instances")
                new = tuple(p + v for p, v in zip(partial, img))
                if new in nxt:
                    continue
                ok = True
                for k in range(r):
                    rem = b0[k] - new[k]
                    if rem < suff_min[i + 1][k] or rem > suff_max[i + 1][k]:
                        ok = False
                        break
                if ok:
                    nxt[new] = (partial, fi)
        if not nxt:
            return None
        layers.append(nxt)
        cur = nxt
    if tuple(b0) not in layers[-1]:
        return None
    bricks: list[IntVector] = []
    state = tuple(b0)
    for i in range(n - 1, -1, -1):
        prev, fi = layers[i][state]
        bricks.append(fibers[i][fi])
        state = prev
    bricks.reverse()
    point = join_bricks(bricks)
    if not _point_is_feasible(inst, point):
        raise AssertionError("feasibility guard produced an invalid point")
    return point


# --- bounded improving-step search (stall certification) -------------------

def _kernel_box(a2: IntegerMatrix, lo: IntVector, hi: IntVector,
                max_nodes: int) -> tuple[IntVector, ...]:
    """Nonzero kernel vectors of a2 within an asymmetric coordinate box."""
    key = ((a2.rows, a2.cols, a2.entries), lo, hi)
    got = _kernel_box_cache.get(key)
    if got is not None:
        return got
    rows = a2.row_list()
    cols = a2.cols
    suff_min = [[0] * (cols + 1) for _ in rows]
    suff_max = [[0] * (cols + 1) for _ in rows]
    for ri, row in enumerate(rows):
        for j in range(cols - 1, -1, -1):
            cands = (row[j] * lo[j], row[j] * hi[j])
            suff_min[ri][j] = suff_min[ri][j + 1] + min(cands)
            suff_max[ri][j] = suff_max[ri][j + 1] + max(cands)
    out: list[IntVector] = []
    vec = [0] * cols
    partial = [0] * len(rows)
    counter = [0]

    def descend(j: int, any_nonzero: bool):
        counter[0] += 1
        if counter[0] > max_nodes:
            raise ResourceLimitError(
                f"stall verification exceeded max_nodes={max_nodes}",
                limit_name="max_nodes", limit_value=max_nodes,
                hint="raise the verifier budget or supply --graver-complexity")
        if j == cols:
            if any_nonzero and all(p == 0 for p in partial):
                out.append(tuple(vec))
            return
        for ri in range(len(rows)):
            if partial[ri] + suff_min[ri][j] > 0 or partial[ri] + suff_max[ri][j] < 0:
                return
        for val in range(lo[j], hi[j] + 1):
            vec[j] = val
            for ri, row in enumerate(rows):
                partial[ri] += row[j] * val
            descend(j + 1, any_nonzero or val != 0)
            for ri, row in enumerate(rows):
                partial[ri] -= row[j] * val
        vec[j] = 0

    descend(0, False)
    result = tuple(sorted(out))
    _kernel_box_cache[key] = result
    return result


def _improving_step_search(inst: NFoldInstance, x, objective, *,
                           max_nodes: int = _VERIFIER_MAX_NODES,
                           max_candidates: int = _VERIFIER_MAX_CANDIDATES
                           ) -> GraverBestStep | None:
    """Complete bounded search for a strictly improving feasible step.

    Enumerates unit steps whose bricks are kernel vectors of the diagonal
    block inside the current slack windows and whose top-block images
    cancel.  Every Graver step feasible at any step size appears among
    them (a step improving at step size gamma is improving at step size
    one for separable convex objectives), so finding nothing certifies
    optimality.  Returns the best step, extended to its best step size.
    """
    a = inst.bimatrix
    r, t, n = a.r, a.t, inst.n
    lo_b = []
    hi_b = []
    for i in range(n):
        xb = x[i * t:(i + 1) * t]
        lo_b.append(tuple(lv - xv for lv, xv in zip(inst.l[i * t:(i + 1) * t], xb)))
        hi_b.append(tuple(uv - xv for uv, xv in zip(inst.u[i * t:(i + 1) * t], xb)))
    box_lo = tuple(min(lo_b[i][j] for i in range(n)) for j in range(t))
    box_hi = tuple(max(hi_b[i][j] for i in range(n)) for j in range(t))
    kernel = _kernel_box(a.a2, box_lo, box_hi, max_nodes)
    if not kernel:
        return None
    karr = np.array(kernel, dtype=np.int64)
    karr = np.vstack([np.zeros((1, t), dtype=np.int64), karr])  # choice 0 = stay
    images = [a.a1.matvec(tuple(int(v) for v in row)) for row in karr]
    img_arr = np.array(images, dtype=np.int64).reshape(len(karr), r)
    allowed: list[np.ndarray] = []
    for i in range(n):
        lo = np.array(lo_b[i], dtype=np.int64)
        hi = np.array(hi_b[i], dtype=np.int64)
        ok = ((karr >= lo) & (karr <= hi)).all(axis=1)
        ok[0] = True
        allowed.append(np.flatnonzero(ok))
    suff_min = [[0] * r for _ in range(n + 1)]
    suff_max = [[0] * r for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        sel = img_arr[allowed[i]]
        for k in range(r):
            col = sel[:, k]
            suff_min[i][k] = suff_min[i + 1][k] + int(col.min())
            suff_max[i][k] = suff_max[i + 1][k] + int(col.max())
    buckets: dict[tuple, list[int]] = {}
    for ci in allowed[n - 1]:
        buckets.setdefault(tuple(int(v) for v in img_arr[ci]), []).append(int(ci))
    candidates: list[tuple[int, ...]] = []
    chosen: list[int] = []
    counter = [0]

    def blow():
        raise ResourceLimitError(
            f"stall verification exceeded its budget",
            limit_name="max_nodes", limit_value=max_nodes,
            hint="raise the verifier budget or supply --graver-complexity")

    def descend(i: int, partial: tuple[int, ...]):
        counter[0] += 1
        if counter[0] > max_nodes:
            blow()
        if i == n - 1:
            need = tuple(-p for p in partial)
            for ci in buckets.get(need, ()):
                if any(chosen) or ci != 0:
                    candidates.append(tuple(chosen) + (ci,))
                    if len(candidates) > max_candidates:
                        blow()
            return
        for k in range(r):
            rem = -partial[k]
            if rem < suff_min[i][k] or rem > suff_max[i][k]:
                return
        for ci in allowed[i]:
            ci = int(ci)
            chosen.append(ci)
            descend(i + 1, tuple(p + int(v) for p, v in zip(partial, img_arr[ci])))
            chosen.pop()

    descend(0, (0,) * r)
    if not candidates:
        return None
    # evaluate unit-step deltas exactly and keep the strictly improving ones
    best: tuple[int, int, IntVector] | None = None
    fx = objective.value(x)
    for combo in candidates:
        step = join_bricks([tuple(int(v) for v in karr[ci]) for ci in combo])
        moved = tuple(xv + sv for xv, sv in zip(x, step))
        delta1 = objective.value(moved) - fx
        if delta1 >= 0:
            continue
        gamma, delta = _best_multiple(inst, x, step, objective, fx)
        key = (delta, gamma, step)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return GraverBestStep(gamma=best[1], step=best[2], delta=best[0])


def _best_multiple(inst: NFoldInstance, x, step, objective, fx: int):
    """Best step size for a fixed improving direction (convex in the size)."""
    gmax = None
    for j, sv in enumerate(step):
        if sv > 0:
            roomv = (inst.u[j] - x[j]) // sv
        elif sv < 0:
            roomv = (x[j] - inst.l[j]) // (-sv)
        else:
            continue
        gmax = roomv if gmax is None else min(gmax, roomv)
    gmax = 1 if gmax is None else max(1, gmax)
    best_gamma, best_delta = 1, None
    prev = None
    for g in range(1, min(gmax, 10_000) + 1):
        moved = tuple(xv + g * sv for xv, sv in zip(x, step))
        delta = objective.value(moved) - fx
        if best_delta is None or delta < best_delta:
            best_gamma, best_delta = g, delta
        if prev is not None and delta >= prev:
            break  # convex in g: once it stops improving it never resumes
        prev = delta
    return best_gamma, best_delta


# --- augmentation ----------------------------------------------------------

def _apply_step(x, gamma: int, step) -> IntVector:
    return tuple(xv + gamma * sv for xv, sv in zip(x, step))


def augment_to_optimal(inst: NFoldInstance, x0, *, threads: int = 1,
                       max_states: int = DEFAULT_MAX_STATES,
                       stats: DpStats | None = None) -> SolveReport:
    """Graver-best augmentation from a feasible point to optimality.

    In approximate mode (inst.degree set) the loop runs over the
    truncated state set and reports HeuristicFeasible unless that set
    happens to be exact.  Otherwise every stall is certified before
    Optimal is reported, escalating the degree when certification runs
    out of budget.
    """
    a = inst.bimatrix
    x = tuple(int(v) for v in x0)
    if not _point_is_feasible(inst, x):
        raise InputError("augmentation requires a feasible start point")
    objective = inst.objective
    approx = inst.degree is not None
    if inst.graver_complexity_override is not None:
        g_known = inst.graver_complexity_override
    elif approx:
        g_known = _quick_complexity(a)
    else:
        g_known = _quick_complexity(a)
    if approx:
        degree = inst.degree
    elif g_known is not None:
        degree = min(_INITIAL_DEGREE, g_known)
    else:
        degree = _INITIAL_DEGREE
    space = _cached_space(a, max(degree, 1), max_states=max_states)
    if g_known is not None and space.degree >= g_known:
        space = _mark_exact(a, space)
    terms = terminal_states(space, a.a1)
    cap = inst.iteration_cap()
    value = objective.value(x)
    trace: list[tuple[int, int, int]] = []
    iterations = 0
    while True:
        if iterations > cap:
            raise IterationLimitError(
                f"augmentation exceeded the safety cap of {cap} iterations")
        found = graver_best_step(a, inst.n, x, inst.l, inst.u, space, terms,
                                 objective, threads=threads, validate=False,
                                 stats=stats)
        if found is not None:
            x = _apply_step(x, found.gamma, found.step)
            new_value = objective.value(x)
            if new_value - value != found.delta or new_value >= value:
                raise AssertionError("augmentation step failed to descend")
            value = new_value
            applied = tuple(found.gamma * sv for sv in found.step)
            trace.append((found.gamma, norm_1(applied), new_value))
            iterations += 1
            continue
        # stalled: no improving step over the current state set
        if space.exact:
            status, exact = STATUS_OPTIMAL, True
            break
        if approx:
            status, exact = STATUS_HEURISTIC, False
            break
        try:
            better = _improving_step_search(inst, x, objective)
        except ResourceLimitError:
            better = False  # sentinel: could not verify, escalate
        if better is None:
            status, exact = STATUS_OPTIMAL, True
            break
        if better is False:
            space = _cached_space(a, space.degree + 1, max_states=max_states)
            if g_known is not None and space.degree >= g_known:
                space = _mark_exact(a, space)
            terms = terminal_states(space, a.a1)
            continue
        x = _apply_step(x, better.gamma, better.step)
        new_value = objective.value(x)
        if new_value >= value:
            raise AssertionError("verified step failed to descend")
        value = new_value
        applied = tuple(better.gamma * sv for sv in better.step)
        trace.append((better.gamma, norm_1(applied), new_value))
        iterations += 1
        # the DP missed this step, so give it a larger state set when affordable
        try:
            space = _cached_space(a, space.degree + 1, max_states=max_states)
            if g_known is not None and space.degree >= g_known:
                space = _mark_exact(a, space)
            terms = terminal_states(space, a.a1)
        except ResourceLimitError:
            pass  # keep the small space; the step search keeps us sound
    return SolveReport(status=status, point=x, objective_value=value,
                       iterations=iterations, trace=tuple(trace), exact=exact)


def find_feasible(inst: NFoldInstance, *, threads: int = 1,
                  max_states: int = DEFAULT_MAX_STATES,
                  stats: DpStats | None = None) -> IntVector | None:
    """Feasible point via the auxiliary program, or None.

    The auxiliary program starts from the in-bounds point closest to the
    origin with the auxiliaries absorbing the residual, and is driven by
    the same Graver-best machinery.  A stall at a positive auxiliary
    value is resolved by the independent feasibility guard, so the
    infeasibility verdict never depends on a truncated state set.
    """
    point, _ = _find_feasible_counted(inst, threads=threads,
                                      max_states=max_states, stats=stats)
    return point


def _find_feasible_counted(inst: NFoldInstance, *, threads: int = 1,
                           max_states: int = DEFAULT_MAX_STATES,
                           stats: DpStats | None = None
                           ) -> tuple[IntVector | None, int]:
    key = inst.feasibility_key()
    if key in _feasible_cache:
        return _feasible_cache[key]
    aux, z0, xbar = _auxiliary_start(inst)
    abar = aux.bimatrix
    objective = aux.objective
    z = z0
    if not _point_is_feasible(aux, z):
        raise AssertionError("auxiliary start point is infeasible")
    value = objective.value(z)
    iterations = 0
    result: IntVector | None
    if value == 0:
        result = xbar
    else:
        space = _cached_space(abar, 1, max_states=max_states)
        terms = terminal_states(space, abar.a1)
        cap = aux.iteration_cap()
        while True:
            if value == 0:
                break
            if iterations > cap:
                raise IterationLimitError(
                    f"auxiliary augmentation exceeded the safety cap of {cap}")
            found = graver_best_step(abar, aux.n, z, aux.l, aux.u, space, terms,
                                     objective, threads=threads, validate=False,
                                     stats=stats)
            if found is None:
                break
            z = _apply_step(z, found.gamma, found.step)
            new_value = objective.value(z)
            if new_value >= value:
                raise AssertionError("auxiliary step failed to descend")
            value = new_value
            iterations += 1
        if value == 0:
            result = _extract_x_part(z, inst.bimatrix, inst.n)
        else:
            # stalled positive: ask the independent guard
            guard_point = _direct_feasibility_dp(inst)
            result = guard_point
    if result is not None and not _point_is_feasible(inst, result):
        raise AssertionError("feasibility phase returned an invalid point")
    _feasible_cache[key] = (result, iterations)
    return result, iterations


def solve(inst: NFoldInstance, *, threads: int = 1,
          max_states: int = DEFAULT_MAX_STATES, certify_full: bool = False,
          stats: DpStats | None = None) -> SolveReport:
    """Feasibility phase, then Graver-best augmentation to optimality.

    Infeasible is an answer, not an error.  In approximate mode the
    status is HeuristicFeasible (exact=False) unless certify_full is set
    and a full certification pass proves the point optimal.
    """
    point, aux_iterations = _find_feasible_counted(
        inst, threads=threads, max_states=max_states, stats=stats)
    if point is None:
        return SolveReport(status=STATUS_INFEASIBLE, point=None,
                           objective_value=None, iterations=0, trace=(),
                           exact=True, aux_iterations=aux_iterations)
    report = augment_to_optimal(inst, point, threads=threads,
                                max_states=max_states, stats=stats)
    report = replace(report, aux_iterations=aux_iterations)
    if report.status == STATUS_HEURISTIC and certify_full:
        base = replace(inst, degree=None)
        cert = certify_optimal(base, report.point, threads=threads)
        if cert.verdict == STATUS_OPTIMAL:
            report = replace(report, status=STATUS_OPTIMAL, exact=True)
    return report


def certify_optimal(inst: NFoldInstance, x, evaluator=None, *,
                    threads: int = 1,
                    max_states: int = DEFAULT_MAX_STATES) -> Certificate:
    """Optimality certificate for a feasible point.

    Runs the unit-step DP when an exact state space is available,
    otherwise falls back to the complete bounded step search.  The
    returned improving step is at least as good as any feasible Graver
    step.  An evaluator callable (brick index, brick) -> value switches
    the weights to evaluator deltas for separable convex objectives that
    are not given in closed form.
    """
    a = inst.bimatrix
    x = tuple(int(v) for v in x)
    if not _point_is_feasible(inst, x):
        raise InputError("certification requires a feasible point")
    if evaluator is not None:
        objective = EvaluatorObjective(inst.nt, inst.n, a.t, evaluator)
    else:
        objective = inst.objective
    g_known = inst.graver_complexity_override
    if g_known is None:
        g_known = _quick_complexity(a)
    if g_known is not None:
        space = _cached_space(a, max(g_known, 1), max_states=max_states)
        space = _mark_exact(a, space)
        terms = terminal_states(space, a.a1)
        res = solve_dp(a, inst.n, x, inst.l, inst.u, 1, space, terms, objective,
                       validate=False)
        if res.weight < 0:
            return Certificate(verdict="Improvable", step=res.step)
        return Certificate(verdict=STATUS_OPTIMAL)
    better = _improving_step_search(inst, x, objective)
    if better is None:
        return Certificate(verdict=STATUS_OPTIMAL)
    return Certificate(verdict="Improvable", step=better.step)
