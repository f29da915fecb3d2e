"""Application builders: multicommodity transportation and 3-way table bounds.

Both applications reduce to n-fold programs over a fixed bimatrix with
one brick per "long" dimension (consumers, table slices).  The builders
return the instance together with a decoder that maps solver points back
to the application's variables.

Row-order conventions (fixed so right-hand sides assemble the same way):

- Transportation brick j holds, supplier-major,
  (x[j][1][1..l], y[j][1], ..., x[j][m][1..l], y[j][m]); the diagonal
  block lists the l demand rows first, then the m channel-load link rows.
- Table brick i holds slice i row-major (cell (j,k) at q*(j-1)+(k-1));
  the diagonal block lists the q column-margin rows (sums over j) first,
  then the p row-margin rows (sums over k).  For p = q = 3 the diagonal
  block coincides with the bottom block of the universal bimatrix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, NFoldError
from .matrices import Bimatrix, IntegerMatrix, IntVector, join_bricks
from .objective import LinearObjective, PiecewiseObjective
from .solver import NFoldInstance, SolveReport, solve


class ModelInfeasibleError(NFoldError):
    """The model's constraint data admits no solution at all."""


def universal_bimatrix(m: int) -> Bimatrix:
    """The bimatrix whose n-fold programs express all of integer programming.

    The top block is the 3m x 3m identity; the bottom block is the
    (3+m) x 3m incidence matrix of the complete bipartite graph K(3,m):
    three slot rows (column classes mod 3) followed by m block rows.
    """
    if m < 1:
        raise InputError("universal bimatrix needs m >= 1")
    rows = []
    for k in range(3):
        rows.append([1 if j % 3 == k else 0 for j in range(3 * m)])
    for i in range(m):
        rows.append([1 if 3 * i <= j < 3 * (i + 1) else 0 for j in range(3 * m)])
    return Bimatrix(IntegerMatrix.identity(3 * m), IntegerMatrix.from_rows(rows))


# --- multicommodity transportation ------------------------------------------

@dataclass(frozen=True)
class TransportationInstance:
    """l commodities, m suppliers, n consumers, channel capacities and costs.

    cost[i][j] is either ("linear", slope) or ("piecewise", breakpoints,
    slopes, intercepts) describing the convex cost of the total load on
    channel (i, j).
    """

    commodities: int
    suppliers: int
    consumers: int
    supply: tuple[tuple[int, ...], ...]   # m x l
    demand: tuple[tuple[int, ...], ...]   # n x l
    capacity: tuple[tuple[int, ...], ...]  # m x n
    cost: tuple[tuple[tuple, ...], ...]    # m x n cost descriptors

    def __post_init__(self):
        l, m, n = self.commodities, self.suppliers, self.consumers
        if min(l, m, n) < 1:
            raise InputError("transportation needs at least one of everything")
        if len(self.supply) != m or any(len(row) != l for row in self.supply):
            raise InputError("supply must be suppliers x commodities")
        if len(self.demand) != n or any(len(row) != l for row in self.demand):
            raise InputError("demand must be consumers x commodities")
        if len(self.capacity) != m or any(len(row) != n for row in self.capacity):
            raise InputError("capacity must be suppliers x consumers")
        if len(self.cost) != m or any(len(row) != n for row in self.cost):
            raise InputError("cost must be suppliers x consumers")
        if any(v < 0 for row in self.supply for v in row) or \
           any(v < 0 for row in self.demand for v in row) or \
           any(v < 0 for row in self.capacity for v in row):
            raise InputError("supplies, demands and capacities must be nonnegative")

    def cost_value(self, i: int, j: int, load: int) -> int:
        desc = self.cost[i][j]
        if desc[0] == "linear":
            return int(desc[1]) * load
        _, bp, sl, ic = desc
        k = 0
        for beta in bp:
            if load > beta:
                k += 1
            else:
                break
        return int(sl[k]) * load + int(ic[k])


@dataclass(frozen=True)
class TransportationDecoder:
    """Recovers the routing x[j][i][k] from a solver point."""

    commodities: int
    suppliers: int
    consumers: int

    def routing(self, point) -> list[list[list[int]]]:
        l, m, n = self.commodities, self.suppliers, self.consumers
        width = m * (l + 1)
        out = []
        for j in range(n):
            brick = point[j * width:(j + 1) * width]
            cons = []
            for i in range(m):
                seg = brick[i * (l + 1):i * (l + 1) + l]
                cons.append([int(v) for v in seg])
            out.append(cons)
        return out

    def loads(self, point) -> list[list[int]]:
        l, m, n = self.commodities, self.suppliers, self.consumers
        width = m * (l + 1)
        return [[int(point[j * width + i * (l + 1) + l]) for j in range(n)]
                for i in range(m)]


def transportation_to_nfold(inst: TransportationInstance
                            ) -> tuple[NFoldInstance, TransportationDecoder]:
    """Encode a transportation instance as an n-fold program over consumers.

    Channel loads get their own linked variables so the convex channel
    costs become separable coordinate costs; routing variables are
    cost-free and capped by the channel capacity.
    """
    l, m, n = inst.commodities, inst.suppliers, inst.consumers
    t = m * (l + 1)
    a1_rows = []
    for i in range(m):
        for k in range(l):
            row = [0] * t
            row[i * (l + 1) + k] = 1
            a1_rows.append(row)
    a2_rows = []
    for k in range(l):
        row = [0] * t
        for i in range(m):
            row[i * (l + 1) + k] = 1
        a2_rows.append(row)
    for i in range(m):
        row = [0] * t
        row[i * (l + 1) + l] = 1
        for k in range(l):
            row[i * (l + 1) + k] = -1
        a2_rows.append(row)
    bimatrix = Bimatrix(IntegerMatrix.from_rows(a1_rows),
                        IntegerMatrix.from_rows(a2_rows))
    b = [inst.supply[i][k] for i in range(m) for k in range(l)]
    for j in range(n):
        b.extend(inst.demand[j][k] for k in range(l))
        b.extend([0] * m)
    l_bounds = []
    u_bounds = []
    pieces: dict[int, tuple] = {}
    all_linear = True
    lin_weights = []
    for j in range(n):
        for i in range(m):
            cap = inst.capacity[i][j]
            l_bounds.extend([0] * (l + 1))
            u_bounds.extend([cap] * (l + 1))
            lin_weights.extend([0] * l)
            coord = j * t + i * (l + 1) + l
            desc = inst.cost[i][j]
            if desc[0] == "linear":
                lin_weights.append(int(desc[1]))
            else:
                all_linear = False
                lin_weights.append(0)
                _, bp, sl, ic = desc
                pieces[coord] = (tuple(bp), tuple(sl), tuple(ic))
    nt = n * t
    if all_linear:
        objective = LinearObjective(tuple(lin_weights))
    else:
        for j in range(n):
            for i in range(m):
                coord = j * t + i * (l + 1) + l
                desc = inst.cost[i][j]
                if desc[0] == "linear":
                    pieces[coord] = ((), (int(desc[1]),), (0,))
        objective = PiecewiseObjective(nt, pieces)
    nfold = NFoldInstance(bimatrix, n, tuple(b), tuple(l_bounds),
                          tuple(u_bounds), objective)
    return nfold, TransportationDecoder(l, m, n)


def solve_transportation(inst: TransportationInstance, **solve_kwargs):
    """Solve and decode; returns (report, routing or None)."""
    nfold, decoder = transportation_to_nfold(inst)
    report = solve(nfold, **solve_kwargs)
    if report.point is None:
        return report, None
    return report, decoder.routing(report.point)


# --- 3-way tables with 2-margins --------------------------------------------

@dataclass(frozen=True)
class TableInstance:
    """A 3-way n x p x q table described only by its 2-margins.

    vjk[j][k] sums over the first axis, vik[i][k] over the second,
    vij[i][j] over the third.
    """

    n: int
    p: int
    q: int
    vjk: tuple[tuple[int, ...], ...]
    vik: tuple[tuple[int, ...], ...]
    vij: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, p, q = self.n, self.p, self.q
        if min(n, p, q) < 1:
            raise InputError("table dimensions must be positive")
        if len(self.vjk) != p or any(len(row) != q for row in self.vjk):
            raise InputError("vjk margin must be p x q")
        if len(self.vik) != n or any(len(row) != q for row in self.vik):
            raise InputError("vik margin must be n x q")
        if len(self.vij) != n or any(len(row) != p for row in self.vij):
            raise InputError("vij margin must be n x p")
        for name, margin in (("vjk", self.vjk), ("vik", self.vik), ("vij", self.vij)):
            if any(v < 0 for row in margin for v in row):
                raise InputError(f"{name} margin entries must be nonnegative")
        totals = {sum(v for row in m for v in row)
                  for m in (self.vjk, self.vik, self.vij)}
        if len(totals) != 1:
            raise InputError("margin families disagree on the grand total")

    def max_margin(self) -> int:
        return max(v for margin in (self.vjk, self.vik, self.vij)
                   for row in margin for v in row)


def table_to_nfold(inst: TableInstance, *, objective=None,
                   cell_lower: dict[tuple[int, int, int], int] | None = None,
                   cell_upper: dict[tuple[int, int, int], int] | None = None):
    """Encode the margin constraints as an n-fold program over slices.

    Entries are bounded by the largest margin value, optionally tightened
    per cell.  Returns the instance and a map (i, j, k) -> coordinate.
    """
    n, p, q = inst.n, inst.p, inst.q
    t = p * q
    a2_rows = []
    for k in range(q):
        a2_rows.append([1 if c % q == k else 0 for c in range(t)])
    for j in range(p):
        a2_rows.append([1 if j * q <= c < (j + 1) * q else 0 for c in range(t)])
    bimatrix = Bimatrix(IntegerMatrix.identity(t), IntegerMatrix.from_rows(a2_rows))
    b = [inst.vjk[j][k] for j in range(p) for k in range(q)]
    for i in range(n):
        b.extend(inst.vik[i][k] for k in range(q))
        b.extend(inst.vij[i][j] for j in range(p))
    cap = inst.max_margin()
    nt = n * t

    def coord(i: int, j: int, k: int) -> int:
        return i * t + j * q + k

    lo = [0] * nt
    hi = [cap] * nt
    for (i, j, k), v in (cell_lower or {}).items():
        lo[coord(i, j, k)] = max(lo[coord(i, j, k)], v)
    for (i, j, k), v in (cell_upper or {}).items():
        hi[coord(i, j, k)] = min(hi[coord(i, j, k)], v)
    if objective is None:
        objective = LinearObjective((0,) * nt)
    nfold = NFoldInstance(bimatrix, n, tuple(b), tuple(lo), tuple(hi), objective)
    return nfold, coord


def _solve_cell(inst: TableInstance, cell, sign: int, *,
                cell_lower=None, cell_upper=None, **solve_kwargs) -> SolveReport:
    n, p, q = inst.n, inst.p, inst.q
    nt = n * p * q
    i, j, k = cell
    if not (0 <= i < n and 0 <= j < p and 0 <= k < q):
        raise InputError(f"cell {cell} outside an {n} x {p} x {q} table")
    weights = [0] * nt
    weights[i * p * q + j * q + k] = sign
    nfold, _ = table_to_nfold(inst, objective=LinearObjective(tuple(weights)),
                              cell_lower=cell_lower, cell_upper=cell_upper)
    return solve(nfold, **solve_kwargs)


def entry_bounds(inst: TableInstance, cell: tuple[int, int, int],
                 **solve_kwargs) -> tuple[int, int]:
    """Smallest and largest value the cell takes over tables with the margins."""
    low = _solve_cell(inst, cell, 1, **solve_kwargs)
    if low.status == "Infeasible":
        raise ModelInfeasibleError("no table has the given margins")
    high = _solve_cell(inst, cell, -1, **solve_kwargs)
    return low.objective_value, -high.objective_value


def entry_value_range(inst: TableInstance, cell: tuple[int, int, int],
                      **solve_kwargs) -> list[int]:
    """Every attainable value of the cell, ascending; gaps are preserved.

    Repeatedly tightens the cell's lower bound past the last attained
    value and re-solves, so the work is proportional to the number of
    attained values.
    """
    lo, hi = entry_bounds(inst, cell, **solve_kwargs)
    values = [lo]
    current = lo
    while current < hi:
        nxt = _solve_cell(inst, cell, 1, cell_lower={cell: current + 1},
                          **solve_kwargs)
        if nxt.status == "Infeasible":
            break  # cannot happen while current < hi, kept as a guard
        current = nxt.objective_value
        values.append(current)
    return values
