"""The finite DP state set: bounded sums of bottom-block Graver elements.

The state set of degree d collects every sum of at most d elements of
G(A2), deduplicated.  With d equal to the Graver complexity of the
bimatrix this is the exact state alphabet of the augmentation dynamic
program; smaller d gives the truncated sets of the approximation
hierarchy.

States are stored lexicographically sorted and indexed 0..len-1; the DP
refers to states by index.  Construction runs as an iterated sumset with
numpy deduplication and stops early when a round adds nothing (a closed
sumset stays closed, so the set is then exact regardless of the requested
degree).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceLimitError
from .graver import GraverBasis
from .matrices import IntegerMatrix, IntVector

DEFAULT_MAX_STATES = 2_000_000


@dataclass(frozen=True)
class StateSpace:
    """Immutable indexed set of DP states.

    exact is True when the set is known to equal the untruncated state
    set (saturation during construction, or a caller-supplied degree at
    least the Graver complexity).
    """

    dim: int
    states: tuple[IntVector, ...]
    degree: int
    exact: bool
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    _array: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})
        arr = np.array(self.states, dtype=np.int64).reshape(len(self.states), self.dim)
        object.__setattr__(self, "_array", arr)

    def __len__(self) -> int:
        return len(self.states)

    def __contains__(self, v) -> bool:
        return tuple(v) in self._index

    def contains(self, v) -> bool:
        return tuple(v) in self._index

    def index_of(self, v) -> int:
        """Index of a state, or -1 when absent. Constant expected time."""
        return self._index.get(tuple(v), -1)

    def as_array(self) -> np.ndarray:
        return self._array

    @property
    def zero_index(self) -> int:
        return self._index[(0,) * self.dim]

    def coordinate_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        arr = self._array
        return arr.min(axis=0), arr.max(axis=0)

    def row_index(self) -> "RowIndex":
        cached = getattr(self, "_row_index", None)
        if cached is None:
            cached = RowIndex(self._array)
            object.__setattr__(self, "_row_index", cached)
        return cached

    def arc_matrix(self, max_cells: int = 8_000_000):
        """Dense successor table: arc_matrix()[p, d] = index of state p + state d.

        -1 marks sums outside the set.  None when the table would exceed
        max_cells entries; callers then fall back to hashed lookups.
        """
        cached = getattr(self, "_arc_matrix", "unset")
        if not isinstance(cached, str):
            return cached
        size = len(self)
        if size * size > max_cells:
            object.__setattr__(self, "_arc_matrix", None)
            return None
        arr = self._array
        sums = (arr[:, None, :] + arr[None, :, :]).reshape(-1, self.dim)
        table = self.row_index().lookup(sums).astype(np.int32).reshape(size, size)
        object.__setattr__(self, "_arc_matrix", table)
        return table

    def arc_rows(self):
        """arc_matrix as nested Python lists for tight interpreter loops."""
        cached = getattr(self, "_arc_rows", "unset")
        if not isinstance(cached, str):
            return cached
        mat = self.arc_matrix()
        rows = None if mat is None else mat.tolist()
        object.__setattr__(self, "_arc_rows", rows)
        return rows


class RowIndex:
    """Constant-time lookup from integer rows to their position in a fixed array.

    Rows are packed into mixed-radix integer keys chunked to stay inside
    int64; rows outside the coordinate ranges resolve to -1.
    """

    def __init__(self, arr: np.ndarray):
        if arr.ndim != 2 or len(arr) == 0:
            raise InputError("row index needs a nonempty 2-d array")
        self.arr = arr
        self.mins = arr.min(axis=0)
        self.maxs = arr.max(axis=0)
        sizes = (self.maxs - self.mins + 1).astype(object)
        self.chunks: list[tuple[slice, np.ndarray]] = []
        start = 0
        dim = arr.shape[1]
        while start < dim:
            end = start
            prod = 1
            while end < dim and prod * int(sizes[end]) < 2**62:
                prod *= int(sizes[end])
                end += 1
            radix = np.ones(end - start, dtype=np.int64)
            for j in range(end - start - 2, -1, -1):
                radix[j] = radix[j + 1] * int(sizes[start + j + 1])
            self.chunks.append((slice(start, end), radix))
            start = end
        self.map: dict = {}
        keys = self._keys(arr)
        for pos, key in enumerate(keys):
            self.map[key] = pos

    def _keys(self, rows: np.ndarray) -> list:
        cols = [(rows[:, sl] - self.mins[sl]) @ rad for sl, rad in self.chunks]
        if len(cols) == 1:
            return cols[0].tolist()
        return list(zip(*[c.tolist() for c in cols]))

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        out = np.full(len(rows), -1, dtype=np.int64)
        if len(rows) == 0:
            return out
        ok = ((rows >= self.mins) & (rows <= self.maxs)).all(axis=1)
        if not ok.any():
            return out
        sub = rows[ok]
        keys = self._keys(sub)
        got = self.map
        vals = np.fromiter((got.get(k, -1) for k in keys), dtype=np.int64,
                           count=len(keys))
        out[np.flatnonzero(ok)] = vals
        return out


@dataclass(frozen=True)
class TerminalStates:
    """The states closed under the top block: candidates for the last DP layer."""

    indices: tuple[int, ...]
    states: tuple[IntVector, ...]

    def __len__(self) -> int:
        return len(self.indices)


def build_state_space(g2: GraverBasis, degree: int, *,
                      max_states: int = DEFAULT_MAX_STATES) -> StateSpace:
    """All sums of at most `degree` elements of g2, deduplicated.

    Computed as the iterated sumset Z_k = Z_{k-1} + (G union {0}).  Stops
    early and marks the result exact when a round reaches a fixed point.
    """
    if degree < 1:
        raise InputError("state space degree must be >= 1")
    dim = g2.dim
    if g2.is_empty:
        return StateSpace(dim, ((0,) * dim,), degree, True)
    gens = np.array(sorted(g2.elements), dtype=np.int64)
    cur = np.zeros((1, dim), dtype=np.int64)
    exact = False
    for _ in range(degree):
        shifted = (cur[:, None, :] + gens[None, :, :]).reshape(-1, dim)
        new = np.unique(np.vstack([cur, shifted]), axis=0)
        if len(new) > max_states:
            raise ResourceLimitError(
                f"state space exceeded max_states={max_states}",
                limit_name="max_states", limit_value=max_states,
                hint="lower the degree or raise --max-states")
        if len(new) == len(cur):
            exact = True
            break
        cur = new
    states = tuple(tuple(int(v) for v in row) for row in cur)
    return StateSpace(dim, states, degree, exact)


def terminal_states(space: StateSpace, a1: IntegerMatrix) -> TerminalStates:
    """States annihilated by the top block (the last DP stage)."""
    if a1.cols != space.dim:
        raise InputError(f"top block has {a1.cols} columns, states have {space.dim}")
    arr = space.as_array()
    if a1.rows == 0:
        indices = tuple(range(len(space)))
    else:
        state_mag = int(np.abs(arr).max(initial=0))
        if state_mag * max(a1.max_abs(), 1) * space.dim < 2**62:
            a1t = np.array(a1.row_list(), dtype=np.int64).T
            images = arr @ a1t
            indices = tuple(int(i) for i in np.flatnonzero((images == 0).all(axis=1)))
        else:
            indices = tuple(i for i, s in enumerate(space.states)
                            if not any(a1.matvec(s)))
    return TerminalStates(indices, tuple(space.states[i] for i in indices))
