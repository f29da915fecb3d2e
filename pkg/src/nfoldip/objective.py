"""Objective functions: linear and separable convex piecewise affine.

A piecewise objective assigns every coordinate a univariate convex
function given by sorted interior breakpoints and per-piece integer
slopes and intercepts.  Piece k covers values in (breakpoint[k-1],
breakpoint[k]]; adjacent pieces must agree at the shared breakpoint, so
the boundary convention never changes a value.  Convexity means the
slopes never decrease.

Coordinates without an explicit description default to the zero
function, which keeps partially-costed models (costs on a few
coordinates only) cheap to state.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .matrices import IntVector, dot


@dataclass(frozen=True)
class LinearObjective:
    """Exact linear objective w . x."""

    weights: IntVector

    kind = "linear"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def dim(self) -> int:
        return len(self.weights)

    def value(self, x: Sequence[int]) -> int:
        if len(x) != len(self.weights):
            raise InputError("objective dimension mismatch")
        return dot(self.weights, x)

    def brick_weights(self, i: int, t: int) -> IntVector:
        return self.weights[i * t:(i + 1) * t]

    def brick_delta(self, i: int, t: int, x_brick: Sequence[int],
                    step_brick: Sequence[int]) -> int:
        return dot(self.brick_weights(i, t), step_brick)

    def max_abs(self) -> int:
        return max((abs(w) for w in self.weights), default=0)


class PiecewiseObjective:
    """Separable convex piecewise affine objective with integer data.

    pieces maps a coordinate index to (breakpoints, slopes, intercepts);
    missing coordinates are the zero function.
    """

    kind = "piecewise"

    def __init__(self, dim: int, pieces: dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]],
                 *, max_pieces: int | None = None):
        self.dim = dim
        norm: dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = {}
        for j, (bp, sl, ic) in pieces.items():
            if j < 0 or j >= dim:
                raise InputError(f"piecewise coordinate {j} out of range")
            bp = tuple(int(v) for v in bp)
            sl = tuple(int(v) for v in sl)
            ic = tuple(int(v) for v in ic)
            if len(sl) != len(bp) + 1 or len(ic) != len(sl):
                raise InputError(
                    f"coordinate {j}: need one more piece than breakpoints")
            if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
                raise InputError(f"coordinate {j}: breakpoints must strictly increase")
            if any(s2 < s1 for s1, s2 in zip(sl, sl[1:])):
                raise InputError(f"coordinate {j}: slopes must not decrease (convexity)")
            for k, b in enumerate(bp):
                if sl[k] * b + ic[k] != sl[k + 1] * b + ic[k + 1]:
                    raise InputError(
                        f"coordinate {j}: pieces {k} and {k + 1} disagree at breakpoint {b}")
            if max_pieces is not None and len(sl) > max_pieces:
                raise InputError(f"coordinate {j}: more than {max_pieces} pieces")
            norm[j] = (bp, sl, ic)
        self.pieces = norm
        self.max_pieces = max(
            (len(sl) for _, sl, _ in norm.values()), default=1)

    def coordinate_data(self, j: int):
        """Raw (breakpoints, slopes, intercepts) for a coordinate."""
        return self.pieces.get(j, ((), (0,), (0,)))

    def piece_index(self, j: int, v: int) -> int:
        bp, _, _ = self.coordinate_data(j)
        return bisect_right(bp, v)

    def value_coord(self, j: int, v: int) -> int:
        bp, sl, ic = self.coordinate_data(j)
        k = bisect_right(bp, v)
        return sl[k] * v + ic[k]

    def value(self, x: Sequence[int]) -> int:
        if len(x) != self.dim:
            raise InputError("objective dimension mismatch")
        return sum(self.value_coord(j, int(v)) for j, v in enumerate(x))

    def brick_delta(self, i: int, t: int, x_brick: Sequence[int],
                    step_brick: Sequence[int]) -> int:
        base = i * t
        total = 0
        for jj, (xv, sv) in enumerate(zip(x_brick, step_brick)):
            if sv == 0:
                continue
            j = base + jj
            total += self.value_coord(j, xv + sv) - self.value_coord(j, xv)
        return total

    def value_batch(self, j: int, values: np.ndarray) -> np.ndarray:
        """Vectorized exact evaluation for one coordinate (int64 values)."""
        bp, sl, ic = self.coordinate_data(j)
        if not bp:
            return np.asarray(sl[0], dtype=np.int64) * values + ic[0]
        idx = np.searchsorted(np.array(bp, dtype=np.int64), values, side="right")
        return np.array(sl, dtype=np.int64)[idx] * values + np.array(ic, dtype=np.int64)[idx]

    def max_abs(self) -> int:
        best = 0
        for bp, sl, ic in self.pieces.values():
            for v in list(bp) + list(sl) + list(ic):
                best = max(best, abs(v))
        return best

    def data_bit_length(self) -> int:
        total = 0
        for bp, sl, ic in self.pieces.values():
            for v in list(bp) + list(sl) + list(ic):
                total += max(abs(v), 1).bit_length()
        return total

    def __eq__(self, other):
        return (isinstance(other, PiecewiseObjective)
                and self.dim == other.dim and self.pieces == other.pieces)

    def __repr__(self):
        return f"PiecewiseObjective(dim={self.dim}, coords={sorted(self.pieces)})"


class EvaluatorObjective:
    """Separable convex objective given by a per-brick value callable.

    Used for optimality certification when the objective is only
    available as an evaluator f(i, brick) -> int.  Convexity of the
    underlying function is the caller's promise.
    """

    kind = "evaluator"

    def __init__(self, dim: int, n: int, t: int,
                 evaluator: Callable[[int, IntVector], int]):
        if n * t != dim:
            raise InputError("evaluator objective dimensions inconsistent")
        self.dim = dim
        self.n = n
        self.t = t
        self.evaluator = evaluator

    def value(self, x: Sequence[int]) -> int:
        x = tuple(x)
        return sum(int(self.evaluator(i, x[i * self.t:(i + 1) * self.t]))
                   for i in range(self.n))

    def brick_delta(self, i: int, t: int, x_brick: Sequence[int],
                    step_brick: Sequence[int]) -> int:
        moved = tuple(a + b for a, b in zip(x_brick, step_brick))
        return int(self.evaluator(i, moved)) - int(self.evaluator(i, tuple(x_brick)))


Objective = LinearObjective | PiecewiseObjective | EvaluatorObjective
