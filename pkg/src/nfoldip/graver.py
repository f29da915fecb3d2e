"""Graver bases of integer matrices and Graver complexity of bimatrices.

The Graver basis of an integer matrix M is the set of nonzero integer
kernel vectors of M that are minimal under the sign-compatible domination
order (see matrices.conforms).  It is computed here by a completion
procedure: seed with a lattice basis of the integer kernel and its
negations, close the set under normal-form reduction of pairwise sums,
then filter the minimal elements.  This is the simplest method that is
correct at desk scale; the test suite cross-checks it against a
brute-force enumeration oracle.

The Graver complexity of a bimatrix A = (A1, A2) is the largest number of
nonzero bricks in any Graver basis element of any n-fold product of A.
It equals the maximum 1-norm over the Graver basis of A1 * G2, where the
columns of G2 are the elements of the Graver basis of A2.  Before running
the completion on A1 * G2 we drop zero columns and collapse duplicate
columns; minimal elements never mix zero columns with other support, and
their coefficients on a duplicate class are sign-aligned, so collapsing
preserves the maximum 1-norm (zero columns contribute 1, duplicate
classes contribute 2).

Budgets are explicit: Graver bases can be exponentially large, and we
fail loudly with ResourceLimitError instead of grinding forever.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimitError
from .matrices import (
    Bimatrix,
    IntegerMatrix,
    IntVector,
    conforms,
    norm_1,
    norm_inf,
    vec_neg,
)

DEFAULT_MAX_ELEMENTS = 200_000
DEFAULT_MAX_NORM = 10**9
DEFAULT_MAX_PAIRS = 20_000_000


@dataclass(frozen=True)
class GraverBasis:
    """Finite symmetric set of minimal nonzero kernel vectors.

    elements is lexicographically sorted for reproducible iteration and
    byte-stable serialization.
    """

    dim: int
    elements: tuple[IntVector, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v) -> bool:
        return tuple(v) in set(self.elements)

    @property
    def is_empty(self) -> bool:
        return not self.elements


def kernel_lattice_basis(m: IntegerMatrix) -> list[IntVector]:
    """Basis of the integer kernel lattice {v : m v = 0}.

    Unimodular column elimination: gcd-reduce each row across the active
    columns while mirroring the operations on an identity transform.  The
    transform columns whose image became zero form a basis of the full
    kernel lattice (kernel lattices are saturated, and the transform is
    unimodular, so no finite-index sublattice can slip in).
    """
    rows, cols = m.rows, m.cols
    acols = [list(m.column(j)) for j in range(cols)]
    ucols = [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    fixed = 0
    for i in range(rows):
        while True:
            nz = [j for j in range(fixed, cols) if acols[j][i] != 0]
            if len(nz) <= 1:
                break
            jmin = min(nz, key=lambda j: abs(acols[j][i]))
            a = acols[jmin][i]
            for j in nz:
                if j == jmin:
                    continue
                q = acols[j][i] // a
                if q:
                    acols[j] = [x - q * y for x, y in zip(acols[j], acols[jmin])]
                    ucols[j] = [x - q * y for x, y in zip(ucols[j], ucols[jmin])]
        nz = [j for j in range(fixed, cols) if acols[j][i] != 0]
        if nz:
            j = nz[0]
            acols[fixed], acols[j] = acols[j], acols[fixed]
            ucols[fixed], ucols[j] = ucols[j], ucols[fixed]
            fixed += 1
    basis = []
    for j in range(fixed, cols):
        if any(acols[j]):
            raise AssertionError("free column with nonzero image")
        basis.append(tuple(ucols[j]))
    return basis


class _ReducerSet:
    """Growing vector set with a vectorized conformal-reducer lookup.

    Wraps a numpy int64 buffer; magnitudes are kept exact because every
    stored vector is also checked against the norm budget, which is far
    below the int64 range.
    """

    def __init__(self, dim: int, capacity: int = 256):
        self.dim = dim
        self.size = 0
        self.buf = np.zeros((capacity, dim), dtype=np.int64)
        self.abs = np.zeros((capacity, dim), dtype=np.int64)
        self.vectors: list[IntVector] = []

    def add(self, v: IntVector):
        if self.size == len(self.buf):
            self.buf = np.vstack([self.buf, np.zeros_like(self.buf)])
            self.abs = np.vstack([self.abs, np.zeros_like(self.abs)])
        arr = np.array(v, dtype=np.int64)
        self.buf[self.size] = arr
        self.abs[self.size] = np.abs(arr)
        self.size += 1
        self.vectors.append(v)

    _BLOCK = 128

    def find_reducer(self, v_arr: np.ndarray, v_abs: np.ndarray) -> int:
        """Index of some stored g with g conformal to v, else -1.

        Scans in blocks; most vectors reduce against an early (small)
        element, so the early exit saves a full pass over the set.
        """
        block = self._BLOCK
        for start in range(0, self.size, block):
            end = min(self.size, start + block)
            buf = self.buf[start:end]
            ok = ((buf * v_arr >= 0) & (self.abs[start:end] <= v_abs)).all(axis=1)
            idx = np.flatnonzero(ok)
            if idx.size:
                return start + int(idx[0])
        return -1

    def normal_form(self, v: IntVector) -> IntVector:
        arr = np.array(v, dtype=np.int64)
        while True:
            if not arr.any():
                return tuple(int(x) for x in arr)
            i = self.find_reducer(arr, np.abs(arr))
            if i < 0:
                return tuple(int(x) for x in arr)
            arr = arr - self.buf[i]


def _signs_compatible(u: IntVector, v: IntVector) -> bool:
    return all(a * b >= 0 for a, b in zip(u, v))


def _minimal_filter(vectors: list[IntVector]) -> list[IntVector]:
    """Keep the conformally minimal vectors.

    A dominating pair satisfies norm1(u) < norm1(v) unless u == v, so a
    single pass in ascending 1-norm against the kept set is complete.
    """
    order = sorted(vectors, key=lambda v: (norm_1(v), v))
    kept: list[IntVector] = []
    kept_arr: np.ndarray | None = None
    kept_abs: np.ndarray | None = None
    for v in order:
        arr = np.array(v, dtype=np.int64)
        if kept_arr is not None and len(kept) > 0:
            dom = ((kept_arr * arr >= 0) & (kept_abs <= np.abs(arr))).all(axis=1)
            if dom.any():
                continue
        kept.append(v)
        if kept_arr is None:
            kept_arr = arr.reshape(1, -1)
            kept_abs = np.abs(arr).reshape(1, -1)
        else:
            kept_arr = np.vstack([kept_arr, arr])
            kept_abs = np.vstack([kept_abs, np.abs(arr)])
    return kept


def graver_basis(m: IntegerMatrix, *, max_elements: int = DEFAULT_MAX_ELEMENTS,
                 max_norm: int = DEFAULT_MAX_NORM,
                 max_pairs: int = DEFAULT_MAX_PAIRS) -> GraverBasis:
    """Graver basis of m via completion, with explicit budgets.

    Raises ResourceLimitError when the completion set, a vector norm, or
    the number of processed candidate sums exceeds its budget; this
    distinguishes "output too large" from a wrong answer.
    """
    zero_cols = [j for j in range(m.cols) if not any(m.column(j))]
    if zero_cols:
        return _graver_with_zero_columns(m, zero_cols, max_elements=max_elements,
                                         max_norm=max_norm, max_pairs=max_pairs)
    seeds = kernel_lattice_basis(m)
    if not seeds:
        return GraverBasis(m.cols, ())
    dim = m.cols
    reducers = _ReducerSet(dim)
    queue: deque[IntVector] = deque()
    seen: set[IntVector] = set()
    processed = 0
    for b in seeds:
        for v in (b, vec_neg(b)):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    while queue:
        processed += 1
        if processed > max_pairs:
            raise ResourceLimitError(
                f"completion processed more than max_pairs={max_pairs} candidates",
                limit_name="max_pairs", limit_value=max_pairs,
                hint="raise the pair budget or supply a known Graver complexity override")
        f = queue.popleft()
        f = reducers.normal_form(f)
        if not any(f):
            continue
        if norm_inf(f) > max_norm:
            raise ResourceLimitError(
                f"completion vector exceeds max_norm={max_norm}",
                limit_name="max_norm", limit_value=max_norm,
                hint="raise the norm budget if the basis is expected to be this large")
        for g in reducers.vectors:
            # a sign-compatible sum reduces right back; skip it
            if _signs_compatible(f, g):
                continue
            sfg = tuple(a + b for a, b in zip(f, g))
            if any(sfg) and sfg not in seen:
                seen.add(sfg)
                queue.append(sfg)
        reducers.add(f)
        if reducers.size > max_elements:
            raise ResourceLimitError(
                f"completion exceeded max_elements={max_elements}",
                limit_name="max_elements", limit_value=max_elements,
                hint="raise the element budget or supply a known Graver complexity override")
    minimal = _minimal_filter(reducers.vectors)
    closed = set(minimal)
    closed.update(vec_neg(v) for v in minimal)
    elements = tuple(sorted(closed))
    _check_basis(m, elements)
    return GraverBasis(dim, elements)


def _graver_with_zero_columns(m: IntegerMatrix, zero_cols: list[int], **budgets
                              ) -> GraverBasis:
    """Split off all-zero columns before running the completion.

    A minimal kernel vector touching a zero column is a signed unit on
    that column (the unit itself reduces anything larger), so the basis
    is exactly the lifted basis of the stripped matrix plus the signed
    units of the stripped columns.
    """
    keep = [j for j in range(m.cols) if j not in set(zero_cols)]
    rows = [tuple(m.row(i)[j] for j in keep) for i in range(m.rows)]
    stripped = IntegerMatrix(m.rows, len(keep), tuple(v for r in rows for v in r))
    inner = graver_basis(stripped, **budgets)
    elements: set[IntVector] = set()
    for v in inner.elements:
        lifted = [0] * m.cols
        for pos, j in enumerate(keep):
            lifted[j] = v[pos]
        elements.add(tuple(lifted))
    for j in zero_cols:
        unit = [0] * m.cols
        unit[j] = 1
        elements.add(tuple(unit))
        unit[j] = -1
        elements.add(tuple(unit))
    out = tuple(sorted(elements))
    _check_basis(m, out)
    return GraverBasis(m.cols, out)


def _check_basis(m: IntegerMatrix, elements: tuple[IntVector, ...]):
    for v in elements:
        if any(m.matvec(v)):
            raise AssertionError("Graver element outside the kernel")
        if not any(v):
            raise AssertionError("zero vector in Graver basis")


def n_fold_product(a: Bimatrix, n: int) -> IntegerMatrix:
    """The (r + n s) x (n t) matrix with a1 across the top and a2 on the diagonal."""
    if n < 1:
        raise InputError("n-fold product needs n >= 1")
    r, s, t = a.r, a.s, a.t
    flat: list[int] = []
    for i in range(r):
        row = list(a.a1.row(i))
        flat.extend(row * n)
    for k in range(n):
        for i in range(s):
            row = [0] * (n * t)
            row[k * t:(k + 1) * t] = a.a2.row(i)
            flat.extend(row)
    return IntegerMatrix(r + n * s, n * t, tuple(flat))


def graver_complexity(a: Bimatrix, *, max_elements: int = DEFAULT_MAX_ELEMENTS,
                      max_norm: int = DEFAULT_MAX_NORM,
                      max_pairs: int = DEFAULT_MAX_PAIRS,
                      g2: GraverBasis | None = None) -> int:
    """Largest number of nonzero bricks over all n-fold Graver elements.

    Computed as the maximum 1-norm over the Graver basis of a1 * G2 with
    the column reductions described in the module docstring.  Returns 0
    when the bottom block has a trivial kernel (no nonzero bricks can
    exist).  Raises ResourceLimitError when an intermediate basis blows
    the budget; callers with a known value can bypass this via the
    solver's graver_complexity_override.
    """
    if g2 is None:
        g2 = graver_basis(a.a2, max_elements=max_elements, max_norm=max_norm,
                          max_pairs=max_pairs)
    if g2.is_empty:
        return 0
    columns = [a.a1.matvec(g) for g in g2.elements]
    best = 0
    nonzero: dict[IntVector, int] = {}
    for col in columns:
        if any(col):
            nonzero[col] = nonzero.get(col, 0) + 1
        else:
            best = max(best, 1)
    if any(cnt > 1 for cnt in nonzero.values()):
        best = max(best, 2)
    distinct = sorted(nonzero)
    if distinct:
        flat = []
        for i in range(a.r):
            flat.extend(col[i] for col in distinct)
        m = IntegerMatrix(a.r, len(distinct), tuple(flat))
        gm = graver_basis(m, max_elements=max_elements, max_norm=max_norm,
                          max_pairs=max_pairs)
        if not gm.is_empty:
            best = max(best, max(norm_1(v) for v in gm.elements))
    return best


def max_nonzero_bricks(v: IntVector, n: int, t: int) -> int:
    """Number of nonzero bricks of a vector in an n-fold space."""
    count = 0
    for i in range(n):
        if any(v[i * t:(i + 1) * t]):
            count += 1
    return count
