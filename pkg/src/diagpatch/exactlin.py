"""Exact rational row reduction with a recorded transform.

The constraint matrices in this package are small integer matrices whose
rank structure carries meaning, so elimination runs over fractions.Fraction:
no pivot thresholds, no rank guesswork. The transform T (with T @ A ==
reduced) lets callers replay the identical row operations on floating-point
right-hand sides, and its rows beyond the rank are an exact basis of the
left null space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["RrefResult", "rref"]


@dataclass(frozen=True)
class RrefResult:
    reduced: tuple[tuple[Fraction, ...], ...]
    transform: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[tuple[int, int], ...]  # (row, column), rows 0..rank-1
    free_cols: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def left_null_rows(self) -> tuple[tuple[Fraction, ...], ...]:
        """Rows of the transform that annihilate the matrix from the left."""
        return self.transform[self.rank :]


def rref(matrix) -> RrefResult:
    """Reduced row echelon form, eliminating columns strictly left to right.

    Pivots are chosen greedily: the first remaining row with a nonzero entry
    in the current column. Columns that never yield a pivot are reported as
    free, in order.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    m = len(rows)
    if m == 0 or len(rows[0]) == 0:
        raise ValueError("rref: empty matrix")
    ncols = len(rows[0])
    if any(len(row) != ncols for row in rows):
        raise ValueError("rref: ragged matrix")
    transform = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots: list[tuple[int, int]] = []
    free_cols: list[int] = []
    pivot_row = 0
    for col in range(ncols):
        if pivot_row == m:
            free_cols.append(col)
            continue
        src = next((i for i in range(pivot_row, m) if rows[i][col] != 0), None)
        if src is None:
            free_cols.append(col)
            continue
        if src != pivot_row:
            rows[pivot_row], rows[src] = rows[src], rows[pivot_row]
            transform[pivot_row], transform[src] = transform[src], transform[pivot_row]
        p = rows[pivot_row][col]
        if p != 1:
            rows[pivot_row] = [x / p for x in rows[pivot_row]]
            transform[pivot_row] = [x / p for x in transform[pivot_row]]
        for i in range(m):
            f = rows[i][col]
            if i == pivot_row or f == 0:
                continue
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[pivot_row])]
            transform[i] = [a - f * b for a, b in zip(transform[i], transform[pivot_row])]
        pivots.append((pivot_row, col))
        pivot_row += 1
    return RrefResult(
        reduced=tuple(tuple(r) for r in rows),
        transform=tuple(tuple(r) for r in transform),
        pivots=tuple(pivots),
        free_cols=tuple(free_cols),
    )
