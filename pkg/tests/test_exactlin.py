from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagpatch.exactlin import rref


def as_fractions(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def is_rref(rows, pivots):
    """Reduced row echelon shape: staircase pivots of 1, zeros above and below."""
    seen = -1
    for r, (row, col) in enumerate(zip(rows, [p[1] for p in pivots])):
        if col <= seen:
            return False
        seen = col
        if rows[r][col] != 1:
            return False
        for other in range(len(rows)):
            if other != r and rows[other][col] != 0:
                return False
        if any(rows[r][c] != 0 for c in range(col)):
            return False
    for r in range(len(pivots), len(rows)):
        if any(x != 0 for x in rows[r]):
            return False
    return True


small_matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda m: st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=-9, max_value=9), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


class TestKnownMatrices:
    def test_identity(self):
        result = rref([[1, 0], [0, 1]])
        assert result.rank == 2
        assert result.free_cols == ()
        assert result.reduced == as_fractions([[1, 0], [0, 1]])

    def test_single_dependent_row(self):
        result = rref([[1, 2], [2, 4]])
        assert result.rank == 1
        assert result.free_cols == (1,)
        # second transform row certifies 2*(row 0) - (row 1) = 0
        null = result.left_null_rows[0]
        assert null == (Fraction(-2), Fraction(1)) or null == (Fraction(2), Fraction(-1))

    def test_wide_matrix(self):
        result = rref([[0, 1, 2], [0, 0, 3]])
        assert result.rank == 2
        assert result.pivots == ((0, 1), (1, 2))
        assert result.free_cols == (0,)

    def test_zero_matrix(self):
        result = rref([[0, 0], [0, 0]])
        assert result.rank == 0
        assert result.free_cols == (0, 1)
        assert len(result.left_null_rows) == 2

    def test_fraction_exactness(self):
        # 1/3 must come out as the exact rational, not a float
        result = rref([[3, 1]])
        assert result.reduced[0] == (Fraction(1), Fraction(1, 3))


class TestTransformContract:
    @settings(max_examples=80, deadline=None)
    @given(rows=small_matrices)
    def test_transform_times_input_is_reduced(self, rows):
        result = rref(rows)
        a = as_fractions(rows)
        assert mat_mul(result.transform, a) == result.reduced

    @settings(max_examples=80, deadline=None)
    @given(rows=small_matrices)
    def test_reduced_is_rref_shape(self, rows):
        result = rref(rows)
        assert is_rref(result.reduced, result.pivots)

    @settings(max_examples=80, deadline=None)
    @given(rows=small_matrices)
    def test_rank_matches_numpy(self, rows):
        result = rref(rows)
        arr = np.array(rows, dtype=float)
        assert result.rank == np.linalg.matrix_rank(arr, tol=1e-9)

    @settings(max_examples=80, deadline=None)
    @given(rows=small_matrices)
    def test_left_null_rows_annihilate_input(self, rows):
        result = rref(rows)
        a = as_fractions(rows)
        for null_row in result.left_null_rows:
            combo = mat_mul((null_row,), a)[0]
            assert all(x == 0 for x in combo)

    @settings(max_examples=60, deadline=None)
    @given(rows=small_matrices)
    def test_transform_is_invertible(self, rows):
        # the transform collects elementary operations, so it has full rank
        result = rref(rows)
        assert rref(result.transform).rank == len(rows)

    @settings(max_examples=60, deadline=None)
    @given(rows=small_matrices)
    def test_pivot_and_free_columns_partition(self, rows):
        result = rref(rows)
        pivot_cols = [c for _, c in result.pivots]
        n = len(rows[0])
        assert sorted(pivot_cols + list(result.free_cols)) == list(range(n))


class TestShapeErrors:
    def test_ragged_input_rejected(self):
        with pytest.raises(ValueError):
            rref([[1, 2], [3]])

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            rref([])
