import numpy as np
import pytest

from diagpatch.bezier import ControlNet, CurvePolygon
from diagpatch.diagonals import DiagonalPair, check_compatibility, extract_diagonals


@pytest.fixture
def rng():
    return np.random.default_rng(0xD1A6)


def random_net(rng, n, dim=3, spread=1.0):
    return ControlNet(rng.normal(scale=spread, size=(n + 1, n + 1, dim)))


def admissible_pair(rng, n, dim=3):
    """A pair that is admissible by construction: extracted from a net."""
    return extract_diagonals(random_net(rng, n, dim))


def scrambled_pair(rng, n, dim=3):
    """Independent random polygons; inadmissible except on a measure-zero set."""
    pair = DiagonalPair(
        CurvePolygon(rng.normal(size=(2 * n + 1, dim))),
        CurvePolygon(rng.normal(size=(2 * n + 1, dim))),
    )
    assert not check_compatibility(pair).admissible
    return pair
