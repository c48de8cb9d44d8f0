import math

import numpy as np

from spectralab.reference import (
    drifting_interval_spectrum,
    hemisphere_spectrum,
    interval_spectrum,
    rectangle_spectrum,
    square_diagonal_spectrum,
)

PI2 = math.pi ** 2


def test_interval_spectrum():
    assert np.allclose(interval_spectrum(3), [PI2, 4 * PI2, 9 * PI2])
    assert np.allclose(interval_spectrum(2, length=2.0), [PI2 / 4, PI2])


def test_square_spectrum_head():
    assert np.allclose(rectangle_spectrum(6) / PI2, [2, 5, 5, 8, 10, 10])


def test_rectangle_matches_diagonal_form():
    # operator a d_xx + b d_yy on the unit square is the Laplacian on the
    # stretched rectangle
    assert np.allclose(square_diagonal_spectrum(10, (0.5, 1.0)),
                       rectangle_spectrum(10, lx=math.sqrt(2), ly=1.0))


def test_drifting_interval_spectrum():
    assert np.allclose(drifting_interval_spectrum(2), [1 + PI2, 1 + 4 * PI2])


def test_hemisphere_spectrum_multiplicities():
    values = hemisphere_spectrum(10)
    assert list(values) == [2, 6, 6, 12, 12, 12, 20, 20, 20, 20]
