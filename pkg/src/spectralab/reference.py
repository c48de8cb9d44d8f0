"""Closed-form Dirichlet spectra used as oracles and demo inputs."""

from __future__ import annotations

import math

import numpy as np


def interval_spectrum(count, length=1.0):
    """lambda_k = (k pi / L)^2 on an interval of the given length."""
    k = np.arange(1, count + 1, dtype=float)
    return (k * math.pi / length) ** 2


def rectangle_spectrum(count, lx=1.0, ly=1.0):
    """Sorted lambda = pi^2 (p^2/lx^2 + q^2/ly^2), p, q >= 1."""
    return square_diagonal_spectrum(count, (1.0 / lx ** 2, 1.0 / ly ** 2))


def square_diagonal_spectrum(count, diag):
    """Spectrum of ``a d_xx + b d_yy`` on the unit square: pi^2 (a p^2 + b q^2)."""
    a, b = float(diag[0]), float(diag[1])
    # p^2 <= vmax/a with vmax large enough to hold `count` values
    pmax = int(math.isqrt(int(4.0 * count / min(a, b, 1.0)))) + 32
    vals = np.array([a * p * p + b * q * q
                     for p in range(1, pmax) for q in range(1, pmax)])
    vals.sort()
    if len(vals) < count:
        raise ValueError("enumeration window too small")
    return math.pi ** 2 * vals[:count]


def drifting_interval_spectrum(count, slope=2.0, length=1.0):
    """Spectrum of u'' - slope*u' on (0, L): a^2 + (k pi / L)^2 with a = slope/2."""
    a = slope / 2.0
    return a ** 2 + interval_spectrum(count, length)


def hemisphere_spectrum(count):
    """Dirichlet spectrum of the unit hemisphere: l(l+1) with multiplicity l."""
    vals = []
    level = 1
    while len(vals) < count:
        vals.extend([float(level * (level + 1))] * level)
        level += 1
    return np.array(vals[:count])
