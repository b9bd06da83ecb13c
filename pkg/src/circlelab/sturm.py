"""Sign-change counting and coefficient certificates for trig series.

The quantitative certificate: if the coefficient mass below harmonic ``n``
is smaller than ``2**(-2n+3) |a_n|``, the function changes sign at least
``2n`` times per period.  This module counts the sign changes, evaluates
the certificate, checks the positive-function coefficient inequality
``|a_0| >= 2 |a_n|``, and performs the zero-absorbing product step used in
the inductive proof of the certificate.
"""

from __future__ import annotations

import numpy as np

from .config import TOLERANCES
from .fourier import TWO_PI, FourierSeries
from .scan import cyclic_crossings


class IndeterminateSignError(RuntimeError):
    """The function is numerically indistinguishable from zero on part of the circle."""


class NotPositiveError(ValueError):
    """A positivity precondition failed on the evaluation grid."""


def sign_changes(phi: FourierSeries, grid_size: int | None = None) -> int:
    """Strict sign alternations of ``phi`` over one period.

    The grid must carry at least 64 points per harmonic; near-zero samples
    are refined 16x before signs are decided.  The count is even.
    """
    min_grid = 64 * max(phi.band_limit, 1)
    if grid_size is None:
        grid_size = max(256, min_grid)
    elif grid_size < 64 * phi.band_limit:
        raise ValueError(f"grid_size {grid_size} below 64 per harmonic ({64 * phi.band_limit})")
    scan = cyclic_crossings(phi.eval, grid_size, near_zero=TOLERANCES["near-zero"])
    if scan.unresolved:
        raise IndeterminateSignError(
            f"{len(scan.unresolved)} near-zero plateau(s) could not be resolved")
    return scan.count


def sh_certificate(phi: FourierSeries, n: int) -> bool:
    """Whether the low-harmonic mass is strictly below ``2**(-2n+3) |a_n|``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n > phi.band_limit:
        raise ValueError(f"n={n} exceeds band limit {phi.band_limit}")
    low = sum(abs(phi.coeff(k)) for k in range(-n + 1, n))
    return low < 2.0 ** (-2 * n + 3) * abs(phi.coeff(n))


def certified_lower_bound(phi: FourierSeries) -> int:
    """2n for the largest n whose certificate holds, else 0.

    Sound for the certified ensemble: the returned bound never exceeds
    ``sign_changes(phi)``.
    """
    for n in range(phi.band_limit, 0, -1):
        if sh_certificate(phi, n):
            return 2 * n
    return 0


def polya_positive_check(phi: FourierSeries, grid_size: int = 4096) -> tuple[bool, float]:
    """Check ``|a_0| >= 2 |a_n|`` for all stored n != 0 of a positive function.

    Returns (all hold, worst ratio ``min_n |a_0| / (2 |a_n|)``); the ratio is
    ``inf`` when no nonzero higher harmonic exists.  Raises
    :class:`NotPositiveError` when the grid minimum of ``phi`` is <= 0.
    """
    xs = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    if float(np.min(phi.eval(xs))) <= 0.0:
        raise NotPositiveError("function is not positive on the evaluation grid")
    a0 = abs(phi.coeff(0))
    worst = float("inf")
    for n in range(1, phi.band_limit + 1):
        an = abs(phi.coeff(n))
        if an > 0.0:
            worst = min(worst, a0 / (2.0 * an))
    return worst >= 1.0, worst


def hurwitz_step(phi: FourierSeries, x1: float, x2: float) -> FourierSeries:
    """Multiply by ``sin((x-x1)/2) sin((x-x2)/2)`` via the coefficient rule.

    The product removes a conjugate pair of sign changes when x1, x2 are
    transversal zeros of ``phi``; the band limit grows by one.
    """
    if abs((x1 - x2) % TWO_PI) < 1e-12 or abs((x1 - x2) % TWO_PI - TWO_PI) < 1e-12:
        raise ValueError("nodes x1 and x2 must be distinct mod 2pi")
    s = 0.5 * (x1 + x2)
    cos_half = np.cos(0.5 * (x1 - x2))
    m = phi.band_limit + 1
    out = np.zeros(2 * m + 1, dtype=complex)
    for k in range(-m, m + 1):
        out[k + m] = (-0.25 * np.exp(-1j * s) * phi.coeff(k - 1)
                      + 0.5 * cos_half * phi.coeff(k)
                      - 0.25 * np.exp(1j * s) * phi.coeff(k + 1))
    return FourierSeries(out)
