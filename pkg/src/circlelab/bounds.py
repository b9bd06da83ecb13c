"""Root-count bounds for analytic perturbations of pure harmonics.

Real root counting by sign scan, strip root counting by the argument
principle on a periodic rectangle, the cosh margin under which
``r + cos(nx + phase) + g`` keeps at most 2n real roots, the coefficient
test separating single-attractor tails from the rest, and the
ellipse-to-segment distance that underlies the margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOLERANCES
from .fourier import TWO_PI, FourierSeries
from .scan import bisect_root, cyclic_crossings


class RootOnContourError(RuntimeError):
    """A zero sits (numerically) on the integration contour."""


class QuadratureUnresolvedError(RuntimeError):
    """The contour integral did not settle on an integer."""


def cosh_margin(n: int, delta: float) -> float:
    """(cosh(n delta) - 1) / 2 : the strip-norm budget for 2n-root counting."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if delta <= 0:
        raise ValueError("delta must be positive")
    return (np.cosh(n * delta) - 1.0) / 2.0


@dataclass
class RootScan:
    """Transversal real solutions of g(x) = level on [0, 2pi)."""

    count: int
    tangency: bool
    roots: list[float] = field(default_factory=list)


def real_root_count(g: FourierSeries, level: float, grid_size: int | None = None) -> RootScan:
    """Count sign changes of ``g - level`` (even); flag near-tangencies.

    ``tangency`` is set when refinement finds ``|g - level| < 1e-10`` without
    an accompanying sign change.
    """
    if grid_size is None:
        grid_size = max(4096, 64 * max(g.band_limit, 1))
    fn = lambda x: g.eval(x) - level
    scan = cyclic_crossings(fn, grid_size, near_zero=TOLERANCES["near-zero"])
    roots = [bisect_root(fn, lo, hi) % TWO_PI for lo, hi in scan.brackets]
    return RootScan(scan.count, bool(scan.unresolved), sorted(roots))


@dataclass
class StripCount:
    count: int
    residual: float
    nodes: int
    min_modulus: float


def strip_root_count_report(g: FourierSeries, level: float, delta: float,
                            nodes: int = 4096, max_nodes: int = 65536) -> StripCount:
    """Argument-principle zero count of ``g - level`` on |Im z| < delta.

    The vertical rectangle sides cancel by periodicity, so only the two
    horizontal lines are integrated (trapezoid; spectrally accurate for the
    periodic integrand).  Node count doubles until the integral sits within
    the snap tolerance of an integer.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    dg = g.derivative()
    snap_tol = TOLERANCES["snap-residual"]
    contour_tol = TOLERANCES["root-on-contour"]
    result = None
    while True:
        xs = np.linspace(0.0, TWO_PI, nodes, endpoint=False)
        top = g.eval_line(xs, delta) - level
        bot = g.eval_line(xs, -delta) - level
        min_mod = float(min(np.min(np.abs(top)), np.min(np.abs(bot))))
        if min_mod < contour_tol:
            raise RootOnContourError(
                f"modulus {min_mod:.3e} on the contour (threshold {contour_tol:.0e})")
        winding = (np.mean(dg.eval_line(xs, -delta) / bot)
                   - np.mean(dg.eval_line(xs, delta) / top)) / 1j
        count = int(round(winding.real))
        residual = float(abs(winding - count))
        result = StripCount(count, residual, nodes, min_mod)
        if residual < snap_tol and count >= 0:
            return result
        if nodes >= max_nodes:
            raise QuadratureUnresolvedError(
                f"residual {residual:.3e} at {nodes} nodes (need < {snap_tol:.0e})")
        nodes *= 2


def strip_root_count(g: FourierSeries, level: float, delta: float) -> int:
    return strip_root_count_report(g, level, delta).count


@dataclass
class LemmaReport:
    """Max real-root count of r + a cos(nx) + b sin(nx) + g over an r sweep."""

    n: int
    delta: float
    bound: int
    margin: float
    strip_norm: float
    margin_exceeded: bool
    max_roots: int = 0
    r_at_max: float | None = None
    violations: list[float] = field(default_factory=list)
    tangency_rs: list[float] = field(default_factory=list)
    r_values: list[float] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "bound": self.bound,
            "margin": self.margin,
            "strip_norm": self.strip_norm,
            "margin_exceeded": self.margin_exceeded,
            "max_roots": self.max_roots,
            "r_at_max": self.r_at_max,
            "violations": list(self.violations),
            "tangency_rs": list(self.tangency_rs),
        }


def cos_lemma_check(n: int, delta: float, g: FourierSeries, r_values,
                    phase: tuple[float, float] = (1.0, 0.0)) -> LemmaReport:
    """Sweep r and record the largest real-root count against the 2n bound.

    The margin precondition ``strip_norm(g, delta) < cosh_margin(n, delta)``
    is reported, not asserted: a violating input yields ``margin_exceeded``.
    """
    a, b = phase
    if abs(a * a + b * b - 1.0) > 1e-9:
        raise ValueError("phase (a, b) must satisfy a^2 + b^2 = 1")
    margin = cosh_margin(n, delta)
    sn = g.strip_norm(delta)
    report = LemmaReport(n=n, delta=delta, bound=2 * n, margin=margin,
                         strip_norm=sn, margin_exceeded=sn >= margin)
    if report.margin_exceeded:
        return report
    h = FourierSeries.cos(n, a) + FourierSeries.sin(n, b) + g
    for r in r_values:
        scan = real_root_count(h, -float(r))
        report.r_values.append(float(r))
        report.counts.append(scan.count)
        if scan.tangency:
            report.tangency_rs.append(float(r))
        if scan.count > report.max_roots:
            report.max_roots = scan.count
            report.r_at_max = float(r)
        if scan.count > report.bound:
            report.violations.append(float(r))
    return report


def essential_bound_test(f: FourierSeries, g: FourierSeries, N: int,
                         delta: float) -> tuple[bool, float, float]:
    """Compare |g_N - f_N| against the weighted strip norm of the kN tail.

    Returns ``(lhs <= rhs, lhs, rhs)`` with ``rhs = 2/(cosh(N delta/6)-1)``
    times the strip norm at delta/6 of the harmonics kN, |k| >= 2.  A True
    result means the coefficient pattern is compatible with two attractors
    of period N; False certifies the single-attractor structure at N.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    lhs = abs(g.coeff(N) - f.coeff(N))
    band = max(f.band_limit, g.band_limit)
    tail: dict[int, complex] = {}
    k = 2
    while k * N <= band:
        diff = g.coeff(k * N) - f.coeff(k * N)
        if diff != 0:
            tail[k * N] = diff
            tail[-k * N] = np.conj(diff)
        k += 1
    if not tail:
        return lhs <= 0.0, lhs, 0.0
    tail_series = FourierSeries(tail)
    rhs = 2.0 / (np.cosh(N * delta / 6.0) - 1.0) * tail_series.strip_norm(delta / 6.0)
    return lhs <= rhs, lhs, float(rhs)


def ellipse_segment_distance(n: int, delta: float) -> float:
    """Distance between the image ellipse of cos(n z) on Im z = delta and
    the real segment of half-length (cosh(n delta) + 1)/2.

    Computed by nested golden-section minimisation; equals
    ``cosh_margin(n, delta)`` (regression for the geometric claim).
    """
    if n < 1 or delta <= 0:
        raise ValueError("need n >= 1 and delta > 0")
    c = n * delta
    big, small = np.cosh(c), np.sinh(c)
    half = (big + 1.0) / 2.0

    def seg_dist(theta: float) -> float:
        px, py = big * np.cos(theta), small * np.sin(theta)
        return _golden_min(lambda s: np.hypot(px - s, py), -half, half)

    thetas = np.linspace(0.0, np.pi, 721)
    coarse = [seg_dist(t) for t in thetas]
    i = int(np.argmin(coarse))
    lo = thetas[max(i - 1, 0)]
    hi = thetas[min(i + 1, len(thetas) - 1)]
    return _golden_min(seg_dist, lo, hi)


def _golden_min(fn, lo: float, hi: float, iters: int = 80) -> float:
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return min(fc, fd)
