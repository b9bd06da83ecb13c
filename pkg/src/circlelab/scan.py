"""Cyclic sign-change scanning with local refinement near zeros."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOLERANCES

TWO_PI = 2.0 * np.pi


@dataclass
class CrossingScan:
    """Outcome of a cyclic sign scan on [0, 2pi).

    ``count`` strict sign alternations (even by periodicity); ``brackets``
    one (lo, hi) interval per crossing with hi possibly past 2pi at the
    wrap; ``unresolved`` windows where refinement left every sample below
    the near-zero threshold.
    """

    count: int
    brackets: list[tuple[float, float]] = field(default_factory=list)
    unresolved: list[tuple[float, float]] = field(default_factory=list)


def cyclic_crossings(fn, grid_size: int, near_zero: float | None = None,
                     refine_factor: int = 16) -> CrossingScan:
    """Scan ``fn`` on a uniform cyclic grid, refining near-zero samples.

    ``fn`` must accept numpy arrays of angles.  Grid points with
    ``|value| < near_zero`` are re-sampled ``refine_factor`` times more
    densely over the two adjacent cells before signs are decided.
    """
    if near_zero is None:
        near_zero = TOLERANCES["near-zero"]
    grid_size = int(grid_size)
    xs = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    vals = np.asarray(fn(xs), dtype=float)
    step = TWO_PI / grid_size
    near = np.abs(vals) < near_zero
    if near.all():
        return CrossingScan(0, [], [(0.0, TWO_PI)])
    keep_x: list[np.ndarray] = [xs[~near]]
    keep_v: list[np.ndarray] = [vals[~near]]
    unresolved: list[tuple[float, float]] = []
    for i in np.nonzero(near)[0]:
        sub = np.linspace(xs[i] - step, xs[i] + step, 2 * refine_factor + 1)
        sv = np.asarray(fn(sub), dtype=float)
        mask = np.abs(sv) >= near_zero
        if not mask.any():
            unresolved.append((float(xs[i] - step), float(xs[i] + step)))
            continue
        keep_x.append(np.mod(sub[mask], TWO_PI))
        keep_v.append(sv[mask])
    x = np.concatenate(keep_x)
    v = np.concatenate(keep_v)
    order = np.argsort(x, kind="stable")
    x, v = x[order], v[order]
    s = np.sign(v)
    nxt = np.roll(s, -1)
    flips = s != nxt
    count = int(flips.sum())
    brackets = []
    for i in np.nonzero(flips)[0]:
        lo = float(x[i])
        hi = float(x[(i + 1) % x.size]) if i + 1 < x.size else float(x[0]) + TWO_PI
        brackets.append((lo, hi))
    return CrossingScan(count, brackets, unresolved)


def bisect_root(fn, lo: float, hi: float, iters: int = 60) -> float:
    """Bisection on a scalar sign change; fn takes arrays."""
    flo = float(np.asarray(fn(np.array([lo])))[0])
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = float(np.asarray(fn(np.array([mid])))[0])
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
