"""Circle-map families x -> x + 2 pi r + a f(x): iteration, rotation
numbers, periodic-orbit search and classification, attractor censuses,
the first-order attractor count from the resampled series, and the
small-amplitude cyclicity probe.

Lift coordinates are used internally everywhere; angles appear only at
the API boundary, normalised to [0, 2pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOLERANCES
from .fourier import TWO_PI, FourierSeries
from .parallel import pmap


class CircleMapFamily:
    """The lift L(x) = x + 2 pi r + a f(x) of a circle diffeomorphism.

    ``r`` is the rotation offset in full turns; construction rejects
    parameters with ``|a| sup|f'| >= 1``, for which L is not strictly
    increasing.
    """

    def __init__(self, f: FourierSeries, r: float, a: float):
        self.f = f
        self.r = float(r)
        self.a = float(a)
        self._df = f.derivative()
        self.sup_f = f.sup_norm()
        self.sup_df = self._df.sup_norm()
        if abs(self.a) * self.sup_df >= 1.0:
            raise ValueError(
                f"|a| sup|f'| = {abs(self.a) * self.sup_df:.6g} >= 1: not a diffeomorphism")

    def lift(self, x):
        return x + TWO_PI * self.r + self.a * self.f.eval(x)

    def lift_deriv(self, x):
        return 1.0 + self.a * self._df.eval(x)

    def iterate(self, x, n: int):
        """n-fold lift composition (exact, not the first-order truncation)."""
        if n < 0:
            raise ValueError("n must be non-negative")
        y = x
        for _ in range(n):
            y = self.lift(y)
        return y

    def __repr__(self):
        return f"CircleMapFamily(r={self.r}, a={self.a}, f={self.f!r})"


def iterate(family: CircleMapFamily, x, n: int):
    return family.iterate(x, n)


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    error_bar: float
    converged: bool
    estimates: tuple[float, float]


def rotation_number(family: CircleMapFamily, n_iter: int = 100_000,
                    burn_in: int = 1_000, x0: float = 0.0) -> RotationEstimate:
    """Birkhoff average of the lift advance over 2 pi.

    For a circle homeomorphism the n-step average is within 1/n of the
    limit, which provides the error bar; the run is flagged non-converged
    when the n and 2n estimates disagree beyond ten error bars.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be positive")
    x = family.iterate(x0, burn_in)
    y1 = family.iterate(x, n_iter)
    rho1 = (y1 - x) / (TWO_PI * n_iter)
    y2 = family.iterate(y1, n_iter)
    rho2 = (y2 - x) / (TWO_PI * 2 * n_iter)
    err = 1.0 / n_iter
    converged = abs(rho1 - rho2) <= 10.0 * err
    return RotationEstimate(rho2, 0.5 * err, converged, (rho1, rho2))


# -- periodic orbits ------------------------------------------------------


@dataclass
class OrbitRecord:
    """One isolated periodic trajectory of the lift."""

    base_point: float
    period: int
    winding: int
    points: list[float]
    multiplier: float

    def to_json_dict(self) -> dict:
        return {
            "base_point": self.base_point,
            "period": self.period,
            "winding": self.winding,
            "points": list(self.points),
            "multiplier": self.multiplier,
        }


@dataclass
class OrbitSearch:
    orbits: list[OrbitRecord]
    non_isolated: bool
    unresolved: int
    grid_size: int

    @property
    def flags(self) -> list[str]:
        out = []
        if self.non_isolated:
            out.append("non-isolated")
        if self.unresolved:
            out.append("unresolved root")
        return out


def scan_sign_brackets(g_values: np.ndarray, non_isolated_tol: float) -> tuple[list[tuple[float, float]], bool]:
    """Brackets of sign changes of periodic samples on [0, 2pi).

    Returns ``(brackets, non_isolated)`` where the flag marks a degenerate
    scan (|G| below tolerance on more than half the grid).
    """
    n = g_values.size
    if float(np.mean(np.abs(g_values) < non_isolated_tol)) > 0.5:
        return [], True
    xs = np.linspace(0.0, TWO_PI, n, endpoint=False)
    s = np.sign(g_values)
    s[s == 0] = 1.0
    nxt = np.roll(s, -1)
    idx = np.nonzero(s != nxt)[0]
    step = TWO_PI / n
    return [(float(xs[i]), float(xs[i] + step)) for i in idx], False


def polish_roots(g_fn, g_deriv_fn, brackets, residual_tol: float) -> tuple[np.ndarray, int]:
    """Bisection plus a short Newton polish on every bracket (vectorised).

    A bracket endpoint already at |G| <= residual_tol is taken as the root
    (sign scans put exact grid-point zeros at bracket ends).  Returns the
    roots and the number left with |G| above the non-isolated tolerance.
    """
    if not brackets:
        return np.empty(0), 0
    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    flo = np.asarray(g_fn(lo), dtype=float)
    fhi = np.asarray(g_fn(hi), dtype=float)
    done = np.abs(flo) <= residual_tol
    done_at_hi = (~done) & (np.abs(fhi) <= residual_tol)
    x_done = np.where(done_at_hi, hi, lo)
    done |= done_at_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = np.asarray(g_fn(mid), dtype=float)
        same = (fm > 0) == (flo > 0)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    x = np.where(done, x_done, 0.5 * (lo + hi))
    if g_deriv_fn is not None:
        for _ in range(4):
            gv = np.asarray(g_fn(x), dtype=float)
            dv = np.asarray(g_deriv_fn(x), dtype=float)
            step = np.where(np.abs(dv) > 1e-14, gv / np.where(dv == 0, 1.0, dv), 0.0)
            x = np.where(done, x, np.clip(x - step, lo, hi))
    resid = np.abs(np.asarray(g_fn(x), dtype=float))
    unresolved = int(np.sum(resid > max(residual_tol, TOLERANCES["non-isolated"])))
    return x, unresolved


def assemble_orbits(step_lift, step_deriv, roots: np.ndarray, p: int, q: int,
                    dedup_tol: float) -> list[OrbitRecord]:
    """Group q-translate roots into trajectories and attach multipliers.

    ``step_lift`` is one application of the lift (vectorised over arrays);
    ``step_deriv`` its derivative.  Two roots on one trajectory yield a
    single record.
    """
    if roots.size == 0:
        return []
    angles = np.sort(np.mod(roots, TWO_PI))
    claimed = np.zeros(angles.size, dtype=bool)
    records = []
    for i in range(angles.size):
        if claimed[i]:
            continue
        pts = [float(angles[i])]
        y = float(angles[i])
        for _ in range(q - 1):
            y = float(np.asarray(step_lift(np.array([y])))[0])
            pts.append(y % TWO_PI)
        for j in range(i, angles.size):
            if claimed[j]:
                continue
            d = np.abs(np.asarray(pts) - angles[j])
            if np.min(np.minimum(d, TWO_PI - d)) < dedup_tol:
                claimed[j] = True
        derivs = np.asarray(step_deriv(np.asarray(pts)))
        records.append(OrbitRecord(pts[0], q, p, pts, float(np.prod(derivs))))
    return records


def periodic_orbits(family: CircleMapFamily, p: int, q: int,
                    residual_tol: float | None = None) -> OrbitSearch:
    """All isolated period-q, winding-p trajectories.

    Roots of G(x) = L^q(x) - x - 2 pi p are located by a sign scan on a
    grid of at least 64 points per harmonic of the q-th iterate, then
    polished below the residual tolerance and deduplicated into
    trajectories.  A degenerate G (more than half the grid below 1e-9)
    sets the non-isolated flag instead of returning orbits.
    """
    q = int(q)
    if q < 1:
        raise ValueError("q must be a positive integer")
    if math.gcd(abs(int(p)), q) != 1:
        raise ValueError(f"p/q = {p}/{q} is not a reduced fraction")
    if residual_tol is None:
        residual_tol = TOLERANCES["orbit-residual"]
    grid = max(4096, 64 * q * max(family.f.band_limit, 1))
    xs = np.linspace(0.0, TWO_PI, grid, endpoint=False)

    def g_fn(x):
        return family.iterate(x, q) - x - TWO_PI * p

    def g_deriv(x):
        d = np.ones_like(np.asarray(x, dtype=float))
        y = x
        for _ in range(q):
            d = d * family.lift_deriv(y)
            y = family.lift(y)
        return d - 1.0

    brackets, degenerate = scan_sign_brackets(np.asarray(g_fn(xs)), TOLERANCES["non-isolated"])
    if degenerate:
        return OrbitSearch([], True, 0, grid)
    roots, unresolved = polish_roots(g_fn, g_deriv, brackets, residual_tol)
    records = assemble_orbits(family.lift, family.lift_deriv, roots, p, q, TOLERANCES["dedup"])
    return OrbitSearch(records, False, unresolved, grid)


# -- first-order attractor prediction -------------------------------------


@dataclass(frozen=True)
class PredictedAttractors:
    count: int
    level: float | None
    degenerate: bool


def predicted_attractors(f: FourierSeries, q: int, levels: int = 1024) -> PredictedAttractors:
    """Max over levels R of negative-slope roots of the q-resampled series,
    divided by q.

    The resampled series is 2pi/q-periodic, so its transversal roots come
    in q-translates and the quotient counts trajectories.  A vanishing
    resampled series returns the degenerate flag (first-order theory is
    silent there).
    """
    g = f.resample(int(q))
    scale = max(1.0, max((abs(c) for c in f.coefficients().values()), default=0.0))
    if g.is_zero(tol=TOLERANCES["degenerate-series"] * scale):
        return PredictedAttractors(0, None, True)
    grid = max(4096, 64 * max(g.band_limit, 1))
    xs = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    v = g.eval(xs)
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < TOLERANCES["degenerate-series"] * scale:
        return PredictedAttractors(0, None, False)

    v_next = np.roll(v, -1)

    def down_crossings(level: float) -> int:
        # transversal roots with negative slope = downward grid crossings
        return int(np.sum((v > level) & (v_next <= level)))

    levels_arr = np.linspace(lo, hi, levels + 2)[1:-1]
    counts = np.array([down_crossings(r) for r in levels_arr])
    refine_levels = []
    for i in np.nonzero(np.diff(counts) != 0)[0]:
        refine_levels.append(np.linspace(levels_arr[i], levels_arr[i + 1], 66)[1:-1])
    if refine_levels:
        extra = np.concatenate(refine_levels)
        levels_arr = np.concatenate([levels_arr, extra])
        counts = np.concatenate([counts, [down_crossings(r) for r in extra]])
    best_count = 0
    best_level = None
    for r, c in zip(levels_arr, counts):
        if c % q == 0 and c > best_count:
            best_count, best_level = int(c), float(r)
    return PredictedAttractors(best_count // q, best_level, False)


# -- censuses ---------------------------------------------------------------


@dataclass
class CensusEntry:
    attracting: list[OrbitRecord] = field(default_factory=list)
    repelling: list[OrbitRecord] = field(default_factory=list)
    undecided: list[OrbitRecord] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)


def classify_orbits(records: list[OrbitRecord], flags: list[str],
                    band: float | None = None) -> CensusEntry:
    """Split orbit records by multiplier with an undecided band around 1."""
    if band is None:
        band = TOLERANCES["attract-band"]
    entry = CensusEntry(flags=list(flags))
    for rec in records:
        m = abs(rec.multiplier)
        if m < 1.0 - band:
            entry.attracting.append(rec)
        elif m > 1.0 + band:
            entry.repelling.append(rec)
        else:
            entry.undecided.append(rec)
    return entry


@dataclass
class AttractorCensus:
    """Orbit counts keyed by reduced rotation number p/q."""

    entries: dict[tuple[int, int], CensusEntry]
    q_max: int
    r: float
    a: float

    @property
    def total_attracting(self) -> int:
        return sum(len(e.attracting) for e in self.entries.values())

    @property
    def flags(self) -> list[str]:
        out = []
        for (p, q), e in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            out.extend(f"{p}/{q}: {fl}" for fl in e.flags)
        return out

    def to_json_dict(self, include_orbits: bool = True) -> dict:
        keys = []
        for (p, q) in sorted(self.entries, key=lambda k: (k[1], k[0])):
            e = self.entries[(p, q)]
            item = {
                "key": f"{p}/{q}",
                "attracting": len(e.attracting),
                "repelling": len(e.repelling),
                "undecided": len(e.undecided),
                "flags": list(e.flags),
            }
            if include_orbits:
                item["orbits"] = [rec.to_json_dict()
                                  for group in (e.attracting, e.repelling, e.undecided)
                                  for rec in group]
            keys.append(item)
        return {"q_max": self.q_max, "r": self.r, "a": self.a,
                "total_attracting": self.total_attracting, "keys": keys}


def census_keys(r: float, q_max: int, bound: float) -> list[tuple[int, int]]:
    """Reduced fractions p/q, q <= q_max, within the localisation bound
    |r - p/q| <= bound plus one p-unit of slack."""
    keys = []
    for q in range(1, q_max + 1):
        lo = math.ceil(q * (r - bound) - 1.0)
        hi = math.floor(q * (r + bound) + 1.0)
        for p in range(lo, hi + 1):
            if math.gcd(abs(p), q) == 1:
                keys.append((p, q))
    return keys


def attractor_census(family: CircleMapFamily, q_max: int, workers: int = 1) -> AttractorCensus:
    """Periodic-orbit census over all localisation-admissible p/q, q <= q_max."""
    q_max = int(q_max)
    if not 1 <= q_max <= 64:
        raise ValueError("q_max must be between 1 and 64")
    bound = abs(family.a) / TWO_PI * family.sup_f
    keys = census_keys(family.r, q_max, bound)
    tasks = [(family, p, q) for p, q in keys]
    results = pmap(_census_key_worker, tasks, workers=workers)
    entries = {}
    for (p, q), entry in zip(keys, results):
        if entry.attracting or entry.repelling or entry.undecided or entry.flags:
            entries[(p, q)] = entry
    return AttractorCensus(entries, q_max, family.r, family.a)


def _census_key_worker(task) -> CensusEntry:
    family, p, q = task
    search = periodic_orbits(family, p, q)
    return classify_orbits(search.orbits, search.flags)


# -- cyclicity probe ---------------------------------------------------------


@dataclass
class ProbeStage:
    a: float
    max_attracting: int
    best_r: float
    counts: list[int]
    r_grid: list[float]


@dataclass
class ProbeReport:
    p: int
    q: int
    stages: list[ProbeStage]
    stabilized: bool
    estimate: int | None

    def rows(self) -> list[tuple[float, float, int]]:
        """(r, a, count) triples for sweep tables and plots."""
        out = []
        for st in self.stages:
            out.extend((r, st.a, c) for r, c in zip(st.r_grid, st.counts))
        return out

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "stabilized": self.stabilized,
            "estimate": self.estimate,
            "stages": [{"a": st.a, "max_attracting": st.max_attracting, "best_r": st.best_r}
                       for st in self.stages],
        }


def _probe_point_worker(task) -> int:
    f, p, q, r, a = task
    family = CircleMapFamily(f, r, a)
    search = periodic_orbits(family, p, q)
    if search.non_isolated:
        return 0
    entry = classify_orbits(search.orbits, [])
    return len(entry.attracting)


def cyclicity_probe(f: FourierSeries, p: int, q: int, a_schedule,
                    r_points: int = 257, workers: int = 1) -> ProbeReport:
    """Estimate how many attractors of rotation number p/q are born as a -> 0.

    For each amplitude in the (decreasing) schedule the rotation offset is
    swept over ``r_points`` values centred at ``p/q - a f_0 / 2 pi`` with
    half-width ``(a/pi) sup|f|``, and the largest attracting count at that
    key is recorded.  The estimate is the count shared by the last two
    stages; otherwise the probe reports "not stabilized".
    """
    schedule = [float(a) for a in a_schedule]
    if len(schedule) < 3:
        raise ValueError("a_schedule needs at least 3 entries")
    if any(a <= 0 for a in schedule) or any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("a_schedule must be decreasing and positive")
    f0 = f.coeff(0).real
    sup = f.sup_norm()
    stages = []
    for a in schedule:
        center = p / q - a * f0 / TWO_PI
        half = a / np.pi * sup
        rs = np.linspace(center - half, center + half, r_points)
        counts = pmap(_probe_point_worker, [(f, p, q, float(r), a) for r in rs], workers=workers)
        best = int(np.max(counts))
        best_r = float(rs[int(np.argmax(counts))])
        stages.append(ProbeStage(a, best, best_r, [int(c) for c in counts], [float(r) for r in rs]))
    stabilized = stages[-1].max_attracting == stages[-2].max_attracting
    estimate = stages[-1].max_attracting if stabilized else None
    return ProbeReport(int(p), int(q), stages, stabilized, estimate)
