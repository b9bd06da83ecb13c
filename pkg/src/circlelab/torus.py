"""Perturbed constant vector fields on the torus and their reduction to
circle maps through the section x1 = 0.

The oscillatory kernel psi converts 2D Fourier data of the perturbation
into the Fourier data of the first-order return map; a fixed-step RK4
integrator with bisection event location provides the exact numeric
return map for cross-checks and censuses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .config import TOLERANCES
from .dynamics import (AttractorCensus, CensusEntry, assemble_orbits, census_keys,
                       classify_orbits, polish_roots, scan_sign_brackets)
from .fourier import TWO_PI, FourierSeries

_HERMITIAN_TOL = 1e-12


class TransversalityError(RuntimeError):
    """The flow stopped crossing the section transversally."""


class HarmonicField2D:
    """Real function on the torus given by harmonics exp(i(m x1 + n x2)).

    Coefficients satisfy c[-m,-n] == conj(c[m,n]); construction symmetrises
    and validates.
    """

    def __init__(self, coeffs: Mapping[tuple[int, int], complex] | None = None):
        full: dict[tuple[int, int], complex] = {}
        scale = 1.0
        for (m, n), c in (coeffs or {}).items():
            full[(int(m), int(n))] = full.get((int(m), int(n)), 0.0) + complex(c)
            scale = max(scale, abs(c))
        sym: dict[tuple[int, int], complex] = {}
        for (m, n), c in full.items():
            partner = np.conj(full.get((-m, -n), 0.0))
            if abs(c - partner) > _HERMITIAN_TOL * scale and (-m, -n) in full:
                raise ValueError(f"coefficients at ({m},{n}) / ({-m},{-n}) are not conjugate")
            sym[(m, n)] = 0.5 * (c + partner) if (-m, -n) in full else c
            sym[(-m, -n)] = np.conj(sym[(m, n)])
        items = sorted((mn, c) for mn, c in sym.items() if c != 0)
        self._ms = np.array([mn[0] for mn, _ in items], dtype=float)
        self._ns = np.array([mn[1] for mn, _ in items], dtype=float)
        self._cs = np.array([c for _, c in items], dtype=complex)
        self.band_limit = int(max((max(abs(m), abs(n)) for (m, n), _ in items), default=0))

    @classmethod
    def zero(cls) -> "HarmonicField2D":
        return cls({})

    @property
    def is_zero(self) -> bool:
        return self._cs.size == 0

    def coeff(self, m: int, n: int) -> complex:
        hits = np.nonzero((self._ms == m) & (self._ns == n))[0]
        return complex(self._cs[hits[0]]) if hits.size else 0.0 + 0.0j

    def coefficients(self) -> dict[tuple[int, int], complex]:
        return {(int(m), int(n)): complex(c)
                for m, n, c in zip(self._ms, self._ns, self._cs)}

    def eval(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for m, n, c in zip(self._ms, self._ns, self._cs):
            out += c * np.exp(1j * (m * x1 + n * x2))
        return out.real

    def sup_norm_grid(self, n: int = 256) -> float:
        if self.is_zero:
            return 0.0
        xs = np.linspace(0.0, TWO_PI, n, endpoint=False)
        g1, g2 = np.meshgrid(xs, xs, indexing="ij")
        return float(np.max(np.abs(self.eval(g1, g2))))

    def to_json_list(self) -> list[dict]:
        out = []
        for m, n, c in zip(self._ms, self._ns, self._cs):
            if n > 0 or (n == 0 and m >= 0):
                out.append({"m": int(m), "n": int(n), "re": c.real, "im": c.imag})
        return out

    @classmethod
    def from_json_list(cls, entries) -> "HarmonicField2D":
        seen = set()
        coeffs: dict[tuple[int, int], complex] = {}
        for e in entries:
            m, n = int(e["m"]), int(e["n"])
            if (m, n) in seen:
                raise ValueError(f"duplicate harmonic ({m},{n})")
            seen.add((m, n))
            coeffs[(m, n)] = complex(float(e["re"]), float(e.get("im", 0.0)))
        return cls(coeffs)


@dataclass(frozen=True)
class TorusField:
    """(cos a, sin a) + a_amp (v1, v2) with direction angle alpha.

    The section x1 = 0 requires cos(alpha) != 0 and amplitude small enough
    that x1 stays monotone along the flow: |a| sup|v1| < |cos alpha| / 2.
    """

    v1: HarmonicField2D
    v2: HarmonicField2D
    alpha: float
    a: float

    def __post_init__(self):
        ca = math.cos(self.alpha)
        if abs(ca) < 1e-9:
            raise ValueError("cos(alpha) = 0: swap the axes instead")
        if abs(self.a) * self.v1.sup_norm_grid() >= abs(ca) / 2.0:
            raise ValueError("amplitude too large for a transversal section x1 = 0")

    def with_amplitude(self, a: float) -> "TorusField":
        return replace(self, a=float(a))

    def to_json_dict(self) -> dict:
        return {"v1": self.v1.to_json_list(), "v2": self.v2.to_json_list(),
                "alpha": self.alpha, "a": self.a}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "TorusField":
        return cls(HarmonicField2D.from_json_list(data.get("v1", [])),
                   HarmonicField2D.from_json_list(data.get("v2", [])),
                   float(data["alpha"]), float(data["a"]))


def psi(m: int, n: int, alpha: float, resonance_tol: float | None = None) -> complex:
    """Oscillatory integral of exp(i (m cos a + n sin a) t) over one section
    return time 2 pi / cos a.

    The resonant branch 2 pi / cos a is taken when |m cos a + n sin a| falls
    below the resonance tolerance; the two branches are genuinely distinct
    limits, so sweeps keep a guard band away from resonances.
    """
    if resonance_tol is None:
        resonance_tol = TOLERANCES["resonance"]
    ca = math.cos(alpha)
    if abs(ca) < 1e-15:
        raise ValueError("cos(alpha) = 0")
    s = m * ca + n * math.sin(alpha)
    if abs(s) < resonance_tol:
        return complex(TWO_PI / ca, 0.0)
    return -1j * (np.exp(2j * np.pi * n * math.tan(alpha)) - 1.0) / s


def reduced_series(V: TorusField) -> FourierSeries:
    """First-order return-map perturbation f with
    f_n = sum_m (-tan(a) v1[m,n] + v2[m,n]) psi(m, n, a)."""
    ta = math.tan(V.alpha)
    per_n: dict[int, complex] = {}
    keys = set(V.v1.coefficients()) | set(V.v2.coefficients())
    for (m, n) in keys:
        c = -ta * V.v1.coeff(m, n) + V.v2.coeff(m, n)
        if c != 0:
            per_n[n] = per_n.get(n, 0.0) + c * psi(m, n, V.alpha)
    return FourierSeries({n: c for n, c in per_n.items()})


def reduced_series_quadrature(V: TorusField, nodes: int = 20001) -> FourierSeries:
    """The same coefficients through the single-variable quadrature route
    (partial Fourier transform in x2, Simpson in the flow time)."""
    from scipy.integrate import simpson

    ca, sa, ta = math.cos(V.alpha), math.sin(V.alpha), math.tan(V.alpha)
    T = TWO_PI / ca
    taus = np.linspace(0.0, T, nodes)
    band = max(V.v1.band_limit, V.v2.band_limit)
    coeffs: dict[int, complex] = {}
    v1c = V.v1.coefficients()
    v2c = V.v2.coefficients()
    for n in range(0, band + 1):
        breve1 = np.zeros(nodes, dtype=complex)
        breve2 = np.zeros(nodes, dtype=complex)
        for (m, nn), c in v1c.items():
            if nn == n:
                breve1 += c * np.exp(1j * m * ca * taus)
        for (m, nn), c in v2c.items():
            if nn == n:
                breve2 += c * np.exp(1j * m * ca * taus)
        integrand = (-ta * breve1 + breve2) * np.exp(1j * n * sa * taus)
        val = simpson(integrand, x=taus)
        if abs(val) > 1e-15:
            coeffs[n] = val
            coeffs[-n] = np.conj(val)
    if 0 in coeffs:
        coeffs[0] = complex(coeffs[0].real, 0.0)
    return FourierSeries(coeffs)


# -- numeric flow --------------------------------------------------------------


def _rhs(V: TorusField, x1, x2):
    u1 = math.cos(V.alpha) + V.a * V.v1.eval(x1, x2)
    u2 = math.sin(V.alpha) + V.a * V.v2.eval(x1, x2)
    return u1, u2


def _rk4_step(V: TorusField, x1, x2, h):
    k1a, k1b = _rhs(V, x1, x2)
    k2a, k2b = _rhs(V, x1 + 0.5 * h * k1a, x2 + 0.5 * h * k1b)
    k3a, k3b = _rhs(V, x1 + 0.5 * h * k2a, x2 + 0.5 * h * k2b)
    k4a, k4b = _rhs(V, x1 + h * k3a, x2 + h * k3b)
    return (x1 + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a),
            x2 + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b))


def section_return_lift(V: TorusField, x2_start, steps_per_crossing: int = 2048) -> np.ndarray:
    """Lift values of the next-section x2 for an array of section points.

    Fixed-step RK4 from (0, x2) until x1 reaches +-2 pi, then bisection on
    the partial step down to the event-time tolerance.
    """
    x2_start = np.atleast_1d(np.asarray(x2_start, dtype=float))
    ca = math.cos(V.alpha)
    sgn = 1.0 if ca > 0 else -1.0
    target = sgn * TWO_PI
    h = (TWO_PI / abs(ca)) / steps_per_crossing
    x1 = np.zeros_like(x2_start)
    x2 = x2_start.copy()
    crossed = np.zeros(x2.shape, dtype=bool)
    saved1 = np.zeros_like(x1)
    saved2 = np.zeros_like(x2)
    max_steps = 2 * steps_per_crossing + 4
    for _ in range(max_steps):
        u1, _ = _rhs(V, x1, x2)
        if np.any(sgn * np.asarray(u1) <= 0):
            raise TransversalityError("x1 velocity changed sign mid-flight")
        n1, n2 = _rk4_step(V, x1, x2, h)
        newly = (~crossed) & (sgn * (n1 - target) >= 0)
        saved1[newly] = x1[newly]
        saved2[newly] = x2[newly]
        crossed |= newly
        x1, x2 = n1, n2
        if crossed.all():
            break
    if not crossed.all():
        raise TransversalityError("some trajectories failed to reach the section")
    lo = np.zeros_like(saved1)
    hi = np.full_like(saved1, h)
    # 52 halvings take the crossing-time bracket below the event tolerance
    for _ in range(52):
        mid = 0.5 * (lo + hi)
        m1, _ = _rk4_step(V, saved1, saved2, mid)
        past = sgn * (m1 - target) >= 0
        hi = np.where(past, mid, hi)
        lo = np.where(past, lo, mid)
    _, out2 = _rk4_step(V, saved1, saved2, 0.5 * (lo + hi))
    return out2


@dataclass(frozen=True)
class PoincareCrossing:
    x2: float
    winding: int
    x2_lift: float


def flow_poincare(V: TorusField, x2: float, steps_per_crossing: int = 2048) -> PoincareCrossing:
    """Next-section angle and x2-winding for one section point."""
    lift = float(section_return_lift(V, np.array([x2]), steps_per_crossing)[0])
    winding = int(math.floor(lift / TWO_PI) - math.floor(x2 / TWO_PI))
    return PoincareCrossing(lift % TWO_PI, winding, lift)


@dataclass
class SlopeReport:
    a_values: list[float]
    errors: list[float]
    slope: float | None
    degenerate: bool

    def to_json_dict(self) -> dict:
        return {"a_values": self.a_values, "errors": self.errors,
                "slope": self.slope, "degenerate": self.degenerate}


def poincare_first_order_check(V: TorusField, a_schedule, grid_points: int = 64,
                               steps_per_crossing: int = 2048) -> SlopeReport:
    """Error of the first-order return map against the integrated flow.

    Fits log(max error) against log(a); a slope near 2 certifies that the
    neglected terms are quadratic in the amplitude.
    """
    schedule = [float(a) for a in a_schedule]
    if len(schedule) < 3 or any(b >= a for a, b in zip(schedule, schedule[1:])) \
            or any(a <= 0 for a in schedule):
        raise ValueError("a_schedule must be >= 3 decreasing positive values")
    if V.v1.is_zero and V.v2.is_zero:
        return SlopeReport(schedule, [0.0] * len(schedule), None, True)
    f = reduced_series(V)
    ta = math.tan(V.alpha)
    xs = np.linspace(0.0, TWO_PI, grid_points, endpoint=False)
    errors = []
    for a in schedule:
        Va = V.with_amplitude(a)
        numeric = section_return_lift(Va, xs, steps_per_crossing)
        first_order = xs + TWO_PI * ta + a * f.eval(xs)
        errors.append(float(np.max(np.abs(numeric - first_order))))
    if min(errors) <= 1e-14:
        return SlopeReport(schedule, errors, None, True)
    slope = float(np.polyfit(np.log(schedule), np.log(errors), 1)[0])
    return SlopeReport(schedule, errors, slope, False)


def limit_cycle_census(V: TorusField, q_max: int, steps_per_crossing: int = 2048,
                       scan_steps: int = 512) -> AttractorCensus:
    """Attractor census of the numeric return map, keyed by p/q.

    Brackets are located with a coarse integrator and polished with the
    fine one; return-map derivatives come from central differences.
    """
    q_max = int(q_max)
    if not 1 <= q_max <= 64:
        raise ValueError("q_max must be between 1 and 64")
    f = reduced_series(V)
    r_eff = math.tan(V.alpha)
    bound = abs(V.a) / TWO_PI * f.sup_norm() + abs(V.a)
    band = max(f.degree, 1)
    fd_h = 1e-6

    def fine_step(x):
        return section_return_lift(V, x, steps_per_crossing)

    def fine_deriv(x):
        x = np.asarray(x, dtype=float)
        return (fine_step(x + fd_h) - fine_step(x - fd_h)) / (2 * fd_h)

    entries: dict[tuple[int, int], CensusEntry] = {}
    for (p, q) in census_keys(r_eff, q_max, bound):
        grid = max(4096, 64 * q * band)
        xs = np.linspace(0.0, TWO_PI, grid, endpoint=False)

        def g_coarse(x, _q=q, _p=p):
            y = np.asarray(x, dtype=float)
            for _ in range(_q):
                y = section_return_lift(V, y, scan_steps)
            return y - np.asarray(x, dtype=float) - TWO_PI * _p

        def g_fine(x, _q=q, _p=p):
            y = np.asarray(x, dtype=float)
            for _ in range(_q):
                y = fine_step(y)
            return y - np.asarray(x, dtype=float) - TWO_PI * _p

        def g_fine_deriv(x, _q=q):
            y = np.asarray(x, dtype=float)
            d = np.ones_like(y)
            for _ in range(_q):
                d = d * fine_deriv(y)
                y = fine_step(y)
            return d - 1.0

        brackets, degenerate = scan_sign_brackets(g_coarse(xs), TOLERANCES["non-isolated"])
        if degenerate:
            entries[(p, q)] = CensusEntry(flags=["non-isolated"])
            continue
        if not brackets:
            continue
        roots, unresolved = polish_roots(g_fine, g_fine_deriv, brackets,
                                         TOLERANCES["torus-orbit-residual"])
        records = assemble_orbits(fine_step, fine_deriv, roots, p, q, TOLERANCES["dedup"])
        flags = ["unresolved root"] if unresolved else []
        entries[(p, q)] = classify_orbits(records, flags)
    return AttractorCensus(entries, q_max, r_eff, V.a)
