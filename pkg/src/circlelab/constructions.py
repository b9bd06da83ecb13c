"""Explicit generators: attractor-forcing perturbations, the porosity
recentering, random samplers over coefficient spaces, the shifted
coefficient inequality, and Monte Carlo escape-frequency estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bounds import essential_bound_test
from .fourier import FourierSeries, ck_norm
from .parallel import pmap
from .rng import generator

KINDS = ("haar_ck", "analytic", "cube_ck", "cube_analytic")

#: largest harmonic index any sampler is allowed to touch
BAND_BUDGET = 1024


class BandLimitError(ValueError):
    """A sampler would need harmonics beyond the band budget."""


def _haar_amplitude(m: int, N: int, k: int) -> float:
    return 1.0 / (math.sqrt(m) * float(N) ** (2 * k * m))


def _default_m_trunc(kind: str, N: int) -> int:
    if kind == "haar_ck":
        m = 1
        while float(N) ** (2 * (m + 1)) <= BAND_BUDGET:
            m += 1
        return m
    if kind == "analytic":
        return 16
    if kind == "cube_ck":
        return 25
    if kind == "cube_analytic":
        return 8
    raise ValueError(f"unknown sampler kind {kind!r}")


@dataclass(frozen=True)
class SamplerConfig:
    """Configuration of one coefficient-space sampler.

    ``m_trunc`` defaults per kind; construction verifies the band budget
    and records the truncation tail (dropped coefficient envelope mass
    over retained mass) in ``tail_ratio``.
    """

    kind: str
    N: int = 2
    k: int = 2
    delta: float = 1.0
    m_trunc: int | None = None
    seed: int = 0
    tail_ratio: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.kind == "haar_ck" and (self.N < 2 or self.k < 2):
            raise ValueError("haar_ck needs N >= 2 and k >= 2")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.m_trunc is None:
            object.__setattr__(self, "m_trunc", _default_m_trunc(self.kind, self.N))
        if self.m_trunc < 1:
            raise ValueError("m_trunc must be >= 1")
        if self.band_limit() > BAND_BUDGET:
            raise BandLimitError(
                f"{self.kind} with m_trunc={self.m_trunc} needs band {self.band_limit()}"
                f" > budget {BAND_BUDGET}")
        object.__setattr__(self, "tail_ratio", self._tail_ratio())

    def band_limit(self) -> int:
        if self.kind == "haar_ck":
            return int(float(self.N) ** (2 * self.m_trunc))
        if self.kind == "analytic":
            return self.m_trunc
        if self.kind == "cube_ck":
            return max(self.m_trunc, _xn_frequency(self.m_trunc))
        if self.kind == "cube_analytic":
            return max(729, _xn_frequency(self.m_trunc))
        raise AssertionError(self.kind)

    def _tail_ratio(self) -> float:
        if self.kind == "haar_ck":
            retained = sum(_haar_amplitude(m, self.N, self.k) for m in range(1, self.m_trunc + 1))
            tail = 0.0
            m = self.m_trunc + 1
            while True:
                t = _haar_amplitude(m, self.N, self.k)
                tail += t
                if t < 1e-30 * max(retained, 1e-300) or m > self.m_trunc + 200:
                    break
                m += 1
        elif self.kind == "analytic":
            rho = math.exp(-1.5 * self.delta)
            retained = rho * (1 - rho ** self.m_trunc) / (1 - rho)
            tail = rho ** (self.m_trunc + 1) / (1 - rho)
        elif self.kind == "cube_ck":
            rho = math.exp(-1.0)
            retained = 1.0 + sum(0.5 * rho ** m for m in range(1, self.m_trunc + 1))
            retained += sum(math.exp(-n * n) for n in range(1, self.m_trunc + 1))
            tail = 0.5 * rho ** (self.m_trunc + 1) / (1 - rho)
            tail += math.exp(-float(self.m_trunc + 1) ** 2) * 2.0
        else:  # cube_analytic: the next base frequency underflows outright
            retained = sum(math.exp(-float(m) ** math.factorial(m) * self.delta) for m in (1, 2, 3))
            retained += sum(math.exp(-n * n) for n in range(1, self.m_trunc + 1))
            tail = math.exp(-float(self.m_trunc + 1) ** 2) * 2.0
        return tail / max(retained, 1e-300)

    def sample(self, stream: int = 0) -> FourierSeries:
        if self.kind == "haar_ck":
            return haar_ck_sample(self.N, self.k, self.m_trunc, self.seed, stream=stream)
        if self.kind == "analytic":
            return analytic_sample(self.delta, self.m_trunc, self.seed, stream=stream)
        return cube_sample(self.kind, self.delta, self.m_trunc, self.seed, stream=stream)


def _xn_frequency(n: int) -> int:
    # frequency of the n-th cube basis function
    return n // 2 if n % 2 == 0 else (n - 1) // 2


def _xn_coeffs(n: int) -> dict[int, complex]:
    amp = math.exp(-float(n) ** 2)
    if n % 2 == 0:
        freq = n // 2
        return {freq: -0.5j * amp, -freq: 0.5j * amp}
    freq = (n - 1) // 2
    if freq == 0:
        return {0: complex(amp)}
    return {freq: 0.5 * amp, -freq: 0.5 * amp}


def haar_ck_sample(N: int, k: int, m_trunc: int, seed: int, stream: int = 0) -> FourierSeries:
    """Sum of sparse sines at frequencies N^(2m), each present with
    probability 1/m at amplitude 1/(sqrt(m) N^(2km))."""
    if N < 2 or k < 2:
        raise ValueError("need N >= 2 and k >= 2")
    band = int(float(N) ** (2 * m_trunc))
    if band > BAND_BUDGET:
        raise BandLimitError(f"frequency N^(2 m_trunc) = {band} exceeds budget {BAND_BUDGET}")
    rng = generator(seed, stream)
    coeffs: dict[int, complex] = {}
    for m in range(1, m_trunc + 1):
        u = rng.random()
        if u < 1.0 / m:
            freq = int(float(N) ** (2 * m))
            amp = _haar_amplitude(m, N, k)
            coeffs[freq] = -0.5j * amp
            coeffs[-freq] = 0.5j * amp
    if not coeffs:
        return FourierSeries.zero()
    return FourierSeries(coeffs)


def analytic_sample(delta: float, m_trunc: int, seed: int, stream: int = 0) -> FourierSeries:
    """Coefficients e^(-3 delta n / 2) w_n with w_n uniform in the unit disk."""
    if m_trunc < 1:
        raise ValueError("m_trunc must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    rng = generator(seed, stream)
    coeffs: dict[int, complex] = {}
    for n in range(1, m_trunc + 1):
        radius = math.sqrt(rng.random())
        angle = 2.0 * math.pi * rng.random()
        w = radius * complex(math.cos(angle), math.sin(angle))
        c = math.exp(-1.5 * delta * n) * w
        coeffs[n] = c
        coeffs[-n] = np.conj(c)
    return FourierSeries(coeffs)


def cube_sample(kind: str, delta: float, m_trunc: int, seed: int, stream: int = 0) -> FourierSeries:
    """Cube-measure sample x0 + sum t_n x_n with t_n uniform on [0, 1].

    ``cube_ck`` uses the Poisson-kernel base (coefficient e^(-m)/2 at
    harmonic m, constant term 1); ``cube_analytic`` uses the sparse
    lacunary base with frequencies 1, 4, 729.
    """
    if kind not in ("cube_ck", "cube_analytic"):
        raise ValueError("kind must be cube_ck or cube_analytic")
    if m_trunc < 1:
        raise ValueError("m_trunc must be >= 1")
    coeffs: dict[int, complex] = {}

    def add(extra: dict[int, complex], scale: float = 1.0):
        for n, c in extra.items():
            coeffs[n] = coeffs.get(n, 0.0) + scale * c

    if kind == "cube_ck":
        add({0: 1.0 + 0.0j})
        for m in range(1, m_trunc + 1):
            add({m: 0.5 * math.exp(-m), -m: 0.5 * math.exp(-m)})
    else:
        for m in (1, 2, 3):
            freq = int(float(m) ** math.factorial(m))
            amp = math.exp(-freq * delta)
            add({freq: 0.5 * amp, -freq: 0.5 * amp})
        if _xn_frequency(m_trunc) > 729:
            raise BandLimitError("cube_analytic basis exceeds the band budget")
    rng = generator(seed, stream)
    for n in range(1, m_trunc + 1):
        t = rng.random()
        add(_xn_coeffs(n), scale=t)
    return FourierSeries(coeffs)


# -- deterministic constructions ----------------------------------------------


def force_attractors(base: FourierSeries, d: int, c: float,
                     N: int | None = None) -> FourierSeries:
    """base + c sin((N+1) d x): forces d attracting trajectories of period N+1.

    ``N`` defaults to the degree of ``base``; a declared N below the actual
    degree is rejected.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    if c <= 0:
        raise ValueError("c must be positive")
    deg = base.degree
    if N is None:
        N = deg
    elif deg > N:
        raise ValueError(f"base degree {deg} exceeds declared N={N}")
    return base + FourierSeries.sin((N + 1) * d, c)


def porous_center(f: FourierSeries, N: int, k: int, delta: float) -> tuple[FourierSeries, float, int]:
    """Recentre ``f`` so that a whole coefficient ball escapes low counts.

    Picks the smallest d whose weighted multiples-of-d mass is below
    delta/8, strips those harmonics, and plants a sine at frequency dN of
    amplitude delta / (2 (dN)^k).  Returns (f_hat, c, d) with the porosity
    radius factor c = 1 / (8 N^(k+1) 4^N); the recentering satisfies
    ||f - f_hat||_{C^k} < delta.
    """
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    if delta <= 0:
        raise ValueError("delta must be positive")
    d = 1
    while True:
        mass = sum((d * n) ** k * abs(f.coeff(d * n)) for n in range(1, N + 1))
        if mass < delta / 8.0:
            break
        d += 1
    fhat = f
    for n in range(1, N + 1):
        cn = f.coeff(d * n)
        if cn != 0:
            fhat = fhat - FourierSeries.harmonic(d * n, cn)
    fhat = fhat + FourierSeries.sin(d * N, delta / (2.0 * (d * N) ** k))
    c = 1.0 / (8.0 * float(N) ** (k + 1) * 4.0 ** N)
    return fhat, c, d


@dataclass(frozen=True)
class ShiftInequality:
    holds: bool
    lhs: float
    rhs: float

    def __bool__(self) -> bool:
        return self.holds


def shift_inequality_test(f: FourierSeries, g: FourierSeries, N: int, m: int) -> ShiftInequality:
    """Whether sum_{d<N} |g - f| at harmonics N^(2m-1) d dominates
    2^(-2N+2) |g - f| at harmonic N^(2m).

    Failure certifies at least N attractors of period N^(2m-1) for small
    amplitudes of the family built on g - f.
    """
    if N < 2 or m < 1:
        raise ValueError("need N >= 2 and m >= 1")
    base = int(float(N) ** (2 * m - 1))
    top = int(float(N) ** (2 * m))
    lhs = sum(abs(g.coeff(base * d) - f.coeff(base * d)) for d in range(1, N))
    rhs = 2.0 ** (-2 * N + 2) * abs(g.coeff(top) - f.coeff(top))
    return ShiftInequality(lhs >= rhs, lhs, rhs)


# -- Monte Carlo ---------------------------------------------------------------


@dataclass
class PrevalenceTrial:
    stream: int
    inequality_value: float
    escaped: bool
    predicted: float | None


@dataclass
class PrevalenceSummary:
    """Escape frequency of sampled perturbations from the bounded-count
    obstruction, with a 95% Wilson interval and, where the sampler's
    structure gives one, the analytically predicted fraction."""

    kind: str
    trials: int
    escaped: int
    fraction: float
    ci_low: float
    ci_high: float
    predicted: float | None
    rows: list[PrevalenceTrial]


def _prevalence_trial(task) -> PrevalenceTrial:
    config, shift, t = task
    sample = config.sample(stream=t)
    g = shift + sample
    if config.kind in ("haar_ck", "cube_ck"):
        res = shift_inequality_test(shift, g, config.N, m=1)
        return PrevalenceTrial(t, res.lhs - res.rhs, not res.holds, None)
    ok, lhs, rhs = essential_bound_test(shift, g, config.N, config.delta)
    radius = math.exp(-1.5 * config.delta * config.N)
    predicted = min(1.0, (rhs / radius) ** 2)
    return PrevalenceTrial(t, lhs - rhs, ok, predicted)


def prevalence_monte_carlo(config: SamplerConfig, shift: FourierSeries, trials: int,
                           workers: int = 1) -> PrevalenceSummary:
    """Sample ``trials`` perturbations and report the escape fraction.

    Escape means the inequality obstructing extra attractors fails (for
    the finitely-smooth samplers) or the two-attractor coefficient pattern
    is compatible (for the analytic samplers).  Trials use per-index
    streams, so any worker count reproduces the same draws.
    """
    if trials < 100:
        raise ValueError("trials must be at least 100")
    rows = pmap(_prevalence_trial, [(config, shift, t) for t in range(trials)], workers=workers)
    escaped = sum(1 for r in rows if r.escaped)
    fraction = escaped / trials
    lo, hi = _wilson_interval(escaped, trials)
    predicted: float | None
    if config.kind == "haar_ck" and shift.is_zero():
        predicted = 1.0  # the m=1 term is present with probability 1/1
    elif config.kind in ("analytic", "cube_analytic"):
        predicted = float(np.mean([r.predicted for r in rows]))
    else:
        predicted = None
    return PrevalenceSummary(config.kind, trials, escaped, fraction, lo, hi, predicted, rows)


def _wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)
