"""Finite Fourier series arithmetic for real 2pi-periodic functions.

A :class:`FourierSeries` stores complex harmonics for integer frequencies
``-M..M`` under the reality constraint ``c[-n] == conj(c[n])``; indices
outside the band are implicitly zero.  Instances are immutable values and
every operation returns a new series, so they are safe to share between
threads and worker processes.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

TWO_PI = 2.0 * np.pi

#: relative tolerance for the reality (hermitian-symmetry) check
HERMITIAN_TOL = 1e-12


class FourierSeries:
    """Band-limited real 2pi-periodic function given by complex harmonics.

    Parameters
    ----------
    coeffs:
        Either a mapping ``{n: c_n}`` or a complex array of odd length
        ``2M+1`` ordered ``c[-M] .. c[M]``.
    band_limit:
        Optional explicit band limit; with a mapping it defaults to the
        largest stored ``|n|``.

    Construction symmetrises roundoff-level asymmetry and rejects inputs
    whose coefficients fail ``c[-n] == conj(c[n])`` beyond ``1e-12`` of the
    coefficient scale.
    """

    def __init__(self, coeffs, band_limit: int | None = None):
        if isinstance(coeffs, Mapping):
            if band_limit is None:
                band_limit = max((abs(int(n)) for n in coeffs), default=0)
            arr = np.zeros(2 * band_limit + 1, dtype=complex)
            given = {int(n) for n in coeffs}
            for n, c in coeffs.items():
                n = int(n)
                if abs(n) > band_limit:
                    raise ValueError(f"harmonic {n} exceeds band limit {band_limit}")
                arr[n + band_limit] = complex(c)
                if -n not in given:  # hermitian completion of one-sided input
                    arr[-n + band_limit] = np.conj(complex(c))
        else:
            arr = np.asarray(coeffs, dtype=complex).copy()
            if arr.ndim != 1 or arr.size % 2 != 1:
                raise ValueError("coefficient array must have odd length 2M+1")
            if band_limit is not None and band_limit != arr.size // 2:
                raise ValueError("band_limit inconsistent with array length")
        m = arr.size // 2
        scale = max(float(np.max(np.abs(arr))), 1.0) if arr.size else 1.0
        sym = 0.5 * (arr + np.conj(arr[::-1]))
        if float(np.max(np.abs(arr - sym))) > HERMITIAN_TOL * scale:
            raise ValueError("coefficients are not hermitian-symmetric (series would not be real)")
        sym.setflags(write=False)
        self._c = sym
        self.band_limit = m

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, band_limit: int = 0) -> "FourierSeries":
        return cls(np.zeros(2 * band_limit + 1, dtype=complex))

    @classmethod
    def constant(cls, value: float) -> "FourierSeries":
        return cls({0: complex(value)})

    @classmethod
    def cos(cls, n: int, amplitude: float = 1.0) -> "FourierSeries":
        """amplitude * cos(n x)"""
        if n == 0:
            return cls.constant(amplitude)
        return cls({n: 0.5 * amplitude}, band_limit=abs(n))

    @classmethod
    def sin(cls, n: int, amplitude: float = 1.0) -> "FourierSeries":
        """amplitude * sin(n x)"""
        if n == 0:
            return cls.zero()
        return cls({abs(n): -0.5j * amplitude * np.sign(n)}, band_limit=abs(n))

    @classmethod
    def harmonic(cls, n: int, value: complex) -> "FourierSeries":
        """Series with c[n] = value (and the conjugate partner at -n)."""
        if n == 0:
            return cls.constant(value.real if abs(complex(value).imag) == 0 else complex(value))
        return cls({n: complex(value)}, band_limit=abs(n))

    @classmethod
    def from_cos_sin(cls, cos_amps: Mapping[int, float] | None = None,
                     sin_amps: Mapping[int, float] | None = None) -> "FourierSeries":
        """Build from per-harmonic cosine/sine amplitudes (n >= 0)."""
        cos_amps = dict(cos_amps or {})
        sin_amps = dict(sin_amps or {})
        for d in (cos_amps, sin_amps):
            for n in d:
                if n < 0:
                    raise ValueError("cos/sin amplitudes are indexed by n >= 0")
        m = max([*cos_amps, *sin_amps], default=0)
        coeffs: dict[int, complex] = {}
        for n in range(0, m + 1):
            c = cos_amps.get(n, 0.0)
            s = sin_amps.get(n, 0.0)
            if n == 0:
                coeffs[0] = complex(c)
            elif c != 0.0 or s != 0.0:
                coeffs[n] = 0.5 * (c - 1j * s)
        return cls(coeffs, band_limit=m)

    @classmethod
    def from_samples(cls, values: Iterable[float], band_limit: int) -> "FourierSeries":
        """Trigonometric interpolant coefficients from equispaced samples.

        ``values`` are the ``2K+1`` samples at ``x_j = 2 pi j / (2K+1)``.
        Requires ``2K+1 >= 2*band_limit + 1``; the round trip through a
        sample grid is exact (to rounding) for series within the band.
        """
        v = np.asarray(list(values), dtype=float)
        if v.ndim != 1 or v.size % 2 != 1:
            raise ValueError("need an odd number of samples 2K+1")
        k = v.size // 2
        if band_limit > k:
            raise ValueError(
                f"sample count {v.size} too small for band limit {band_limit} (need >= {2 * band_limit + 1})")
        xj = TWO_PI * np.arange(v.size) / v.size
        coeffs = np.zeros(2 * band_limit + 1, dtype=complex)
        for n in range(0, band_limit + 1):
            c = np.mean(v * np.exp(-1j * n * xj))
            coeffs[band_limit + n] = c
            coeffs[band_limit - n] = np.conj(c)
        return cls(coeffs)

    # -- basic accessors ----------------------------------------------

    def coeff(self, n: int) -> complex:
        """c[n]; zero outside the stored band."""
        if abs(n) > self.band_limit:
            return 0.0 + 0.0j
        return complex(self._c[n + self.band_limit])

    def coefficients(self) -> dict[int, complex]:
        """Nonzero coefficients as a dict {n: c_n}."""
        m = self.band_limit
        return {n - m: complex(c) for n, c in enumerate(self._c) if c != 0}

    @property
    def degree(self) -> int:
        """Largest |n| with a nonzero coefficient (0 for the zero series)."""
        nz = np.nonzero(self._c)[0]
        if nz.size == 0:
            return 0
        m = self.band_limit
        return int(max(abs(nz[0] - m), abs(nz[-1] - m)))

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self._c)) <= tol) if self._c.size else True

    # -- evaluation ----------------------------------------------------

    def eval(self, x):
        """Real value(s) of the series at angle(s) ``x``.

        Summation is over conjugate pairs, so the result is exactly real
        up to rounding.
        """
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        m = self.band_limit
        out = np.full(xs.shape, self._c[m].real)
        for n in range(1, m + 1):
            c = self._c[m + n]
            if c != 0:
                out += 2.0 * (c.real * np.cos(n * xs) - c.imag * np.sin(n * xs))
        return float(out[0]) if scalar else out

    __call__ = eval

    def eval_line(self, x, height: float):
        """Complex values of the analytic continuation on Im z = height."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        m = self.band_limit
        out = np.zeros(xs.shape, dtype=complex)
        for n in range(-m, m + 1):
            c = self._c[n + m]
            if c != 0:
                out += c * np.exp(-n * height) * np.exp(1j * n * xs)
        return out

    # -- calculus and projections ---------------------------------------

    def derivative(self) -> "FourierSeries":
        m = self.band_limit
        ns = np.arange(-m, m + 1)
        return FourierSeries(self._c * (1j * ns))

    def resample(self, q: int) -> "FourierSeries":
        """Projection onto harmonics divisible by ``q``.

        The coefficients are copied without the factor ``q`` that appears
        when a sum of rotated copies is expanded; callers multiply by ``q``
        where needed.
        """
        q = int(q)
        if q < 1:
            raise ValueError("q must be a positive integer")
        m = self.band_limit
        out = np.zeros_like(self._c)
        for n in range(-m, m + 1):
            if n % q == 0:
                out[n + m] = self._c[n + m]
        return FourierSeries(out)

    def compress(self, d: int) -> "FourierSeries":
        """Reindex harmonics ``d*n -> n`` for a 2pi/d-periodic series.

        Coefficients at non-multiples of ``d`` must vanish (to rounding).
        """
        d = int(d)
        if d < 1:
            raise ValueError("d must be a positive integer")
        m = self.band_limit
        scale = max(float(np.max(np.abs(self._c))), 1.0)
        out = np.zeros(2 * (m // d) + 1, dtype=complex)
        for n in range(-m, m + 1):
            c = self._c[n + m]
            if n % d == 0:
                out[n // d + m // d] = c
            elif abs(c) > 1e-12 * scale:
                raise ValueError(f"harmonic {n} nonzero; series has no period 2pi/{d}")
        return FourierSeries(out)

    def rotate(self, theta: float) -> "FourierSeries":
        """The shifted function x -> f(x + theta)."""
        m = self.band_limit
        ns = np.arange(-m, m + 1)
        return FourierSeries(self._c * np.exp(1j * ns * theta))

    # -- norms -----------------------------------------------------------

    def sup_norm(self) -> float:
        """sup |f| over the real line (dense grid plus local refinement)."""
        if self.is_zero():
            return 0.0
        return float(np.sqrt(_refined_max(lambda x: self.eval(x) ** 2, self.band_limit)))

    def strip_norm(self, delta: float) -> float:
        """sup |f| over the strip |Im z| <= delta.

        Band-limited series attain this sup on the boundary lines, so only
        Im z = +-delta are searched.
        """
        if delta <= 0:
            raise ValueError("delta must be positive")
        if self.is_zero():
            return 0.0
        best = 0.0
        for h in (delta, -delta):
            sq = lambda x, _h=h: np.abs(self.eval_line(x, _h)) ** 2
            best = max(best, float(_refined_max(sq, self.band_limit)))
        return float(np.sqrt(best))

    # -- arithmetic -------------------------------------------------------

    def _padded(self, m: int) -> np.ndarray:
        pad = m - self.band_limit
        if pad == 0:
            return self._c.copy()
        return np.pad(self._c, (pad, pad))

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            return NotImplemented
        m = max(self.band_limit, other.band_limit)
        return FourierSeries(self._padded(m) + other._padded(m))

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            return NotImplemented
        m = max(self.band_limit, other.band_limit)
        return FourierSeries(self._padded(m) - other._padded(m))

    def __mul__(self, scalar) -> "FourierSeries":
        if isinstance(scalar, (int, float)):
            return FourierSeries(self._c * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> "FourierSeries":
        return FourierSeries(-self._c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierSeries):
            return NotImplemented
        m = max(self.band_limit, other.band_limit)
        return bool(np.array_equal(self._padded(m), other._padded(m)))

    __hash__ = None

    def isclose(self, other: "FourierSeries", tol: float = 1e-12) -> bool:
        m = max(self.band_limit, other.band_limit)
        return bool(np.max(np.abs(self._padded(m) - other._padded(m))) <= tol)

    def __repr__(self) -> str:
        nz = len([c for c in self._c if c != 0])
        return f"FourierSeries(band_limit={self.band_limit}, nonzero={nz})"

    # -- JSON function-spec format ----------------------------------------

    def to_json_dict(self) -> dict:
        """{"harmonics": [{"n": n, "re": .., "im": ..}, ...]} with n >= 0."""
        harmonics = []
        for n in range(0, self.band_limit + 1):
            c = self.coeff(n)
            if c != 0:
                harmonics.append({"n": n, "re": c.real, "im": c.imag})
        return {"harmonics": harmonics}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "FourierSeries":
        """Parse the JSON function-spec format (hermitian completion implied)."""
        if "harmonics" not in data:
            raise ValueError("function spec must contain a 'harmonics' list")
        entries = data["harmonics"]
        seen: set[int] = set()
        coeffs: dict[int, complex] = {}
        for e in entries:
            try:
                n = int(e["n"])
                c = complex(float(e["re"]), float(e.get("im", 0.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"malformed harmonic entry {e!r}") from exc
            if n in seen:
                raise ValueError(f"duplicate harmonic index {n}")
            seen.add(n)
            if n >= 0:
                key, val = n, c
            else:
                key, val = -n, np.conj(c)
            if key in coeffs and not np.isclose(abs(coeffs[key] - val), 0.0, atol=1e-12):
                raise ValueError(f"conflicting entries for harmonic +-{key}")
            coeffs[key] = val
        if 0 in coeffs and abs(coeffs[0].imag) > 1e-12 * max(1.0, abs(coeffs[0])):
            raise ValueError("harmonic 0 must be real")
        full = {}
        for n, c in coeffs.items():
            full[n] = c
            if n > 0:
                full[-n] = np.conj(c)
        return cls(full)


def ck_norm(f: FourierSeries, k: int) -> float:
    """max over derivative orders 0..k of the sup norm."""
    if k < 0:
        raise ValueError("k must be >= 0")
    g = f
    best = g.sup_norm()
    for _ in range(k):
        g = g.derivative()
        best = max(best, g.sup_norm())
    return best


def _refined_max(sq_fn, band: int) -> float:
    """Max of a smooth nonnegative function on the circle.

    Dense grid (>= 4096 points, 32 per harmonic) followed by golden-section
    refinement around every near-maximal local peak.
    """
    n = max(4096, 32 * max(band, 1))
    xs = np.linspace(0.0, TWO_PI, n, endpoint=False)
    v = np.asarray(sq_fn(xs), dtype=float)
    vmax = float(v.max())
    if vmax <= 0.0:
        return 0.0
    local = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    peaks = np.nonzero(local & (v >= 0.999 * vmax))[0]
    h = TWO_PI / n
    best = vmax
    for i in peaks[:64]:
        best = max(best, _golden_max_scalar(sq_fn, xs[i] - h, xs[i] + h))
    return best


def _golden_max_scalar(fn, lo: float, hi: float, iters: int = 70) -> float:
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc = float(np.asarray(fn(np.array([c])))[0])
    fd = float(np.asarray(fn(np.array([d])))[0])
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = float(np.asarray(fn(np.array([c])))[0])
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = float(np.asarray(fn(np.array([d])))[0])
    return max(fc, fd)
