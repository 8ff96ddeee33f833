"""Periodic grid, Fourier transforms and multiplier operators on the circle R/Z.

Fields live on a uniform grid of n points x_j = j/n and are stored in both
representations at once: real samples and Fourier coefficients c_k for the
basis e^{2*pi*i*k*x}, k = -n/2 .. n/2-1 (FFT ordering).  With circumference 1
the derivative symbol is 2*pi*i*k and the inertia operator (1 - D^2)^s is the
multiplier (1 + 4*pi^2*k^2)^s, so A*1 = 1, [A, D] = 0 and self-adjointness of
A hold exactly at the discrete level.
"""

import functools

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi

#: oversampling factor used for sup-norm / extremum estimates
OVERSAMPLE_FACTOR = 4


class PeriodicGrid:
    """Uniform grid of n points (n even, >= 8) on the unit-circumference circle."""

    __slots__ = ("n", "points", "wavenumbers")

    def __init__(self, n):
        n = int(n)
        if n < 8 or n % 2 != 0:
            raise ConfigError(f"grid size must be even and >= 8, got {n}")
        self.n = n
        self.points = np.arange(n) / n
        self.points.flags.writeable = False
        # integer wavenumbers in FFT order: 0, 1, .., n/2-1, -n/2, .., -1
        self.wavenumbers = np.fft.fftfreq(n, d=1.0 / n)
        self.wavenumbers.flags.writeable = False

    def __eq__(self, other):
        return isinstance(other, PeriodicGrid) and other.n == self.n

    def __hash__(self):
        return hash(("PeriodicGrid", self.n))

    def __repr__(self):
        return f"PeriodicGrid(n={self.n})"


@functools.lru_cache(maxsize=None)
def _symbol_values(n, s):
    k = np.fft.fftfreq(n, d=1.0 / n)
    values = np.power(1.0 + (TWO_PI * k) ** 2, s)
    values.flags.writeable = False
    return values


@functools.lru_cache(maxsize=None)
def _dealias_keep_mask(n):
    k = np.fft.fftfreq(n, d=1.0 / n)
    mask = np.abs(k) <= n / 3.0
    mask.flags.writeable = False
    return mask


def _symmetrize(coeffs):
    # enforce exact conjugate symmetry: c_{-k} := conj(c_k) bit-exactly.
    # Real/imaginary multiplier symbols preserve it exactly afterwards, so
    # high-order inertia powers cannot amplify asymmetric transform noise
    # into a spurious imaginary part.
    n = coeffs.size
    return 0.5 * (coeffs + np.conj(coeffs[(-np.arange(n)) % n]))


class MultiplierSymbol:
    """The diagonal symbol lambda_k = (1 + 4*pi^2*k^2)**s, FFT ordering."""

    __slots__ = ("exponent", "values")

    def __init__(self, exponent, values):
        self.exponent = exponent
        self.values = values

    def __repr__(self):
        return f"MultiplierSymbol(exponent={self.exponent})"


def multiplier_symbol(grid, s):
    """Symbol of (1 - D^2)^s on the given grid (cached per (n, s))."""
    return MultiplierSymbol(float(s), _symbol_values(grid.n, float(s)))


def to_spectral(samples):
    """Forward transform: n real samples -> normalized coefficients c_k."""
    samples = np.asarray(samples, dtype=float)
    return np.fft.fft(samples) / samples.size


def to_physical(coeffs):
    """Inverse transform back to real samples.

    The imaginary residue must stay below 1e-10 relative to the field; a
    larger residue means the coefficients were not conjugate-symmetric.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.fft.ifft(coeffs) * coeffs.size
    scale = float(np.abs(z.real).max()) if coeffs.size else 0.0
    residue = float(np.abs(z.imag).max()) if coeffs.size else 0.0
    if residue > 1e-10 * max(scale, 1e-30):
        raise ConfigError(
            f"coefficients are not conjugate-symmetric: imaginary residue {residue:.3e} "
            f"exceeds 1e-10 of field scale {scale:.3e}"
        )
    return z.real


class SpectralField:
    """A real periodic function held as samples plus Fourier coefficients.

    Instances are immutable; all operators return new fields.  Linear
    arithmetic (+, -, scalar *) acts on both representations; pointwise
    products must go through :func:`dealiased_product`.  Coefficients are
    exactly conjugate-symmetrized on construction, and every operator in this
    module preserves that symmetry bit-exactly.
    """

    __slots__ = ("grid", "samples", "coeffs")

    def __init__(self, grid, samples, coeffs):
        self.grid = grid
        self.samples = samples
        self.coeffs = coeffs
        samples.flags.writeable = False
        coeffs.flags.writeable = False

    @classmethod
    def from_samples(cls, grid, samples):
        samples = np.array(samples, dtype=float)
        if samples.shape != (grid.n,):
            raise ConfigError(
                f"field length {samples.shape} does not match grid n={grid.n}"
            )
        return cls(grid, samples, _symmetrize(to_spectral(samples)))

    @classmethod
    def from_coeffs(cls, grid, coeffs):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.shape != (grid.n,):
            raise ConfigError(
                f"coefficient length {coeffs.shape} does not match grid n={grid.n}"
            )
        mirror = np.conj(coeffs[(-np.arange(grid.n)) % grid.n])
        defect = float(np.abs(coeffs - mirror).max())
        scale = max(float(np.abs(coeffs).max()), 1e-30)
        if defect > 1e-12 * scale:
            raise ConfigError(
                f"coefficients are not conjugate-symmetric within 1e-12 relative "
                f"(defect {defect:.3e}, scale {scale:.3e})"
            )
        coeffs = 0.5 * (coeffs + mirror)
        return cls(grid, to_physical(coeffs), coeffs)

    @classmethod
    def zero(cls, grid):
        return cls(grid, np.zeros(grid.n), np.zeros(grid.n, dtype=complex))

    @classmethod
    def constant(cls, grid, value):
        coeffs = np.zeros(grid.n, dtype=complex)
        coeffs[0] = value
        return cls(grid, np.full(grid.n, float(value)), coeffs)

    def is_finite(self):
        return bool(np.isfinite(self.samples).all())

    def _require_same_grid(self, other):
        if self.grid != other.grid:
            raise ConfigError(
                f"grid mismatch: n={self.grid.n} vs n={other.grid.n}"
            )

    def __add__(self, other):
        self._require_same_grid(other)
        return SpectralField(self.grid, self.samples + other.samples,
                             self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._require_same_grid(other)
        return SpectralField(self.grid, self.samples - other.samples,
                             self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return SpectralField(self.grid, self.samples * scalar, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.samples, -self.coeffs)

    def __repr__(self):
        return f"SpectralField(n={self.grid.n})"


def derivative(f):
    """Spectral derivative: coefficient k is multiplied by 2*pi*i*k.

    The Nyquist mode is zeroed: its odd-order derivative image has no real
    representative on the grid.  Model fields are dealiased well inside the
    Nyquist band, so this never discards resolved content.
    """
    c = f.coeffs * (TWO_PI * 1j * f.grid.wavenumbers)
    c[f.grid.n // 2] = 0.0
    return SpectralField(f.grid, to_physical(c), c)


def apply_power(f, s):
    """Apply (1 - D^2)^s as the Fourier multiplier (1 + 4*pi^2*k^2)^s.

    Any real s is allowed; the symbol never vanishes, constants are fixed
    points for every s, and apply_power(f, s) followed by apply_power(., -s)
    recovers f.
    """
    c = f.coeffs * _symbol_values(f.grid.n, float(s))
    return SpectralField(f.grid, to_physical(c), c)


def circle_integral(f):
    """Integral over the unit-circumference circle: the mean of the samples."""
    return float(np.mean(f.samples))


def sobolev_norm_sq(f, s):
    """Squared H^s norm: sum_k (1 + 4*pi^2*k^2)^s |c_k|^2.

    Equals circle_integral(f * apply_power(f, s)) for resolved fields.
    """
    w = _symbol_values(f.grid.n, float(s))
    c = f.coeffs
    return float(np.sum(w * (c.real ** 2 + c.imag ** 2)))


def dealiased_product(f, g):
    """Pointwise product with 2/3-rule truncation: modes |k| > n/3 are zeroed."""
    f._require_same_grid(g)
    c = _symmetrize(to_spectral(f.samples * g.samples))
    c *= _dealias_keep_mask(f.grid.n)
    return SpectralField(f.grid, to_physical(c), c)


def interpolate(f, points):
    """Evaluate the truncated Fourier series at arbitrary points (wrapped mod 1).

    Direct summation, O(n) per point; exact for the trigonometric interpolant.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float)) % 1.0
    phases = np.exp((TWO_PI * 1j) * np.outer(pts, f.grid.wavenumbers))
    return (phases @ f.coeffs).real


def oversampled_samples(f, factor=OVERSAMPLE_FACTOR):
    """Samples of f on a `factor`-times finer grid via spectral zero padding.

    The Nyquist coefficient is split between +n/2 and -n/2 so the refined
    signal stays real and reproduces the coarse samples.
    """
    n = f.grid.n
    nf = factor * n
    half = n // 2
    c = np.zeros(nf, dtype=complex)
    c[:half] = f.coeffs[:half]
    c[nf - half + 1:] = f.coeffs[half + 1:]
    c[half] = 0.5 * f.coeffs[half]
    c[nf - half] += 0.5 * f.coeffs[half]
    return (np.fft.ifft(c) * nf).real


def sup_norm(f):
    """Max absolute value on a 4x oversampled grid.

    An approximation of the true sup of the trigonometric polynomial; the
    coarse samples are included so sup_norm(f) >= max |samples| always holds.
    """
    fine = oversampled_samples(f)
    return max(float(np.abs(fine).max()), float(np.abs(f.samples).max()))
