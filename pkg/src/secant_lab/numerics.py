"""
Shared numeric substrate: log-domain scalars, quadrature on the real line,
Laurent coefficients from circle samples and extremal singular values.

Quantities such as exp(log^2|w| / (2(s+t))) leave the double range for
moderate |log w|, so magnitudes are carried as natural logarithms wherever
they can grow.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import (AliasingError, OverflowConversionError, ParameterError,
                     QuadratureError)

#: log-magnitude above which conversion to native floats is refused
OVERFLOW_LOG = 700.0

_GL_ORDER = 32
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def wrap_phase(phase):
    """Map angles to the half-open interval (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def _plain(x):
    if np.ndim(x) == 0:
        return float(x)
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class LogReal:
    """A non-negative real number stored as its natural logarithm."""

    log: object

    @classmethod
    def from_value(cls, value):
        value = np.asarray(value, dtype=float)
        if np.any(value < 0):
            raise ParameterError("LogReal holds non-negative values only")
        with np.errstate(divide="ignore"):
            return cls(_plain(np.log(value)))

    @property
    def log10(self):
        return _plain(np.asarray(self.log) / math.log(10.0))

    def value(self):
        if np.any(np.asarray(self.log) > OVERFLOW_LOG):
            raise OverflowConversionError(
                f"log value {np.max(self.log):.1f} exceeds {OVERFLOW_LOG}")
        return _plain(np.exp(self.log))

    def sqrt(self):
        return LogReal(_plain(0.5 * np.asarray(self.log)))

    def __mul__(self, other):
        if isinstance(other, LogReal):
            return LogReal(_plain(np.asarray(self.log) + other.log))
        return self * LogReal.from_value(other)

    def __truediv__(self, other):
        if isinstance(other, LogReal):
            return LogReal(_plain(np.asarray(self.log) - other.log))
        return self / LogReal.from_value(other)

    def __float__(self):
        return float(self.value())


@dataclass(frozen=True)
class LogComplex:
    """
    Complex number (or array of them) stored as ``log|z|`` and ``arg z``.

    ``log_mag = -inf`` encodes zero.  Phases are kept in (-pi, pi].
    """

    log_mag: object
    phase: object = 0.0

    def __post_init__(self):
        object.__setattr__(self, "log_mag", _plain(self.log_mag))
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(z)), np.angle(z))

    @classmethod
    def zero(cls):
        return cls(-np.inf, 0.0)

    @classmethod
    def one(cls):
        return cls(0.0, 0.0)

    def is_zero(self, threshold=-np.inf):
        """True where the magnitude is below ``exp(threshold)`` (or exactly zero)."""
        lm = np.asarray(self.log_mag)
        out = np.isneginf(lm) | (lm < threshold)
        return bool(out) if out.ndim == 0 else out

    def to_complex(self):
        lm = np.asarray(self.log_mag)
        if np.any(lm > OVERFLOW_LOG):
            raise OverflowConversionError(
                f"log magnitude {np.max(lm):.1f} exceeds {OVERFLOW_LOG}")
        out = np.exp(lm) * np.exp(1j * np.asarray(self.phase))
        if out.ndim == 0:
            return complex(out)
        return out

    def abs(self):
        return LogReal(self.log_mag)

    def conj(self):
        return LogComplex(self.log_mag, -np.asarray(self.phase))

    def __mul__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(np.asarray(self.log_mag) + other.log_mag,
                          np.asarray(self.phase) + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(np.asarray(self.log_mag) - other.log_mag,
                          np.asarray(self.phase) - other.phase)

    def __getitem__(self, item):
        return LogComplex(np.asarray(self.log_mag)[item], np.asarray(self.phase)[item])


def log_sum_exp(log_mag, phase=None, axis=None):
    """
    Sum of complex terms ``exp(log_mag + i*phase)`` returned as a LogComplex.

    The reduction subtracts the largest magnitude first, so arbitrarily large
    or small terms can be combined.  ``numpy.sum`` reduces pairwise, which
    keeps the result independent of term order up to rounding.
    """
    log_mag = np.asarray(log_mag, dtype=float)
    if phase is None:
        phase = np.zeros_like(log_mag)
    phase = np.asarray(phase, dtype=float)
    top = np.max(log_mag, axis=axis, keepdims=True)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    terms = np.exp(log_mag - safe_top) * np.exp(1j * phase)
    total = np.sum(terms, axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out_mag = np.log(np.abs(total)) + safe_top
    out_mag = np.where(np.isneginf(top), -np.inf, out_mag)
    out_phase = np.angle(total)
    if axis is None:
        return LogComplex(float(out_mag.ravel()[0]), float(out_phase.ravel()[0]))
    return LogComplex(np.squeeze(out_mag, axis=axis), np.squeeze(out_phase, axis=axis))


def log_sum_exp_real(log_terms, axis=None):
    """``log(sum(exp(log_terms)))`` for real non-negative terms."""
    return log_sum_exp(log_terms, axis=axis).log_mag


@dataclass(frozen=True)
class LaurentWindow:
    """Finitely many Laurent coefficients d_k, k_min <= k <= k_max."""

    k_min: int
    k_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.k_min > self.k_max:
            raise ParameterError("k_min must not exceed k_max")
        if coeffs.shape != (self.k_max - self.k_min + 1,):
            raise ParameterError("coefficient array does not match index range")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def indices(self):
        return np.arange(self.k_min, self.k_max + 1)

    def __getitem__(self, k):
        if not self.k_min <= k <= self.k_max:
            return 0j
        return self.coeffs[k - self.k_min]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        powers = z[..., None] ** self.indices
        return np.sum(powers * self.coeffs, axis=-1)


def _is_power_of_two(n):
    return isinstance(n, (int, np.integer)) and n >= 2 and (n & (n - 1)) == 0


def laurent_coefficients(f, radius, count):
    """
    Laurent coefficients of ``f`` from ``count`` uniform samples on a circle.

    Parameters
    ----------
    f : callable
        Vectorised function, analytic near ``|z| = radius``.
    radius : float
        Circle radius, must be positive.
    count : int
        Number of samples, a power of two.

    Returns
    -------
    LaurentWindow
        Coefficients for ``|k| <= count/2 - 1``.  Anything outside the band
        aliases onto it.
    """
    if not radius > 0:
        raise ParameterError("radius must be positive")
    if not _is_power_of_two(count):
        raise ParameterError("count must be a power of two >= 2")
    theta = 2 * np.pi * np.arange(count) / count
    samples = np.asarray(f(radius * np.exp(1j * theta)), dtype=complex)
    spectrum = np.fft.fft(samples) / count
    half = count // 2 - 1
    ks = np.arange(-half, half + 1)
    coeffs = spectrum[ks % count] * radius ** (-ks.astype(float))
    return LaurentWindow(-half, half, coeffs)


def circle_coefficients_log(samples, log_radius, ks, alias_tol=1e-10):
    """
    Log-domain Laurent extraction on one circle.

    ``samples`` is a LogComplex array of function values at
    ``exp(log_radius) * exp(2 pi i j / count)``.  Returns the LogComplex
    coefficients d_k for the requested integer indices ``ks``.

    The highest-frequency bins measure how much of the series spills past
    the sampled band; an ``AliasingError`` is raised when they exceed
    ``alias_tol`` relative to the dominant bin.
    """
    log_mag = np.asarray(samples.log_mag, dtype=float)
    count = log_mag.shape[-1]
    if not _is_power_of_two(count):
        raise ParameterError("count must be a power of two >= 2")
    top = np.max(log_mag)
    vals = np.exp(log_mag - top) * np.exp(1j * np.asarray(samples.phase))
    spectrum = np.fft.fft(vals) / count
    peak = np.max(np.abs(spectrum))
    nyq = count // 2
    edge = np.abs(spectrum[nyq - 2:nyq + 3])
    if peak == 0:
        return LogComplex(np.full(len(ks), -np.inf), np.zeros(len(ks)))
    if np.max(edge) > alias_tol * peak:
        raise AliasingError(
            f"edge bins at {np.max(edge) / peak:.2e} of peak; increase count")
    ks = np.asarray(ks)
    if np.any(np.abs(ks) >= nyq - 2):
        raise AliasingError("requested index outside the clean band")
    picked = spectrum[ks % count]
    with np.errstate(divide="ignore"):
        out_mag = np.log(np.abs(picked)) + top - ks * log_radius
    return LogComplex(out_mag, np.angle(picked))


def _composite_gauss(f, lo, hi, panels):
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    return complex(np.sum(vals * _GL_WEIGHTS[None, :] * half[:, None]))


def integrate_line(f, decay_rate, tol=1e-10, *, center=0.0, half_width=None,
                   max_refine=7):
    """
    Integral of ``f`` over the real line.

    ``f`` must be vectorised and bounded by ``C exp(-decay_rate |x - center|)``.
    The integration interval starts at the half width where that envelope
    falls under ``tol/10``.  Both the interval and the panel count are then
    doubled until two successive composite Gauss-Legendre (order 32)
    estimates agree to ``tol * (1 + |Q|)``.

    Raises
    ------
    QuadratureError
        After ``max_refine`` doublings without agreement; ``estimates``
        carries the last two values.
    """
    if not decay_rate > 0:
        raise ParameterError("decay_rate must be positive")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    if half_width is None:
        half_width = math.log(10.0 / tol) / decay_rate
    half_width = max(float(half_width), 1.0)
    panels = max(4, int(math.ceil(half_width)))
    prev = _composite_gauss(f, center - half_width, center + half_width, panels)
    for _ in range(max_refine):
        half_width *= 2
        panels *= 4
        cur = _composite_gauss(f, center - half_width, center + half_width, panels)
        if abs(cur - prev) <= tol * (1 + abs(cur)):
            return cur
        prev = cur
    raise QuadratureError("integrate_line did not converge", estimates=(prev, cur))


def extremal_singular_values(M):
    """Smallest and largest singular values of a dense matrix."""
    M = np.asarray(M)
    if M.size == 0:
        raise ParameterError("matrix is empty")
    if not np.all(np.isfinite(M)):
        raise ParameterError("matrix has non-finite entries")
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1]), float(s[0])
