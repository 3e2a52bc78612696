"""
Entire-function models of V^2(g).

With w_m = exp((a+b) m) and

    A(z) = prod_{n >= 1} (1 + z / w_n),      G(z) = (1 + z) A(z) A(1/z),

the space H_{a,b} consists of F(z) = G(z) sum_n c_n e^{a n} / (z + w_n) with
norm ||(c_n)||_{l^2}.  It coincides with the small Fock space F_{beta,gamma}
of functions holomorphic in C minus {0} with

    ||F||^2 = int |F|^2 exp(-2 phi) dm_2,   phi(z) = beta log^2|z| + gamma log|z|,

dm_2 = dx dy / pi, beta = 1 / (2 Re(a+b)), gamma = 1/2 + Re a / Re(a+b).

Every magnitude that can grow like exp(log^2|z|) is carried as a
LogComplex / LogReal.  Arguments ``z`` are native complex numbers (or
arrays) with |log|z|| up to several hundred.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .errors import ParameterError, SingularityError
from .numerics import (LaurentWindow, LogComplex, LogReal, circle_coefficients_log,
                       log_sum_exp, log_sum_exp_real)

#: product truncation: neglected factors contribute less than this to log|.|
PRODUCT_TOL = 1e-17


@dataclass(frozen=True)
class CauchyParams:
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if not (self.a.real > 0 and self.b.real > 0):
            raise ParameterError("Re a and Re b must be positive")

    @classmethod
    def from_window(cls, w):
        return cls(w.a, w.b)

    @property
    def s(self):
        return self.a.real

    @property
    def t(self):
        return self.b.real

    @property
    def c(self):
        return self.a + self.b

    def w(self, m):
        """w_m = exp((a+b) m).  Zeros of G are -w(m) computed by this same call."""
        return np.exp(self.c * np.asarray(m, dtype=float))

    def log_w(self, m):
        return self.c * np.asarray(m, dtype=float)


@dataclass(frozen=True)
class FockParams:
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError("beta must be positive")

    def phi(self, log_abs):
        """phi as a function of log|z|."""
        return self.beta * np.asarray(log_abs) ** 2 + self.gamma * np.asarray(log_abs)


@dataclass
class HabElement:
    params: CauchyParams
    coeffs: np.ndarray
    n_min: int = 0

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_min + self.coeffs.size)

    def __call__(self, z):
        return hab_eval(self, z)


def derive_fock_params(p):
    st = p.s + p.t
    return FockParams(beta=1.0 / (2.0 * st), gamma=0.5 + p.s / st)


# ---------------------------------------------------------------------------
# products


def _as_z(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularityError("z = 0 is an essential singularity")
    return z


def _product_range(p, log_abs, tol=PRODUCT_TOL, include=()):
    """Index range [k_lo, k_hi] of factors that matter for all given log|z|."""
    st = p.s + p.t
    extra = math.log(1.0 / tol) + 1.0
    hi = float(np.max(log_abs))
    lo = float(np.min(log_abs))
    k_hi = max(0, math.ceil((hi + extra) / st))
    k_lo = min(-1, -math.ceil((-lo + extra) / st))
    if len(include):
        k_lo = min(k_lo, int(np.min(include)))
        k_hi = max(k_hi, int(np.max(include)))
    return k_lo, k_hi


def _log1p_ratio(r):
    """Complex log(1 + r); exact -inf where r == -1."""
    big = np.abs(r) > 1
    with np.errstate(divide="ignore", invalid="ignore"):
        small_val = np.log(1 + np.where(big, 0, r))
        rb = np.where(big, r, 1)
        big_val = np.log(rb) + np.log1p(1 / rb)
    return np.where(big, big_val, small_val)


def _log_factors(p, z, ks):
    """
    Complex logs of the factors of G: (1 + z / w_k) for k >= 0 and
    (1 + w_k / z) for k < 0.  Shape z.shape + (len(ks),).
    """
    ks = np.asarray(ks)
    wk = p.w(ks)
    zz = z[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        # the unused k < 0 branch is infinite at z = 0 (A only needs k >= 1)
        r = np.where(ks >= 0, zz / wk, wk / zz)
    return _log1p_ratio(r)


def _complex_log_to_log(L):
    return LogComplex(np.real(L), np.imag(L))


def eval_A(p, z, tol=PRODUCT_TOL):
    """A(z) = prod_{n >= 1} (1 + z / w_n) as a LogComplex."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.maximum(np.abs(z), 1e-300))
    _, k_hi = _product_range(p, log_abs, tol)
    ks = np.arange(1, max(k_hi, 1) + 1)
    L = np.sum(_log_factors(p, z, ks), axis=-1)
    return _complex_log_to_log(L)


def eval_G(p, z, tol=PRODUCT_TOL):
    """G(z) = (1 + z) A(z) A(1/z) as a LogComplex; zero exactly at z = -w_m."""
    z = _as_z(z)
    k_lo, k_hi = _product_range(p, np.log(np.abs(z)), tol)
    ks = np.arange(k_lo, k_hi + 1)
    L = np.sum(_log_factors(p, z, ks), axis=-1)
    return _complex_log_to_log(L)


def _log_h(p, z, ns, tol=PRODUCT_TOL):
    """
    Complex log of h_n(z) = G(z) / (z + w_n) for each n in ``ns``.

    The factor of G carrying the zero -w_n is dropped instead of divided
    out, so h_n is evaluated without cancellation at and near z = -w_n.
    """
    ns = np.asarray(ns)
    log_z = np.log(z)
    k_lo, k_hi = _product_range(p, np.real(log_z), tol, include=ns)
    ks = np.arange(k_lo, k_hi + 1)
    L = _log_factors(p, z, ks)
    zero = np.isneginf(np.real(L))
    finite_sum = np.sum(np.where(zero, 0, L), axis=-1)
    n_zero = np.sum(zero, axis=-1)
    pos = ns - k_lo
    L_n = L[..., pos]
    zero_n = zero[..., pos]
    others = finite_sum[..., None] - np.where(zero_n, 0, L_n)
    # any remaining zero factor (other than the dropped one) kills h_n
    remaining = n_zero[..., None] - zero_n.astype(int)
    others = np.where(remaining > 0, -np.inf + 0j, others)
    divisor = np.where(ns >= 0, p.log_w(ns), log_z[..., None])
    return others - divisor


def _hab_eval_log(p, log_coeff, ns, z):
    """sum_n c_n e^{a n} h_n(z) with c_n given as a LogComplex over ``ns``."""
    lh = _log_h(p, z, ns)
    log_terms = np.real(lh) + np.asarray(log_coeff.log_mag) + p.s * ns
    phases = np.imag(lh) + np.asarray(log_coeff.phase) + p.a.imag * ns
    with np.errstate(invalid="ignore"):
        log_terms = np.where(np.isnan(log_terms), -np.inf, log_terms)
    phases = np.where(np.isfinite(phases), phases, 0.0)
    return log_sum_exp(log_terms, phases, axis=-1)


def hab_eval(F, z):
    """F(z) = G(z) sum_n c_n e^{a n} / (z + w_n) as a LogComplex."""
    z = _as_z(z)
    return _hab_eval_log(F.params, LogComplex.from_complex(F.coeffs), F.indices, z)


def sis_kernel_sum(p, coeffs, x, n_min=0):
    """
    e^{b x} sum_n c_n e^{a n} / (e^{(a+b) x} + w_n), which equals
    sum_n c_n g(x - n) for g(x) = 1/(e^{ax} + e^{-bx}).
    """
    x = np.asarray(x, dtype=float)
    coeffs = np.asarray(coeffs, dtype=complex)
    ns = np.arange(n_min, n_min + coeffs.size)
    # divide through by e^{(a+b) max(x, n)} to stay in range
    top = np.maximum(x[..., None], ns)
    num = np.exp(p.a * ns - p.c * top + p.b * x[..., None])
    den = np.exp(p.c * (x[..., None] - top)) + np.exp(p.c * (ns - top))
    out = np.sum(coeffs * num / den, axis=-1)
    return complex(out) if out.ndim == 0 else out


def sis_via_hab(F, x):
    """e^{b x} F(u) / G(u) at u = e^{(a+b) x}: the V^2(g) element attached to F."""
    p = F.params
    x = np.asarray(x, dtype=float)
    u = np.exp(p.c * x)
    val = hab_eval(F, u) / eval_G(p, u)
    out = LogComplex(np.asarray(val.log_mag) + p.t * x,
                     np.asarray(val.phase) + p.b.imag * x).to_complex()
    return out


# ---------------------------------------------------------------------------
# kernels


def _kernel_indices(p, w_abs_log, span=None):
    st = p.s + p.t
    if span is None:
        span = math.ceil(46.0 / (2 * min(p.s, p.t))) + 3
    n0 = int(round(float(w_abs_log) / st))
    return np.arange(n0 - span, n0 + span + 1)


def hab_kernel_coeffs(p, w):
    """
    Coefficients k_n = conj(e^{a n} h_n(w)) of the reproducing kernel at w.

    They make <F, k_w> = sum_n c_n conj(k_n) = F(w) in the coefficient
    model.  Terms decay like e^{-2 t n} (n -> +inf) and e^{2 s n}
    (n -> -inf) around n ~ log|w| / (s + t); the index window keeps every
    term above 1e-20 of the largest.
    """
    w = complex(_as_z(w))
    ns = _kernel_indices(p, math.log(abs(w)))
    lh = _log_h(p, np.asarray(w), ns)
    log_mag = np.real(lh) + p.s * ns
    phase = -(np.imag(lh) + p.a.imag * ns)
    return ns, LogComplex(log_mag, phase)


def hab_kernel(p, w, z):
    """k_w(z) = G(z) conj(G(w)) sum_n e^{2 s n} / (conj(w + w_n) (z + w_n))."""
    z = _as_z(z)
    ns, k = hab_kernel_coeffs(p, w)
    return _hab_eval_log(p, k, ns, z)


def hab_kernel_norm(p, w):
    """||k_w|| = (sum_n |k_n|^2)^{1/2} = k_w(w)^{1/2}."""
    _, k = hab_kernel_coeffs(p, w)
    return LogReal(0.5 * log_sum_exp_real(2 * np.asarray(k.log_mag)))


def dist_to_zeros(p, w):
    """dist(w, W), W = {-w_m}, using the zeros whose modulus brackets |w|."""
    w = np.asarray(w, dtype=complex)
    st = p.s + p.t
    m0 = np.round(np.log(np.abs(w)) / st).astype(int)
    offs = np.arange(-3, 4)
    ms = m0[..., None] + offs
    d = np.min(np.abs(w[..., None] + p.w(ms)), axis=-1)
    return d if d.ndim else float(d)


def generator_envelope_log_ratio(p, w):
    """log of |G(w)| exp(-log^2|w|/(2(s+t)) + log|w|/2) / dist(w, W)."""
    w = np.asarray(w, dtype=complex)
    la = np.log(np.abs(w))
    st = p.s + p.t
    return (np.asarray(eval_G(p, w).log_mag) - la ** 2 / (2 * st) + la / 2
            - np.log(dist_to_zeros(p, w)))


def hab_kernel_envelope_log_ratio(p, w):
    """log of ||k_w|| exp(-log^2|w|/(2(s+t)) - (s/(s+t) - 1/2) log|w|)."""
    la = math.log(abs(w))
    st = p.s + p.t
    return hab_kernel_norm(p, w).log - la ** 2 / (2 * st) - (p.s / st - 0.5) * la


# ---------------------------------------------------------------------------
# Fock space


def fock_monomial_norm_sq(p, n):
    """||z^n||^2 = sqrt(2 pi / beta) exp((n + 1 - gamma)^2 / (2 beta))."""
    n = np.asarray(n, dtype=float)
    log = 0.5 * math.log(2 * math.pi / p.beta) + (n + 1 - p.gamma) ** 2 / (2 * p.beta)
    return LogReal(log if np.ndim(log) else float(log))


def fock_monomial_norm_sq_radial(p, n, epsabs=0.0, epsrel=1e-12):
    """
    ||z^n||^2 = 2 int_0^inf r^{2n+1} e^{-2 phi(r)} dr by adaptive quadrature.

    Integrated in u = log r around the peak u* = (n + 1 - gamma) / (2 beta)
    with the integrand scaled by its peak value; returned as a LogReal.
    """
    u_star = (n + 1 - p.gamma) / (2 * p.beta)
    expo = lambda u: (2 * n + 2 - 2 * p.gamma) * u - 2 * p.beta * u * u
    peak = expo(u_star)
    width = 1.0 / math.sqrt(p.beta)
    f = lambda u: math.exp(expo(u) - peak)
    val, _ = integrate.quad(f, u_star - 40 * width, u_star + 40 * width,
                            points=[u_star - width, u_star, u_star + width],
                            epsabs=epsabs, epsrel=epsrel, limit=400)
    return LogReal(math.log(2 * val) + peak)


def fock_norm(p, F):
    """sqrt(sum_k ||z^k||^2 |d_k|^2) for F given by Laurent coefficients."""
    if isinstance(F, LaurentWindow):
        ks = F.indices
        log_d = LogComplex.from_complex(F.coeffs).log_mag
    else:
        ks, dlog = F
        log_d = np.asarray(dlog.log_mag)
        ks = np.asarray(ks)
    terms = np.asarray(fock_monomial_norm_sq(p, ks).log) + 2 * np.asarray(log_d)
    return LogReal(0.5 * log_sum_exp_real(terms))


def fock_kernel_norm(p, w):
    """||K_w||, K_w(z) = sum_n (z conj(w))^n / ||z^n||^2, truncated far into the Gaussian tail."""
    w = complex(w)
    if w == 0:
        raise SingularityError("kernel norm requested at the origin")
    la = math.log(abs(w))
    centre = 2 * p.beta * la + p.gamma - 1
    span = math.ceil(math.sqrt(2 * p.beta * 90.0)) + 3
    ns = np.arange(math.floor(centre) - span, math.ceil(centre) + span + 1)
    terms = 2 * ns * la - np.asarray(fock_monomial_norm_sq(p, ns).log)
    return LogReal(0.5 * log_sum_exp_real(terms))


def fock_kernel_envelope_log_ratio(p, w):
    """log of ||K_w|| |w| e^{-phi(w)}."""
    la = math.log(abs(w))
    return fock_kernel_norm(p, w).log + la - float(p.phi(la))


def dilation_param(p):
    """c with 2 beta log c + gamma = 0."""
    return math.exp(-p.gamma / (2 * p.beta))


def dilation_constant(p):
    """
    kappa with ||F||_{beta,gamma} = kappa ||F(c .)||_{beta,0} for c = dilation_param(p).

    Comparing the monomial weights gives kappa = c^{1 - gamma/2}.
    """
    return dilation_param(p) ** (1 - p.gamma / 2)


# ---------------------------------------------------------------------------
# coincidence H_{a,b} = F_{beta,gamma}

#: largest |log r| of an extraction circle; beyond this the radius is clamped
EXTRACTION_LOG_RADIUS = 60.0


def _next_pow2(n):
    return 1 << max(1, int(math.ceil(math.log2(max(n, 2)))))


def hab_laurent_coefficients(F, ks, count=None, fock=None, max_log_radius=EXTRACTION_LOG_RADIUS,
                             alias_tol=1e-10):
    """
    Laurent coefficients d_k of F in H_{a,b}, one circle per k.

    Circle k has log r = (k + 1 - gamma) / (2 beta), the radius where the
    k-th term of a Fock-space function dominates, clamped to
    |log r| <= max_log_radius.  Returns (ks, LogComplex d_k).
    """
    p = F.params
    if fock is None:
        fock = derive_fock_params(p)
    ks = np.asarray(ks, dtype=int)
    if count is None:
        count = _next_pow2(4 * len(ks))
    coeff = LogComplex.from_complex(F.coeffs)
    theta = 2 * np.pi * np.arange(count) / count
    mags, phases = [], []
    for k in ks:
        log_r = (k + 1 - fock.gamma) / (2 * fock.beta)
        log_r = float(np.clip(log_r, -max_log_radius, max_log_radius))
        z = np.exp(log_r + 1j * theta)
        samples = _hab_eval_log(p, coeff, F.indices, z)
        d = circle_coefficients_log(samples, log_r, [k], alias_tol=alias_tol)
        mags.append(float(np.asarray(d.log_mag)[0]))
        phases.append(float(np.asarray(d.phase)[0]))
    return ks, LogComplex(np.array(mags), np.array(phases))


def coincidence_ratio(p, coeffs, k_band, n_min=None, count=None):
    """
    ||F||_{beta,gamma} / ||(c_n)||_{l^2} for F = G(z) sum c_n e^{a n}/(z + w_n).

    ``k_band`` Laurent coefficients centred on k = 0 are extracted (see
    ``hab_laurent_coefficients``) and weighted by the monomial norms.
    ``n_min`` defaults to centring the coefficient support on 0.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if n_min is None:
        n_min = -(coeffs.size // 2)
    F = HabElement(p, coeffs, n_min)
    fock = derive_fock_params(p)
    half = (int(k_band) - 1) // 2
    ks = np.arange(-half, int(k_band) - half)
    ks, d = hab_laurent_coefficients(F, ks, count=count, fock=fock)
    return math.exp(fock_norm(fock, (ks, d)).log) / float(np.linalg.norm(coeffs))
