"""
Window functions of hyperbolic secant type and complex Gaussians.

    g(x) = 1 / (cf * exp(a x) + cb * exp(-b x)),   Re a, Re b > 0
    g(x) = amp * exp(-(alpha + i sigma) x^2),       alpha > 0
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize
from scipy.linalg import toeplitz

from .errors import ParameterError, UnstableGeneratorError
from .numerics import integrate_line

#: time-frequency shift conventions; ``reflected`` is e^{-2 pi i y t} g(x - t)
CONVENTIONS = ("reflected", "standard_translate")


def _scalar_or_array(out):
    if np.ndim(out) == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class SecantWindow:
    a: complex
    b: complex
    coeff_front: complex = 1.0
    coeff_back: complex = 1.0

    def __post_init__(self):
        for name in ("a", "b", "coeff_front", "coeff_back"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if not (self.a.real > 0 and self.b.real > 0):
            raise ParameterError("secant window needs Re a > 0 and Re b > 0")
        if self.coeff_front == 0 or self.coeff_back == 0:
            raise ParameterError("secant coefficients must be nonzero")
        _check_denominator(self)

    @property
    def s(self):
        return self.a.real

    @property
    def t(self):
        return self.b.real

    @property
    def decay_rate(self):
        return min(self.s, self.t)

    @property
    def is_unit(self):
        return self.coeff_front == 1 and self.coeff_back == 1

    def __call__(self, x):
        return eval_window(self, x)

    def margin(self):
        """Index margin after which the window has decayed below ~2e-9."""
        return int(math.ceil(20.0 / self.decay_rate))

    def support_half_width(self, tol):
        return math.log(10.0 / tol) / self.decay_rate

    def conj(self):
        return SecantWindow(self.a.conjugate(), self.b.conjugate(),
                            self.coeff_front.conjugate(), self.coeff_back.conjugate())

    def reflect(self):
        """x -> -x."""
        return SecantWindow(self.b, self.a, self.coeff_back, self.coeff_front)

    def dilate(self, c):
        """Unitary dilation x -> c^{-1/2} g(x / c)."""
        c = float(c)
        root = math.sqrt(c)
        return SecantWindow(self.a / c, self.b / c,
                            self.coeff_front * root, self.coeff_back * root)

    def fourier_window(self):
        """
        Closed form of the Fourier transform as another secant-type window.

        For unit coefficients and c = a + b,
        ghat(xi) = (pi/c) / sin(pi (b - 2 pi i xi) / c), which is
        1 / (cf' e^{a' xi} + cb' e^{-a' xi}) with a' = 2 pi^2 / c.
        """
        if not self.is_unit:
            raise NotImplementedError("closed form only for unit coefficients")
        c = self.a + self.b
        ap = 2 * np.pi ** 2 / c
        lead = c / (2j * np.pi)
        phase = np.exp(1j * np.pi * self.b / c)
        return SecantWindow(ap, ap, lead * phase, -lead / phase)

    def to_json(self):
        out = {"kind": "secant", "a": [self.a.real, self.a.imag],
               "b": [self.b.real, self.b.imag]}
        if not self.is_unit:
            out["coeff_front"] = [self.coeff_front.real, self.coeff_front.imag]
            out["coeff_back"] = [self.coeff_back.real, self.coeff_back.imag]
        return out


@dataclass(frozen=True)
class GaussianWindow:
    alpha: float
    sigma: float = 0.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("Gaussian window needs alpha > 0")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    def __call__(self, x):
        return eval_window(self, x)

    @property
    def decay_rate(self):
        # exp(-alpha x^2) <= exp(-alpha |x|) for |x| >= 1
        return self.alpha

    def margin(self):
        return int(math.ceil(math.sqrt(20.0 / self.alpha)))

    def support_half_width(self, tol):
        return math.sqrt(math.log(10.0 / tol) / self.alpha)

    def conj(self):
        return GaussianWindow(self.alpha, -self.sigma, self.amplitude.conjugate())

    def reflect(self):
        return self

    def dilate(self, c):
        c = float(c)
        return GaussianWindow(self.alpha / c ** 2, self.sigma / c ** 2,
                              self.amplitude / math.sqrt(c))

    def to_json(self):
        return {"kind": "gaussian", "alpha": self.alpha, "sigma": self.sigma}


def window_from_json(spec):
    """Build a window from its config form."""
    spec = dict(spec)
    kind = spec.pop("kind", None)

    def cplx(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1] if len(v) > 1 else 0.0)
        return complex(v)

    if kind == "secant":
        return SecantWindow(cplx(spec["a"]), cplx(spec["b"]),
                            cplx(spec.get("coeff_front", 1.0)),
                            cplx(spec.get("coeff_back", 1.0)))
    if kind == "gaussian":
        return GaussianWindow(float(spec["alpha"]), float(spec.get("sigma", 0.0)))
    raise ParameterError(f"unknown window kind {kind!r}")


def _denominator_ratio(w, x):
    # |cf e^{(a+b)x} + cb| / (|cf e^{(a+b)x}| + |cb|), scale-free in [0, 1]
    e = np.exp((w.a + w.b) * x)
    return np.abs(w.coeff_front * e + w.coeff_back) / (
        np.abs(w.coeff_front * e) + abs(w.coeff_back))


def _check_denominator(w):
    # roots can only sit where |cf| e^{s x} and |cb| e^{-t x} are within e^{+-20}
    st = w.s + w.t
    centre = math.log(abs(w.coeff_back) / abs(w.coeff_front)) / st
    lo, hi = centre - 20.0 / st, centre + 20.0 / st
    step = 0.01
    xs = np.arange(lo, hi + step, step)
    ratio = _denominator_ratio(w, xs)
    k = int(np.argmin(ratio))
    res = optimize.minimize_scalar(lambda x: float(_denominator_ratio(w, x)),
                                   bounds=(xs[k] - step, xs[k] + step),
                                   method="bounded", options={"xatol": 1e-14})
    best = min(float(ratio[k]), float(res.fun))
    if best < 1e-10:
        raise ParameterError(
            f"window denominator vanishes near x = {res.x:.6g}")


def eval_window(w, x):
    """
    Pointwise window values.

    The secant branch uses e^{-ax}/(cf + cb e^{-(a+b)x}) for x > 0 and the
    mirrored form for x <= 0, so large |x| never overflows.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(w, GaussianWindow):
        return _scalar_or_array(w.amplitude * np.exp(-(w.alpha + 1j * w.sigma) * x * x))
    c = w.a + w.b
    ax = np.abs(x)
    pos = x > 0
    with np.errstate(over="ignore", under="ignore"):
        tail = np.exp(-c * ax)
        right = np.exp(-w.a * ax) / (w.coeff_front + w.coeff_back * tail)
        left = np.exp(-w.b * ax) / (w.coeff_front * tail + w.coeff_back)
    return _scalar_or_array(np.where(pos, right, left))


def fourier_transform(w, xi, tol=1e-10):
    """ghat(xi) = int g(x) exp(-2 pi i xi x) dx by quadrature."""
    xi = float(xi)

    def integrand(x):
        return eval_window(w, x) * np.exp(-2j * np.pi * xi * x)

    return integrate_line(integrand, w.decay_rate, tol,
                          half_width=w.support_half_width(tol))


def amalgam_norm(w, k_range=20, samples_per_cell=201):
    """
    Upper bound for sum_k max_{[k, k+1]} |g|.

    Cells with |k| <= k_range are maximised on a grid with local
    refinement; the remaining cells are bounded by the geometric series
    coming from |g(x)| <= e^{-m|x|} / (|c_dom| - |c_sub| e^{-(s+t)K}),
    m = min(Re a, Re b).
    """
    if k_range < 1:
        raise ParameterError("k_range must be >= 1")
    total = 0.0
    for k in range(-k_range, k_range + 1):
        xs = np.linspace(k, k + 1, samples_per_cell)
        vals = np.abs(eval_window(w, xs))
        j = int(np.argmax(vals))
        lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, len(xs) - 1)]
        res = optimize.minimize_scalar(lambda x: -abs(eval_window(w, x)),
                                       bounds=(lo, hi), method="bounded")
        total += max(float(vals[j]), -float(res.fun))
    return total + amalgam_tail_bound(w, k_range)


def amalgam_tail_bound(w, k_range):
    m = w.decay_rate
    if isinstance(w, GaussianWindow):
        head = abs(w.amplitude) * math.exp(-w.alpha * (k_range + 1) ** 2)
        return 2 * head / (1 - math.exp(-w.alpha))
    K = k_range + 1
    damp = math.exp(-(w.s + w.t) * K)
    right_den = abs(w.coeff_front) - abs(w.coeff_back) * damp
    left_den = abs(w.coeff_back) - abs(w.coeff_front) * damp
    if right_den <= 0 or left_den <= 0:
        raise ParameterError("k_range too small for the tail bound")
    geo = math.exp(-m * K) / (1 - math.exp(-m))
    return geo / right_den + geo / left_den


@dataclass
class StabilityReport:
    """Riesz bounds of the integer translates: C1 ||c|| <= ||sum c_n g(.-n)|| <= C2 ||c||."""

    C1: float
    C2: float
    grid_size: int
    correlation_decay: float
    correlations: np.ndarray = field(repr=False)
    theta_min: float = 0.0
    theta_max: float = 0.0

    def __post_init__(self):
        if not 0 < self.C1 <= self.C2 < np.inf:
            raise ParameterError("stability constants must satisfy 0 < C1 <= C2")

    @property
    def cutoff(self):
        return len(self.correlations) - 1

    def symbol(self, theta):
        return correlation_symbol(self.correlations, theta)

    def gram_section(self, size):
        """Gram matrix G[m, n] = <g(. - n), g(. - m)> for n, m in one index window."""
        col = np.zeros(size, dtype=complex)
        J = min(size - 1, self.cutoff)
        col[:J + 1] = self.correlations[:J + 1]
        return toeplitz(col, col.conj())


def translate_correlation(w, j, tol=1e-12):
    """gamma_j = int g(x) conj(g(x - j)) dx."""

    def integrand(x):
        return eval_window(w, x) * np.conj(eval_window(w, x - j))

    return integrate_line(integrand, w.decay_rate, tol, center=0.5 * j,
                          half_width=w.support_half_width(tol) + 0.5 * abs(j))


def correlation_symbol(gammas, theta):
    """sigma(theta) = sum_j gamma_j e^{i j theta} using gamma_{-j} = conj(gamma_j)."""
    theta = np.asarray(theta, dtype=float)
    j = np.arange(1, len(gammas))
    phases = np.exp(1j * np.multiply.outer(theta, j))
    out = gammas[0].real + 2 * np.real(phases @ gammas[1:])
    return float(out) if out.ndim == 0 else out


def stability_constants(w, theta_grid=256, tol=1e-10, max_cutoff=600):
    """
    Stability constants from the translate-correlation symbol.

    Correlations gamma_j are computed by quadrature until the neglected tail
    of sum |gamma_j| is below tol * sigma_min / 10.  The symbol is evaluated
    on ``theta_grid`` points and its extrema are polished by bounded 1-D
    optimisation around the best grid points.

    Raises
    ------
    UnstableGeneratorError
        If the symbol minimum is not positive within tolerance.
    """
    if theta_grid < 64:
        raise ParameterError("theta_grid must be >= 64")
    quad_tol = tol * 1e-2
    thetas = 2 * np.pi * np.arange(theta_grid) / theta_grid
    gammas = [translate_correlation(w, 0, quad_tol)]
    g0 = gammas[0].real
    rate = w.decay_rate
    j = 0
    while True:
        j += 1
        gammas.append(translate_correlation(w, j, quad_tol))
        if j < 3:
            continue
        mags = np.abs(gammas[-3:])
        ratio = mags[2] / mags[1] if mags[1] > 0 else 0.0
        ratio = min(max(ratio, math.exp(-rate)), 0.999) if ratio > 0 else 0.0
        tail = 2 * mags[2] * ratio / (1 - ratio)
        sym_min = float(np.min(correlation_symbol(np.array(gammas), thetas)))
        if tail < tol * max(sym_min, tol * g0) / 10 or mags[2] < 1e-18 * g0:
            break
        if j >= max_cutoff:
            raise UnstableGeneratorError(
                "correlation tail did not fall below tolerance; window decays too slowly")
    gammas = np.array(gammas)
    sym = correlation_symbol(gammas, thetas)
    step = 2 * np.pi / theta_grid

    def polish(k, sign):
        res = optimize.minimize_scalar(lambda th: sign * correlation_symbol(gammas, th),
                                       bounds=(thetas[k] - step, thetas[k] + step),
                                       method="bounded", options={"xatol": 1e-12})
        if sign * res.fun < sign * sym[k]:
            return float(sign * res.fun), float(res.x)
        return float(sym[k]), float(thetas[k])

    smin, th_min = polish(int(np.argmin(sym)), 1.0)
    smax, th_max = polish(int(np.argmax(sym)), -1.0)
    if smin <= 10 * tol * g0:
        raise UnstableGeneratorError(
            f"symbol minimum {smin:.3e} is not positive; translates are not stable")
    decay = -math.log(abs(gammas[-1]) / abs(gammas[-2])) if abs(gammas[-2]) > 0 else np.inf
    return StabilityReport(C1=math.sqrt(smin), C2=math.sqrt(smax), grid_size=theta_grid,
                           correlation_decay=decay, correlations=gammas,
                           theta_min=th_min, theta_max=th_max)


def tf_shift(g, x, y, convention="reflected"):
    """
    Time-frequency shift of ``g`` as a vectorised closure.

    reflected:    t -> exp(-2 pi i y t) g(x - t)
    standard_translate: t -> exp(2 pi i y t) g(t - x)
    """
    if convention not in CONVENTIONS:
        raise ParameterError(f"unknown convention {convention!r}")
    if convention == "reflected":
        def shifted(t):
            t = np.asarray(t, dtype=float)
            return np.exp(-2j * np.pi * y * t) * eval_window(g, x - t)
    else:
        def shifted(t):
            t = np.asarray(t, dtype=float)
            return np.exp(2j * np.pi * y * t) * eval_window(g, t - x)
    return shifted


def l2_norm(f, decay_rate, tol=1e-12, center=0.0, half_width=None):
    val = integrate_line(lambda t: np.abs(f(t)) ** 2, 2 * decay_rate, tol,
                         center=center, half_width=half_width)
    return math.sqrt(val.real)
