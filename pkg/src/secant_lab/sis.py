"""
The shift-invariant space V^2(g) = { sum_n c_n g(. - n) : c in l^2 }.

Sampling bounds are computed on finite sections of the bi-infinite sample
matrix U[m, n] = g(lambda_m + x - n).  For the lower bound the coefficient
window n in [-N, N] is fixed and *every* sample within M decay lengths of it
is kept; restricting to a subspace of coefficients while keeping all
relevant rows gives Rayleigh quotients that converge to the true sampling
constant from above as N grows.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import EmptySectionError, InconsistentDataError, ParameterError
from .numerics import integrate_line
from .windows import eval_window, stability_constants

LAYOUTS = ("sampling", "interpolation")


@dataclass
class SisElement:
    """f = sum_{n = n_min}^{n_min + len(coeffs) - 1} c_n g(. - n)."""

    window: object
    coeffs: np.ndarray
    n_min: int = 0

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_min + self.coeffs.size)

    def __call__(self, x):
        return eval_sis(self, x)


def eval_sis(f, x):
    x = np.asarray(x, dtype=float)
    vals = eval_window(f.window, x[..., None] - f.indices)
    out = np.asarray(vals) @ f.coeffs
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SamplingProblem:
    """
    Finite section of the sampling problem for Lambda + x_shift.

    ``layout="sampling"``: columns n in [-N, N], rows every sample in
    [-N - M, N + M] (tall section, used for lower sampling bounds).
    ``layout="interpolation"``: rows are the samples in [-N, N], columns
    n in [-N - M, N + M] (wide section, used to solve interpolation).
    ``M = None`` selects the window margin ceil(20 / min(s, t)).
    """

    window: object
    pointset: object
    x_shift: float = 0.0
    N: int = 20
    M: int = None
    layout: str = "sampling"

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N must be >= 1")
        if self.layout not in LAYOUTS:
            raise ParameterError(f"layout must be one of {LAYOUTS}")
        if self.M is None:
            object.__setattr__(self, "M", int(self.window.margin()))
        if self.M < 0:
            raise ParameterError("margin M must be non-negative")

    @property
    def columns(self):
        span = self.N if self.layout == "sampling" else self.N + self.M
        return np.arange(-span, span + 1)

    @property
    def sample_points(self):
        """lambda_m + x_shift for every admissible row."""
        span = self.N + self.M if self.layout == "sampling" else self.N
        pts = self.pointset.points(-span - self.x_shift, span - self.x_shift)
        return pts + self.x_shift

    def with_N(self, N):
        return SamplingProblem(self.window, self.pointset, self.x_shift, int(N), self.M,
                               self.layout)


def sample_matrix(p):
    """U[m, n] = g(lambda_m + x - n) on the admissible section."""
    rows = p.sample_points
    if rows.size == 0:
        raise EmptySectionError("no admissible samples in the section")
    return np.asarray(eval_window(p.window, rows[:, None] - p.columns[None, :]),
                      dtype=complex)


@dataclass
class BoundsReport:
    """
    Lower/upper sampling-bound estimates along a ladder of section sizes.

    ``A``/``B`` are relative to ||f||^2 in L^2 (exact for the section,
    via the Gram matrix of the translates).  ``A_coef``/``B_coef`` are the
    squared extremal singular values of U, i.e. relative to ||c||^2, and
    ``A_bracket``/``B_bracket`` the rigorous conversions
    A_coef / C2^2 <= A and B <= B_coef / C1^2.
    """

    N_ladder: np.ndarray
    A: np.ndarray
    B: np.ndarray
    A_coef: np.ndarray
    B_coef: np.ndarray
    C1: float
    C2: float
    margin: int
    rows: np.ndarray = field(default=None)

    @property
    def A_est(self):
        return float(self.A[-1])

    @property
    def B_est(self):
        return float(self.B[-1])

    @property
    def A_bracket(self):
        return self.A_coef / self.C2 ** 2

    @property
    def B_bracket(self):
        return self.B_coef / self.C1 ** 2

    def ladder_ratio(self):
        """A at the last rung divided by A at the previous one."""
        if len(self.A) < 2:
            return float("nan")
        return float(self.A[-1] / self.A[-2]) if self.A[-2] > 0 else 0.0


def _pencil_extremes(U, gram):
    """Extremal values of ||U c||^2 / (c* gram c)."""
    L = cholesky(gram, lower=True)
    # U L^{-*} has the same singular values as the pencil square roots
    V = solve_triangular(L, U.conj().T, lower=True).conj().T
    s = np.linalg.svd(V, compute_uv=False)
    return float(s[-1] ** 2), float(s[0] ** 2)


def sampling_bounds(problem, N_ladder=None, stability=None):
    """
    Sampling constants of Lambda + x for V^2(g) along an N ladder.

    Parameters
    ----------
    problem : SamplingProblem
        Supplies window, point set, shift and margin; its ``N`` is used when
        ``N_ladder`` is omitted.
    N_ladder : sequence of int, optional
    stability : StabilityReport, optional
        Reused when given, otherwise computed (it also supplies the Gram
        matrix of the translates).

    Returns
    -------
    BoundsReport
    """
    if problem.layout != "sampling":
        raise ParameterError("sampling_bounds needs the sampling layout")
    if stability is None:
        stability = stability_constants(problem.window)
    ladder = np.atleast_1d(np.asarray(N_ladder if N_ladder is not None else [problem.N],
                                      dtype=int))
    A, B, Ac, Bc, rows = [], [], [], [], []
    for N in ladder:
        p = problem.with_N(N)
        U = sample_matrix(p)
        gram = stability.gram_section(2 * int(N) + 1)
        lo, hi = _pencil_extremes(U, gram)
        s = np.linalg.svd(U, compute_uv=False)
        A.append(lo)
        B.append(hi)
        Ac.append(float(s[-1] ** 2) if U.shape[0] >= U.shape[1] else 0.0)
        Bc.append(float(s[0] ** 2))
        rows.append(U.shape[0])
    return BoundsReport(ladder, np.array(A), np.array(B), np.array(Ac), np.array(Bc),
                        stability.C1, stability.C2, problem.M, np.array(rows))


@dataclass
class InterpolationResult:
    element: SisElement
    residual: float
    condition: float


def interpolate(problem, values, reg=1e-10, tol=1e-8):
    """
    Tikhonov-regularised least-squares solution of U c = values.

    ``values`` is indexed like ``problem.sample_points``.  The minimiser of
    ||U c - a||^2 + reg ||c||^2 is formed from the SVD of U, so for
    ``reg -> 0`` it tends to the minimum-norm least-squares solution.

    Raises
    ------
    InconsistentDataError
        When ``reg == 0``, U is well conditioned (cond < 1e8) and the
        relative residual still exceeds ``tol``.
    """
    if reg < 0:
        raise ParameterError("reg must be non-negative")
    U = sample_matrix(problem)
    a = np.asarray(values, dtype=complex)
    if a.shape != (U.shape[0],):
        raise ParameterError(f"expected {U.shape[0]} values, got {a.shape}")
    W, s, Vh = np.linalg.svd(U, full_matrices=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        filt = np.where(s > 0, s / (s ** 2 + reg), 0.0)
    c = Vh.conj().T @ (filt * (W.conj().T @ a))
    resid = float(np.linalg.norm(U @ c - a))
    scale = max(float(np.linalg.norm(a)), 1e-300)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    if reg == 0 and cond < 1e8 and resid > tol * scale:
        raise InconsistentDataError(
            f"relative residual {resid / scale:.2e} exceeds {tol:g}; data not in the range")
    cols = problem.columns
    return InterpolationResult(SisElement(problem.window, c, int(cols[0])), resid, cond)


@dataclass
class ReconstructionResult:
    element: SisElement
    residual: float
    sample_residual: float
    grid: np.ndarray


def reconstruct(problem, samples, reg=1e-10, reference=None, grid_step=0.05,
                interior=0.5):
    """
    Recover f from its samples on the section and measure the error.

    If ``reference`` (a callable, typically the true element) is supplied,
    ``residual`` is the maximum of |f_rec - reference| on a grid of step
    ``grid_step`` over the interior ``[-interior*N, interior*N]``; otherwise
    it equals the sample residual.
    """
    res = interpolate(problem, samples, reg=reg)
    half = interior * problem.N
    grid = np.arange(-half, half + grid_step / 2, grid_step)
    if reference is not None:
        err = float(np.max(np.abs(eval_sis(res.element, grid) - reference(grid))))
    else:
        err = res.residual
    return ReconstructionResult(res.element, err, res.residual, grid)


def coefficient_norm_ratio(f, stability=None, tol=1e-12):
    """||f||_{L^2} / ||c||_{l^2}, the L^2 norm taken by quadrature."""
    w = f.window
    idx = f.indices
    centre = 0.5 * (idx[0] + idx[-1])
    half = w.support_half_width(tol) + 0.5 * (idx[-1] - idx[0])
    val = integrate_line(lambda x: np.abs(eval_sis(f, x)) ** 2, 2 * w.decay_rate, tol,
                         center=centre, half_width=half).real
    return math.sqrt(val) / float(np.linalg.norm(f.coeffs))
