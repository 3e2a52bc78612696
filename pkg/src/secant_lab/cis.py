"""
Complete interpolating sequences: averaged-deviation criteria and a
finite-section oracle.

Two criteria share one engine.  For V^2(g) and Lambda = {n + delta_n}, Lambda
is a CIS iff delta is bounded, Lambda is separated and for some index shift
and N >= 1

    sup_n | (1/N) sum_{k=n+1}^{n+N} (delta_k - (s - t) / (2(s + t))) | < 1/2.

For F_{beta,0} and moduli exp(n/(2 beta) + delta_n) the same form applies
with threshold 1/(4 beta), plus logarithmic separation.
"""
from dataclasses import dataclass, asdict
import math

import numpy as np

from .cauchyfock import derive_fock_params
from .errors import EmptySectionError, InconsistencyError, ParameterError
from .sequences import PointSet1D, enumerate_deltas, separation
from .windows import eval_window

#: verdicts this close to the threshold are reported as critical
CRITICAL_EPS = 1e-9
FAILED_CONDITIONS = ("separation", "log_separation", "bounded_delta", "average")


@dataclass
class CisVerdict:
    is_cis: bool
    witness_N: int = None
    witness_shift: int = None
    margin: float = 0.0
    failed_condition: str = None
    critical: bool = False
    sup_average: float = None
    threshold: float = None
    method: str = "exhaustive"

    def __post_init__(self):
        if self.is_cis and self.witness_N is None:
            raise ParameterError("a positive verdict needs a witness N")
        if self.is_cis and self.margin <= 0:
            raise ParameterError("a positive verdict needs a positive margin")
        if self.failed_condition is not None and self.failed_condition not in FAILED_CONDITIONS:
            raise ParameterError(f"unknown failed condition {self.failed_condition!r}")

    def to_json(self):
        out = asdict(self)
        return {k: (float(v) if isinstance(v, np.floating) else v) for k, v in out.items()}


def _sliding_sup_abs_mean(d, N):
    """sup over windows of length N (fully inside d) of |mean|."""
    cs = np.concatenate([[0.0], np.cumsum(d)])
    sums = cs[N:] - cs[:-N]
    return float(np.max(np.abs(sums))) / N


def _search_averages(deltas_by_shift, threshold, N_max):
    """
    Exhaustive search over shifts and N <= N_max.

    Returns ``(best, first)``: ``best = (sup, N, shift)`` is the smallest
    sup-average found and decides the verdict; ``first`` is the passing pair
    with the smallest N (then smallest |shift|), or None.
    """
    best = (np.inf, None, None)
    first = None
    shifts = sorted(deltas_by_shift, key=lambda j: (abs(j), j))
    for N in range(1, N_max + 1):
        for j in shifts:
            d = deltas_by_shift[j]
            if N > d.size:
                continue
            val = _sliding_sup_abs_mean(d, N)
            if val < best[0] - 1e-15:
                best = (val, N, j)
            if first is None and val < threshold - CRITICAL_EPS:
                first = (val, N, j)
    return best, first


def _verdict_from_average(search, threshold, method):
    (val, N, j), first = search
    margin = threshold - val
    if abs(margin) <= CRITICAL_EPS:
        return CisVerdict(False, None, None, margin, "average", True, val, threshold, method)
    if margin > 0:
        wval, wN, wj = first
        return CisVerdict(True, wN, wj, threshold - wval, None, False, wval, threshold, method)
    return CisVerdict(False, None, None, margin, "average", False, val, threshold, method)


def _periodic_best(period_deltas, shifts, shift_step, threshold):
    """
    Exact path for a delta sequence with period q.

    The N-window averages of a q-periodic sequence average (over n) to the
    period mean, so sup_n |avg| >= |mean| for every N and N = q attains it.
    A shift by j changes every delta by j * shift_step.  Windows over fewer
    indices are examined on three tiled periods, which is exact for N <= q.
    """
    q = len(period_deltas)
    tiled = {j: np.tile(period_deltas, 3) + j * shift_step for j in shifts}
    return _search_averages(tiled, threshold, q)


@dataclass
class LogSequence:
    """
    Points exp(n/(2 beta) + delta_n + i theta_n) indexed by consecutive n.

    ``period`` (optional) declares delta_{n+q} = delta_n and
    theta_{n+q} = theta_n; then ``delta``/``theta`` may hold a single period
    starting at ``n_min``.
    """

    beta: float
    delta: np.ndarray
    theta: np.ndarray = None
    n_min: int = 0
    period: int = None

    def __post_init__(self):
        self.delta = np.atleast_1d(np.asarray(self.delta, dtype=float))
        if self.theta is None:
            self.theta = np.zeros_like(self.delta)
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if self.theta.shape != self.delta.shape:
            raise ParameterError("delta and theta must have equal length")
        if not self.beta > 0:
            raise ParameterError("beta must be positive")
        if self.period is not None and self.period != self.delta.size:
            raise ParameterError("a periodic sequence stores exactly one period")

    def window(self, length):
        """(ns, delta, theta) over at least ``length`` consecutive indices."""
        if self.period is None:
            ns = np.arange(self.n_min, self.n_min + self.delta.size)
            return ns, self.delta, self.theta
        pad = int(math.ceil(2 * self.beta * float(np.max(np.abs(self.delta))))) + 1
        reps = max(1, math.ceil((length + 2 * pad) / self.period)) + 2
        start = self.n_min - self.period * math.ceil(pad / self.period + 1)
        ns = np.arange(start, start + reps * self.period)
        return ns, np.tile(self.delta, reps), np.tile(self.theta, reps)

    def log_moduli(self, ns, delta):
        return ns / (2 * self.beta) + delta


def _log_separation_constant(log_mod, theta, neighbours=8):
    """min |u_m - u_n| / max(|u_m|, |u_n|) over nearby pairs (sorted by modulus)."""
    best = np.inf
    for k in range(1, min(neighbours, log_mod.size - 1) + 1):
        l1, l2 = log_mod[:-k], log_mod[k:]
        top = np.maximum(l1, l2)
        diff = np.abs(np.exp(l1 - top + 1j * theta[:-k]) - np.exp(l2 - top + 1j * theta[k:]))
        best = min(best, float(np.min(diff)))
    return best


def check_compin(beta, seq, N_max=64, shift_max=3, delta_bound=None, sep_min=1e-12):
    """
    Averaged-deviation CIS test for F_{beta,0}.

    Parameters
    ----------
    beta : float
    seq : LogSequence
        Its ``beta`` must match.  Points are re-sorted by modulus and the
        deviations re-read against n / (2 beta) before testing.
    N_max, shift_max : int
        Search bounds for the window length and the enumeration shift.
    delta_bound : float, optional
        sup |delta_n| above this fails the boundedness check; defaults to
        10 / (2 beta).

    Returns
    -------
    CisVerdict
    """
    if not math.isclose(beta, seq.beta, rel_tol=1e-14):
        raise ParameterError("beta does not match the sequence parametrisation")
    if delta_bound is None:
        delta_bound = 10.0 / (2 * beta)
    threshold = 1.0 / (4 * beta)
    length = 4 * N_max + 2 * shift_max
    ns, delta, theta = seq.window(length)
    if ns.size < 4 * N_max:
        raise ParameterError(f"window of {ns.size} indices is shorter than 4 * N_max")
    log_mod = seq.log_moduli(ns, delta)
    order = np.argsort(log_mod, kind="stable")
    log_mod, theta = log_mod[order], theta[order]
    if np.any(np.diff(log_mod) <= 0):
        raise ParameterError("moduli are not strictly monotone after sorting")
    # near the ends of a finite window sorting can pull in points from
    # outside it; drop as many indices as the largest displacement
    trim = int(math.ceil(2 * beta * float(np.max(np.abs(delta))))) + 1 if delta.size else 0
    if ns.size - 2 * trim < 4 * N_max:
        raise ParameterError("window too short after trimming sorted edges")
    if trim:
        ns, log_mod, theta = ns[trim:-trim], log_mod[trim:-trim], theta[trim:-trim]
    if _log_separation_constant(log_mod, theta) <= sep_min:
        return CisVerdict(False, failed_condition="log_separation", threshold=threshold)
    delta_sorted = log_mod - ns / (2 * beta)
    if np.max(np.abs(delta_sorted)) > delta_bound:
        return CisVerdict(False, failed_condition="bounded_delta", threshold=threshold)
    step = 1.0 / (2 * beta)
    by_shift = {}
    for j in range(-shift_max, shift_max + 1):
        # re-enumeration lambda'_n = lambda_{n+j} moves every deviation by j / (2 beta)
        by_shift[j] = delta_sorted + j * step
    best = _search_averages(by_shift, threshold, N_max)
    verdict = _verdict_from_average(best, threshold, "exhaustive")
    if seq.period is not None:
        q = seq.period
        i0 = int(np.searchsorted(ns, seq.n_min))
        exact = _verdict_from_average(
            _periodic_best(delta_sorted[i0:i0 + q], range(-shift_max, shift_max + 1), step,
                           threshold),
            threshold, "periodic_exact")
        if exact.is_cis != verdict.is_cis or exact.critical != verdict.critical:
            raise InconsistencyError("periodic reduction disagrees with the exhaustive search")
        return exact
    return verdict


def _periodic_index_period(L):
    """Index period q of delta for a periodic point set of density 1, else None."""
    if L.kind != "periodic":
        return None
    q = len(L.offsets)
    if not math.isclose(L.period, q, rel_tol=0, abs_tol=1e-12):
        return None
    return q


def main2_offset(p):
    """The centring offset (s - t) / (2 (s + t)) of the averaged condition."""
    return (p.s - p.t) / (2 * (p.s + p.t))


def check_main2(p, L, N_max=64, shift_max=3, delta_bound=10.0, offset=None):
    """
    CIS test for V^2(g) with the offset (s - t) / (2 (s + t)) and threshold 1/2.

    ``p`` is anything with ``s`` and ``t`` (CauchyParams or SecantWindow).
    ``offset`` replaces the centring offset when given; for s != t the
    finite-section oracle is reproduced by ``-main2_offset(p)`` instead
    (see the project notes).  For periodic Lambda of density one the exact
    single-period reduction is also evaluated and must agree with the
    exhaustive search.
    """
    try:
        sep = separation(L)
    except ParameterError:
        sep = 0.0
    if not sep > 0:
        return CisVerdict(False, failed_condition="separation", threshold=0.5)
    if offset is None:
        offset = main2_offset(p)
    threshold = 0.5
    ns, base = enumerate_deltas(L, 0, bound=delta_bound, return_indices=True)
    if ns.size < 4 * N_max:
        raise ParameterError(f"only {ns.size} points in the window; need >= 4 * N_max")
    by_shift = {}
    for j in range(-shift_max, shift_max + 1):
        # enumerate_deltas(L, j) is the same sequence with every entry moved by j
        by_shift[j] = base + j - offset
    best = _search_averages(by_shift, threshold, N_max)
    verdict = _verdict_from_average(best, threshold, "exhaustive")
    q = _periodic_index_period(L)
    if q is not None:
        i0 = int(np.searchsorted(ns, 0))
        period = base[i0:i0 + q] - offset
        exact = _verdict_from_average(
            _periodic_best(period, range(-shift_max, shift_max + 1), 1.0, threshold),
            threshold, "periodic_exact")
        if exact.is_cis != verdict.is_cis or exact.critical != verdict.critical:
            raise InconsistencyError("periodic reduction disagrees with the exhaustive search")
        return exact
    return verdict


def to_log_sequence(p, L, fock=None):
    """
    Map Lambda to the dilated sequence c * exp((a + b) lambda_n) in F_{beta,0}.

    With lambda_n = n + delta_n the moduli are exp(n/(2 beta) + delta'_n),
    delta'_n = (delta_n - gamma) / (2 beta), and theta_n = Im(a + b) lambda_n.
    """
    if fock is None:
        fock = derive_fock_params(p)
    ns, base = enumerate_deltas(L, 0, return_indices=True)
    lam = ns + base
    delta = (base - fock.gamma) / (2 * fock.beta)
    theta = np.imag(p.a + p.b) * lam
    q = _periodic_index_period(L)
    if q is not None:
        i0 = int(np.searchsorted(ns, 0))
        return LogSequence(fock.beta, delta[i0:i0 + q], theta[i0:i0 + q], 0, q)
    return LogSequence(fock.beta, delta, theta, int(ns[0]))


def finite_section_condition(window, L, sizes, x_shift=0.0, shift=None, shift_max=3):
    """
    Condition numbers sigma_max / sigma_min of centred square sections.

    For size S the columns are n in [-S//2, -S//2 + S) and the rows the
    points lambda_{m + j} for the same m, where lambda_0 is the first point
    >= 0 of Lambda + x_shift.  A square Toeplitz-like section is only
    uniformly invertible under the enumeration that matches rows to
    columns (zero winding), so when ``shift`` is None the index shift j in
    [-shift_max, shift_max] with the best conditioned smallest section is
    selected and then kept for all sizes.  The choice uses no CIS formula.
    """
    sizes = np.asarray(sizes, dtype=int)
    if sizes.size == 0 or np.any(np.diff(sizes) <= 0):
        raise ParameterError("sizes must be increasing")
    shifted = L.translated(x_shift) if x_shift else L
    ns, base = enumerate_deltas(shifted, 0, return_indices=True)
    lam = dict(zip(ns.tolist(), (ns + base).tolist()))

    def cond(S, j):
        cols = np.arange(-(S // 2), -(S // 2) + S)
        try:
            rows = np.array([lam[m + j] for m in cols])
        except KeyError:
            raise EmptySectionError(f"point set window too small for section size {S}")
        U = np.asarray(eval_window(window, rows[:, None] - cols[None, :]))
        sv = np.linalg.svd(U, compute_uv=False)
        return sv[0] / sv[-1] if sv[-1] > 0 else np.inf

    if shift is None:
        shift = min(range(-shift_max, shift_max + 1),
                    key=lambda j: (cond(int(sizes[0]), j), abs(j)))
    return np.array([cond(int(S), shift) for S in sizes])


def classify_lattice_shifts(p, grid_step=1 / 16, window=200.0, N_max=64, shift_max=3,
                            offset=None):
    """
    The unique x in the grid for which Z + x is not a CIS.

    Raises
    ------
    InconsistencyError
        If no grid point or more than one grid point fails.
    """
    count = round(1 / grid_step)
    if not math.isclose(count * grid_step, 1.0, rel_tol=0, abs_tol=1e-12):
        raise ParameterError("grid_step must divide 1")
    failing = []
    for k in range(count):
        x = k / count
        v = check_main2(p, PointSet1D.lattice(1.0, x, window), N_max, shift_max, offset=offset)
        if not v.is_cis:
            failing.append(x)
    if len(failing) != 1:
        raise InconsistencyError(f"expected exactly one failing shift, got {failing}")
    return failing[0]
