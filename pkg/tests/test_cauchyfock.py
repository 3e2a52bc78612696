import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from secant_lab.cauchyfock import (CauchyParams, FockParams, HabElement, coincidence_ratio,
                                   derive_fock_params, dilation_constant, dilation_param,
                                   dist_to_zeros, eval_A, eval_G, fock_kernel_envelope_log_ratio,
                                   fock_kernel_norm, fock_monomial_norm_sq,
                                   fock_monomial_norm_sq_radial, fock_norm,
                                   generator_envelope_log_ratio, hab_eval, hab_kernel,
                                   hab_kernel_coeffs, hab_kernel_envelope_log_ratio,
                                   hab_laurent_coefficients, sis_kernel_sum, sis_via_hab)
from secant_lab.errors import SingularityError
from secant_lab.numerics import LaurentWindow, LogComplex
from secant_lab.sis import SisElement, eval_sis
from secant_lab.windows import SecantWindow

P11 = CauchyParams(1, 1)
P12 = CauchyParams(1, 2)
#: full-pipeline value for coeffs = e_0, a = b = 1 (checked against the series oracle below)
COINCIDENCE_E0 = 2.71711702


def _cval(L):
    return complex(L.to_complex())


def test_derive_fock_params():
    assert derive_fock_params(CauchyParams(1, 1)) == pytest.approx(FockParams(0.25, 1.0))
    fp = derive_fock_params(CauchyParams(1, 3))
    assert (fp.beta, fp.gamma) == pytest.approx((0.125, 0.75))
    fp = derive_fock_params(CauchyParams(1 + 5j, 2 - 7j))
    assert (fp.beta, fp.gamma) == pytest.approx((1 / 6, 5 / 6))


def test_eval_A_at_origin():
    assert abs(_cval(eval_A(P11, 0.0)) - 1) < 1e-15


def test_eval_A_truncated_product_oracle():
    z = math.exp(2)
    with mpmath.workdps(30):
        oracle = mpmath.nprod(lambda n: 1 + mpmath.e ** (2 - 2 * n), [1, 40])
    assert abs(_cval(eval_A(P11, z)) - float(oracle)) < 1e-12 * float(oracle)
    assert float(oracle) == pytest.approx(2.3188902154, abs=1e-9)


def test_eval_A_zero_at_first_node():
    assert LogComplex.is_zero(eval_A(P11, -P11.w(1)))


@pytest.mark.parametrize("p", [P11, P12, CauchyParams(1 + 0.5j, 2 - 1j)])
def test_generator_reciprocity(p):
    rng = np.random.default_rng(0)
    z = np.exp(rng.uniform(-8, 8, 100) + 1j * rng.uniform(-np.pi, np.pi, 100))
    lhs = eval_G(p, 1 / z)
    rhs = eval_G(p, z) / LogComplex.from_complex(z)
    ratio = np.exp(np.asarray(lhs.log_mag) - rhs.log_mag + 1j * (np.asarray(lhs.phase) - rhs.phase))
    assert np.max(np.abs(ratio - 1)) < 1e-10


def test_generator_zeros():
    for m in range(-3, 4):
        assert LogComplex.is_zero(eval_G(P11, -P11.w(m)))
    with pytest.raises(SingularityError):
        eval_G(P11, 0.0)


@pytest.mark.parametrize("p", [P11, P12])
def test_generator_envelope(p):
    rng = np.random.default_rng(1)
    w = np.exp(rng.uniform(-10, 10, 300) + 1j * rng.uniform(-np.pi, np.pi, 300))
    r = np.exp(generator_envelope_log_ratio(p, w))
    assert r.min() >= 0.1 and r.max() <= 10


def test_generator_against_mpmath_product():
    z = 0.7 - 1.3j
    with mpmath.workdps(30):
        q = mpmath.e ** -2
        A = lambda u: mpmath.nprod(lambda n: 1 + u * q ** n, [1, mpmath.inf])
        oracle = complex((1 + z) * A(z) * A(1 / mpmath.mpc(z)))
    assert abs(_cval(eval_G(P11, z)) - oracle) < 1e-12 * abs(oracle)


def _G_prime(p, z0, h=1e-5):
    f = lambda z: _cval(eval_G(p, z))
    return (f(z0 + h) - f(z0 - h) - 1j * (f(z0 + 1j * h) - f(z0 - 1j * h))) / (4 * h)


@pytest.mark.parametrize("m", [-1, 0, 2])
def test_single_term_removable_singularity(m):
    F = HabElement(P11, [1.0], m)
    node = -P11.w(m)
    expected = _G_prime(P11, node) * math.exp(m)
    got = _cval(hab_eval(F, node))
    assert abs(got - expected) < 1e-6 * abs(expected)
    near = _cval(hab_eval(F, node * (1 + 1e-9)))
    assert abs(near - got) < 1e-6 * abs(got)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (1 + 0.5j, 2 - 1j)])
def test_pointwise_identity_with_sis(a, b):
    rng = np.random.default_rng(2)
    p = CauchyParams(a, b)
    w = SecantWindow(a, b)
    for _ in range(20):
        c = rng.normal(size=7) + 1j * rng.normal(size=7)
        x = rng.uniform(-6, 6)
        ref = eval_sis(SisElement(w, c, -3), x)
        assert abs(sis_kernel_sum(p, c, x, -3) - ref) < 1e-10 * abs(ref)
        assert abs(sis_via_hab(HabElement(p, c, -3), x) - ref) < 1e-10 * abs(ref)


@settings(max_examples=25)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_hab_linearity(c, scale):
    z = 2.3 + 0.4j
    F1 = _cval(hab_eval(HabElement(P11, c, -1), z))
    F2 = _cval(hab_eval(HabElement(P11, np.asarray(c) * scale, -1), z))
    assert abs(F2 - scale * F1) <= 1e-12 * (1 + abs(scale * F1))


def test_kernel_at_node_is_single_term():
    m = 1
    ns, k = hab_kernel_coeffs(P11, -P11.w(m))
    vals = np.asarray(k.log_mag)
    assert np.all(np.isneginf(vals[ns != m]))
    expected = np.conj(_G_prime(P11, -P11.w(m))) * math.exp(2 * m * P11.s)
    # k_w = conj(G'(-w_m)) e^{2 m s} G(z) / (z + w_m); compare through the n = m coefficient
    coef = complex(k[np.flatnonzero(ns == m)[0]].to_complex()) * math.exp(m * P11.s)
    assert abs(coef - expected) < 1e-6 * abs(expected)


@pytest.mark.parametrize("p", [P11, P12])
def test_reproducing_property(p):
    rng = np.random.default_rng(3)
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    F = HabElement(p, c, -4)
    for w in (1.7 + 0.2j, -0.3 + 2.0j, 25.0 - 3.0j):
        ns, k = hab_kernel_coeffs(p, w)
        kk = np.zeros(9, dtype=complex)
        for j, n in enumerate(range(-4, 5)):
            if n in ns:
                kk[j] = complex(k[int(np.flatnonzero(ns == n)[0])].to_complex())
        pairing = np.sum(c * np.conj(kk))
        val = _cval(hab_eval(F, w))
        assert abs(pairing - val) < 1e-8 * abs(val)


def test_kernel_function_matches_its_own_value():
    w = 1.3 - 0.8j
    kw = _cval(hab_kernel(P11, w, w))
    ns, k = hab_kernel_coeffs(P11, w)
    assert abs(kw - np.sum(np.abs(k.to_complex()) ** 2)) < 1e-10 * abs(kw)


@pytest.mark.parametrize("p", [P11, P12])
def test_hab_kernel_envelope(p):
    la = np.linspace(-10, 10, 81)
    r = np.exp([hab_kernel_envelope_log_ratio(p, complex(math.exp(u) * cmath.exp(0.7j)))
                for u in la])
    assert r.min() >= 0.1 and r.max() <= 10


def test_monomial_norm_values():
    fp = FockParams(0.25, 1.0)
    assert math.exp(fock_monomial_norm_sq(fp, 0).log) == pytest.approx(math.sqrt(8 * math.pi))
    assert math.exp(fock_monomial_norm_sq(fp, 1).log) == pytest.approx(
        math.sqrt(8 * math.pi) * math.e ** 2)
    assert math.sqrt(8 * math.pi) == pytest.approx(5.0132565, abs=1e-7)
    assert math.sqrt(8 * math.pi) * math.e ** 2 == pytest.approx(37.0432339, abs=1e-7)


@pytest.mark.parametrize("fp", [FockParams(0.25, 1.0), FockParams(0.125, 0.75),
                                FockParams(0.4, 0.3)])
def test_monomial_norm_radial_oracle(fp):
    for n in range(-5, 6):
        closed = fock_monomial_norm_sq(fp, n).log
        quad = fock_monomial_norm_sq_radial(fp, n).log
        assert abs(math.expm1(quad - closed)) < 1e-6


def test_monomial_norm_minimum():
    fp = FockParams(0.25, 1.0)
    logs = [fock_monomial_norm_sq(fp, n).log for n in range(-5, 6)]
    assert int(np.argmin(logs)) - 5 == 0


def test_fock_norm_single_and_pythagoras():
    fp = FockParams(0.25, 1.0)
    one = LaurentWindow(0, 0, [1.0])
    assert fock_norm(fp, one).log == pytest.approx(0.5 * fock_monomial_norm_sq(fp, 0).log)
    both = LaurentWindow(0, 5, [1, 0, 0, 0, 0, 1])
    expected = math.exp(fock_monomial_norm_sq(fp, 0).log) + math.exp(fock_monomial_norm_sq(fp, 5).log)
    assert math.exp(2 * fock_norm(fp, both).log) == pytest.approx(expected, rel=1e-12)


def test_fock_norm_polar_quadrature_oracle():
    fp = FockParams(0.25, 1.0)
    rng = np.random.default_rng(4)
    d = rng.normal(size=5) + 1j * rng.normal(size=5)
    F = LaurentWindow(-2, 2, d)

    def radial(u):
        # (1/pi) int |F(r e^{it})|^2 dt, r = e^u, times r^2 e^{-2 phi(r)} (dm = r dr dt, dr = r du)
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        vals = np.abs(F(np.exp(u) * np.exp(1j * t))) ** 2
        return 2 * np.mean(vals) * math.exp(2 * u - 2 * float(fp.phi(u)))

    val, _ = integrate.quad(radial, -30, 30, limit=400, epsrel=1e-10)
    assert abs(math.exp(2 * fock_norm(fp, F).log) / val - 1) < 1e-5


def test_fock_kernel_norm_series_oracle():
    fp = FockParams(0.25, 1.0)
    series = sum(math.exp(-2 * n * n) for n in range(-10, 11)) / math.sqrt(8 * math.pi)
    assert series == pytest.approx(0.253596, abs=1e-6)
    assert math.exp(fock_kernel_norm(fp, 1.0).log) == pytest.approx(math.sqrt(series), rel=1e-12)
    assert math.exp(fock_kernel_norm(fp, 1.0).log) == pytest.approx(0.50358, abs=1e-5)


def test_fock_kernel_rotation_invariance():
    fp = FockParams(0.125, 0.75)
    base = fock_kernel_norm(fp, 3.0).log
    for t in (0.3, 1.9, -2.5):
        assert fock_kernel_norm(fp, 3.0 * cmath.exp(1j * t)).log == pytest.approx(base, abs=1e-14)


@pytest.mark.parametrize("fp", [FockParams(0.25, 1.0), FockParams(0.125, 0.75)])
def test_fock_kernel_envelope(fp):
    la = np.linspace(-10, 10, 201)
    r = np.exp([fock_kernel_envelope_log_ratio(fp, complex(math.exp(u))) for u in la])
    assert r.min() >= 0.1 and r.max() <= 10


def test_dilation_param():
    assert dilation_param(FockParams(0.25, 1.0)) == pytest.approx(math.exp(-2))
    assert dilation_param(FockParams(0.25, 0.0)) == 1.0


@pytest.mark.parametrize("fp", [FockParams(0.25, 1.0), FockParams(0.125, 0.75)])
def test_dilation_isometry_on_monomials(fp):
    c = dilation_param(fp)
    kappa = dilation_constant(fp)
    flat = FockParams(fp.beta, 0.0)
    for n in range(-4, 5):
        lhs = 0.5 * fock_monomial_norm_sq(fp, n).log
        # F = z^n, F(c z) = c^n z^n
        rhs = math.log(kappa) + n * math.log(c) + 0.5 * fock_monomial_norm_sq(flat, n).log
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_laurent_extraction_matches_fft_on_annulus():
    rng = np.random.default_rng(6)
    F = HabElement(P11, rng.normal(size=5), -2)
    ks = np.arange(-3, 4)
    ks, d = hab_laurent_coefficients(F, ks, fock=derive_fock_params(P11))
    ref = np.fft.fft([_cval(hab_eval(F, cmath.exp(2j * np.pi * j / 256))) for j in range(256)]) / 256
    for k, dk in zip(ks, d.to_complex()):
        assert abs(dk - ref[k % 256]) < 1e-9 * (1 + abs(ref[k % 256]))


def _e0_series_norm():
    # F = A(z) A(1/z) = prod (1 + z q^n)(1 + q^n / z), q = e^{-2}.  The Jacobi triple
    # product gives the Laurent coefficients h_k = K sum_{j >= k} (-1)^{j-k} q^{j(j+1)/2}
    # for k >= 0 and h_{-k} = h_k, with K = 1/(q; q)_inf.
    with mpmath.workdps(40):
        q = mpmath.e ** -2
        K = 1 / mpmath.qp(q, q)
        h = lambda k: K * mpmath.nsum(lambda j: (-1) ** (j - k) * q ** (j * (j + 1) / 2),
                                      [k, mpmath.inf])
        total = mpmath.mpf(0)
        for k in range(-30, 31):
            hk = h(abs(k))
            total += hk ** 2 * mpmath.sqrt(8 * mpmath.pi) * mpmath.e ** (2 * k * k)
        return float(mpmath.sqrt(total))


def test_coincidence_e0_baseline():
    oracle = _e0_series_norm()
    got = coincidence_ratio(P11, [1.0], 21)
    assert abs(got - oracle) < 1e-6 * oracle
    assert got == pytest.approx(COINCIDENCE_E0, abs=1e-7)


def test_coincidence_homogeneous_and_bounded():
    rng = np.random.default_rng(7)
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    r1 = coincidence_ratio(P11, c, 21)
    r2 = coincidence_ratio(P11, 2 * c, 21)
    assert r1 == pytest.approx(r2, rel=1e-10)
    assert 0.1 <= r1 <= 10


def test_dist_to_zeros():
    assert dist_to_zeros(P11, -math.exp(2.0) + 0.01) == pytest.approx(0.01)
