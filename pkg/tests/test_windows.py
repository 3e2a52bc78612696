import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secant_lab.errors import ParameterError
from secant_lab.windows import (GaussianWindow, SecantWindow, amalgam_norm, amalgam_tail_bound,
                                eval_window, fourier_transform, l2_norm, stability_constants,
                                tf_shift, window_from_json)

SECH_ONE = float(1 / (mpmath.exp(mpmath.pi) + mpmath.exp(-mpmath.pi)))


@pytest.fixture(scope="module")
def stab11():
    return stability_constants(SecantWindow(1, 1))


def test_eval_trivial_values():
    assert eval_window(SecantWindow(1, 1), 0.0) == pytest.approx(0.5)
    assert eval_window(GaussianWindow(math.pi), 0.0) == pytest.approx(1.0)


def test_eval_secant_pi_against_bigfloat():
    # high-precision oracle for 1/(e^pi + e^-pi)
    assert SECH_ONE == pytest.approx(0.0431333692, abs=1e-10)
    assert abs(eval_window(SecantWindow(math.pi, math.pi), 1.0) - SECH_ONE) < 1e-15


@settings(max_examples=60)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(-50, 50))
def test_eval_matches_naive_formula(sa, sb, ia, ib, x):
    w = SecantWindow(complex(sa, ia), complex(sb, ib))
    naive = 1 / (np.exp(w.a * x) + np.exp(-w.b * x))
    got = eval_window(w, x)
    assert abs(got - naive) <= 1e-13 * abs(naive)


@settings(max_examples=30)
@given(st.floats(0.2, 4), st.floats(0.2, 4))
def test_exponential_decay_bound(a, b):
    w = SecantWindow(a, b)
    x = np.linspace(-50, 50, 2001)
    env = np.abs(eval_window(w, x)) * np.exp(w.decay_rate * np.abs(x))
    assert np.all(env <= 1.0 + 1e-12)


def test_invalid_windows():
    with pytest.raises(ParameterError):
        SecantWindow(-1, 1)
    with pytest.raises(ParameterError):
        SecantWindow(1, 1, coeff_front=0)
    with pytest.raises(ParameterError):
        # e^x - e^{-x} vanishes at 0
        SecantWindow(1, 1, coeff_back=-1)
    with pytest.raises(ParameterError):
        GaussianWindow(-1.0)


def test_json_roundtrip():
    w = SecantWindow(1 + 0.5j, 2)
    assert window_from_json(w.to_json()) == w
    g = GaussianWindow(math.pi, 2.0)
    assert window_from_json(g.to_json()) == g


def test_fourier_transform_sech_pair():
    w = SecantWindow(math.pi, math.pi)
    assert abs(fourier_transform(w, 0.0) - 0.5) < 1e-10
    # sech(pi x)/2 is its own transform
    assert abs(fourier_transform(w, 1.0) - SECH_ONE) < 1e-10


def test_fourier_transform_conj_symmetry():
    w = SecantWindow(1, 1)
    for xi in (0.1, 0.37, 1.2):
        assert abs(fourier_transform(w, -xi) - np.conj(fourier_transform(w, xi))) < 1e-10


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (1 + 0.5j, 2 - 1j)])
def test_fourier_window_closed_form(a, b):
    w = SecantWindow(a, b)
    fw = w.fourier_window()
    for xi in (-0.7, 0.0, 0.3, 1.1):
        assert abs(eval_window(fw, xi) - fourier_transform(w, xi)) < 1e-9


def test_amalgam_norm():
    w = SecantWindow(1, 1)
    v20, v40 = amalgam_norm(w, 20), amalgam_norm(w, 40)
    assert math.isfinite(v20)
    assert abs(v20 - v40) < 1e-8
    assert v20 >= 0.5


def test_amalgam_tail_uses_min_decay():
    w = SecantWindow(1, 2)
    K = 11
    geo = math.exp(-K) / (1 - math.exp(-1))
    assert amalgam_tail_bound(w, 10) == pytest.approx(2 * geo / (1 - math.exp(-3 * K)))


def test_stability_constants_poisson_oracle(stab11):
    # sigma(theta) = sum_k |ghat(theta/(2 pi) + k)|^2 with ghat(xi) = (pi/2) sech(pi^2 xi)
    def symbol(theta):
        xi = theta / (2 * math.pi) + np.arange(-20, 21)
        return float(np.sum((math.pi / 2 / np.cosh(math.pi ** 2 * xi)) ** 2))

    assert stab11.C2 ** 2 == pytest.approx(symbol(0.0), rel=1e-9)
    assert stab11.C1 ** 2 == pytest.approx(symbol(math.pi), rel=1e-7)
    assert stab11.C1 > 0


def test_stability_gram_section_oracle(stab11):
    ev = np.linalg.eigvalsh(stab11.gram_section(41))
    assert abs(ev[0] - stab11.C1 ** 2) < 1e-4


def test_stability_gaussian_positive():
    rep = stability_constants(GaussianWindow(math.pi))
    ev = np.linalg.eigvalsh(rep.gram_section(41))
    assert rep.C1 > 0 and ev[0] > 0
    assert rep.C1 ** 2 <= ev[0] + 1e-12


@pytest.mark.parametrize("w", [SecantWindow(1, 1), SecantWindow(1, 2), GaussianWindow(math.pi)])
def test_stability_brackets_gram_sections(w):
    rep = stability_constants(w)
    for size in (11, 21, 41):
        ev = np.linalg.eigvalsh(rep.gram_section(size))
        assert rep.C1 ** 2 <= ev[0] * (1 + 1e-10)
        assert ev[-1] <= rep.C2 ** 2 * (1 + 1e-10)


@pytest.mark.parametrize("w", [SecantWindow(1, 1), SecantWindow(1, 2), GaussianWindow(math.pi)])
def test_norm_of_generator_between_constants(w):
    rep = stability_constants(w)
    norm = l2_norm(w, w.decay_rate)
    assert rep.C1 <= norm <= rep.C2


def test_tf_shift_conventions():
    g = SecantWindow(1, 2)
    t = np.linspace(-3, 3, 13)
    assert np.allclose(tf_shift(g, 0, 0, "reflected")(t), eval_window(g, -t))
    assert np.allclose(tf_shift(g, 0, 0, "standard_translate")(t), eval_window(g, t))
    with pytest.raises(ParameterError):
        tf_shift(g, 0, 0, "other")


def test_tf_shift_unitary():
    g = SecantWindow(1, 2)
    base = l2_norm(g, 1.0)
    rng = np.random.default_rng(1)
    for x, y in rng.uniform(-3, 3, (10, 2)):
        for conv in ("reflected", "standard_translate"):
            n = l2_norm(tf_shift(g, x, y, conv), 1.0, center=x)
            assert abs(n - base) < 1e-10


def test_dilate_is_unitary():
    g = SecantWindow(1, 1)
    assert abs(l2_norm(g.dilate(2.0), 0.5) - l2_norm(g, 1.0)) < 1e-10
