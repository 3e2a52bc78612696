import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secant_lab.errors import CoverageError, NotEnumerableError, ParameterError
from secant_lab.sequences import (PointSet1D, PointSet2D, enumerate_deltas, lower_density,
                                  planar_lower_density, pointset_from_json, separation, shear,
                                  upper_density)


def test_separation_examples():
    assert separation(PointSet1D.lattice(1.0)) == pytest.approx(1.0)
    assert separation(PointSet1D.periodic(3, [0, 0.1])) == pytest.approx(0.1)
    assert separation(PointSet1D.lattice(0.8)) == pytest.approx(0.8)


def test_lower_density_examples():
    r = [10.0, 20.0, 40.0]
    d = lower_density(PointSet1D.lattice(0.8), r)
    assert d.exact == pytest.approx(1.25)
    assert d.error < 0.05
    both = PointSet1D.periodic(1.0, [0, 0.5])
    assert lower_density(both, r).exact == pytest.approx(2.0)
    per = PointSet1D.periodic(3, [0, 0.1])
    assert lower_density(per, r).exact == pytest.approx(2 / 3)
    assert abs(lower_density(per, [30.0, 60.0]).value - 2 / 3) < 0.05


def test_density_profile_reported():
    d = upper_density(PointSet1D.lattice(1.0), [5.0, 10.0])
    assert len(d.estimates) == 2
    assert np.allclose(d.estimates, 1.0)


def test_density_radius_too_large():
    with pytest.raises(CoverageError):
        lower_density(PointSet1D.lattice(1.0, window=20.0), [15.0])


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(0.0, 0.49), st.integers(0, 1000))
def test_lower_le_upper_and_near_exact(rho, frac, seed):
    L = PointSet1D.jittered(rho, frac * rho, seed, 200.0)
    lo = lower_density(L, [50.0, 100.0])
    hi = upper_density(L, [50.0, 100.0])
    assert np.all(lo.estimates <= hi.estimates + 1e-12)
    # every interval of length r holds r/rho +- 2 points
    assert abs(lo.value - 1 / rho) <= 2 / 100 + 1e-12
    assert abs(hi.value - 1 / rho) <= 2 / 100 + 1e-12


def test_jitter_is_seeded():
    a = PointSet1D.jittered(0.8, 0.2, 7).all_points()
    b = PointSet1D.jittered(0.8, 0.2, 7).all_points()
    c = PointSet1D.jittered(0.8, 0.2, 8).all_points()
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ParameterError):
        PointSet1D.jittered(0.8, 0.5, 0)


def test_json_roundtrip():
    for L in (PointSet1D.periodic(3, [0, 0.1]), PointSet1D.jittered(0.8, 0.2, 7),
              PointSet1D.explicit([0.0, 1.5, 3.0])):
        assert pointset_from_json(L.to_json()) == L
    lat = pointset_from_json({"kind": "lattice", "step": 0.5, "offset": 0.25})
    assert lat.exact_density == pytest.approx(2.0)


def test_points_outside_window():
    with pytest.raises(CoverageError):
        PointSet1D.lattice(1.0, window=10.0).points(-20, 0)


def test_enumerate_examples():
    assert np.allclose(enumerate_deltas(PointSet1D.lattice(1.0)), 0.0)
    assert np.allclose(enumerate_deltas(PointSet1D.lattice(1.0, 0.3)), 0.3)
    assert np.allclose(enumerate_deltas(PointSet1D.lattice(1.0), shift=1), 1.0)


def test_enumerate_not_enumerable():
    with pytest.raises(NotEnumerableError):
        enumerate_deltas(PointSet1D.lattice(0.5), bound=10.0)


@given(st.floats(-0.49, 0.49), st.integers(-3, 3))
def test_enumerate_reindexing_shifts_deltas(x, j):
    L = PointSet1D.lattice(1.0, x % 1.0)
    d0 = enumerate_deltas(L)
    dj = enumerate_deltas(L, shift=j)
    assert np.allclose(dj, d0 + j)


def test_translate_scale_reflect():
    L = PointSet1D.periodic(2.0, [0.0, 0.5])
    assert np.allclose(L.translated(0.25).points(-5, 5), L.points(-5, 5) + 0.25)
    assert L.scaled(2.0).exact_density == pytest.approx(0.5)
    assert np.allclose(np.sort(-L.points(-9, 9)), L.reflected().points(-9, 9))


def test_planar_exact_densities():
    assert PointSet2D.rect_lattice(1, 1).exact_density == pytest.approx(1.0)
    assert PointSet2D.rect_lattice(0.5, 1).exact_density == pytest.approx(2.0)
    est = planar_lower_density(PointSet2D.rect_lattice(0.5, 1, window=40.0), [10.0, 20.0])
    assert abs(est.value - 2.0) < 0.1


def test_shear_identity_and_integer_shear():
    S = PointSet2D.rect_lattice(1, 1, window=10.0)
    assert np.allclose(shear(S, 0.0).matrix, np.eye(2))
    # sigma = pi maps (n, m) to (n, m + n), which is Z x Z again
    P = shear(S, math.pi).points(6.0)
    Q = S.points(6.0)
    key = lambda A: sorted(map(tuple, np.round(A, 9)))
    assert key(P) == key(Q)


def test_shear_preserves_planar_density():
    L = PointSet1D.lattice(0.8, 0.0, 200.0)
    base = PointSet2D.product(L, PointSet1D.lattice(1.0, 0.0, 200.0), 84.0)
    before = planar_lower_density(base, [40.0])
    after = planar_lower_density(shear(base, 2.0), [40.0])
    assert after.exact == pytest.approx(before.exact)
    assert abs(after.value - before.value) < 0.05
    assert abs(after.value - 1.25) < 0.05
