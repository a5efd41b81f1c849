"""Property-based checks over randomly drawn parameters."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_sphere.sphere import antipode, cap_measure, spherical_distance, surface_area, uniform_coords
from riesz_sphere.transform import zonal_quadrature
from riesz_sphere.zonal import beta_function, multiplier_matrix, riesz_kernel, riesz_weights

dims = st.integers(2, 6)
orders = st.floats(0.0, 4.0, allow_nan=False)
settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@given(dims, st.integers(1, 200), orders)
def test_weights_bounded_and_monotone(N, n, alpha):
    w = riesz_weights(N, n, alpha).w
    assert w[0] == 1.0
    assert np.all((w >= 0) & (w <= 1))
    assert np.all(np.diff(w) <= 0)


@given(dims, st.integers(1, 60), st.floats(-0.49, 3.0))
def test_multiplier_rows_vanish_past_n(N, n_max, alpha):
    W = multiplier_matrix(N, n_max, alpha)
    assert np.all(np.triu(W, 1) == 0)


@given(dims, st.integers(0, 80), orders)
def test_kernel_unit_mass(N, n, alpha):
    t, w = zonal_quadrature(N, n // 2 + 2)
    assert abs(riesz_kernel(N, n, alpha, t) @ w - 1.0) < 1e-9


@given(dims, st.integers(0, 2**31 - 1))
def test_antipode_distance(N, seed):
    x = uniform_coords(N, 1, seed)[0]
    assert np.array_equal(antipode(antipode(x)), x)
    assert abs(spherical_distance(x, antipode(x)) - math.pi) < 1e-7


@given(dims, st.floats(0.01, math.pi - 0.01), st.floats(0.001, 0.5))
def test_cap_measure_monotone(N, r, dr):
    r2 = min(r + dr, math.pi)
    assert 0 < cap_measure(N, r) <= cap_measure(N, r2) <= surface_area(N) * (1 + 1e-12)


@given(st.floats(0.1, 20.0), st.floats(0.1, 20.0))
def test_beta_symmetry_and_recurrence(x, y):
    b = beta_function(x, y)
    assert math.isclose(b, beta_function(y, x), rel_tol=1e-13)
    assert math.isclose(beta_function(x + 1, y), b * x / (x + y), rel_tol=1e-12)
