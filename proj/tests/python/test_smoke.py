import math

import numpy as np
import pytest

import npiv


@pytest.fixture(scope="module")
def design():
    return npiv.Design()


@pytest.fixture(scope="module")
def sample(design):
    return design.sample(200, 7)


def test_design_constants(design):
    assert design.c_f == pytest.approx(math.pi**2 / (7 * 1.2020569031595942), abs=1e-4)
    assert design.g_true(0.5) == pytest.approx(1.2954, abs=1e-4)
    assert design.eigenvalue(2) == pytest.approx(design.c_f**2 / 4)
    xs = np.linspace(0.1, 0.9, 5)
    np.testing.assert_array_equal(design.density(xs, 0.3), design.density(0.3, xs))


def test_sampling_is_seeded(design):
    a = design.sample(50, 3)
    b = design.sample(50, 3)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
    assert a[0].shape == (50,)


def test_kernel_estimate(sample):
    x, w, y = sample
    r = npiv.estimate_kernel(x, w, y, h=0.2, a=0.1)
    assert r["values"].shape == (19,)
    assert np.all(np.isfinite(r["values"]))
    assert len(r["diagnostics"]["leading_eigenvalues"]) == 10
    doubled = npiv.estimate_kernel(x, w, 2 * y, h=0.2, a=0.1)
    np.testing.assert_allclose(doubled["values"], 2 * r["values"], atol=1e-10)
    zero = npiv.estimate_kernel(x, w, np.zeros_like(y))
    assert np.all(zero["values"] == 0)


def test_multivariate_estimate(sample):
    x, w, y = sample
    z = np.random.default_rng(1).uniform(size=x.size)
    r = npiv.estimate_kernel(x, w, y, z=z, z0=[0.5], h_z=0.3, eval_points=np.array([0.25, 0.5, 0.75]))
    assert r["values"].shape == (3,)
    with pytest.raises(npiv.ParameterError):
        npiv.estimate_kernel(x, w, y, z=z)


def test_series_estimate(sample):
    x, w, y = sample
    r = npiv.estimate_series(x, w, y, m=5, band=2, a=0.1)
    q = r["q_hat"]
    assert q.shape == (5, 5)
    assert q[0, 0] == pytest.approx(1.0)
    assert q[0, 3] == 0.0
    np.testing.assert_allclose(npiv.ecdf_transform([0.3, 0.3, 0.9]), [2 / 3, 2 / 3, 1.0])


def test_errors(sample):
    x, w, y = sample
    with pytest.raises(npiv.ParameterError):
        npiv.estimate_kernel(x, w, y, a=0.0)
    with pytest.raises(ValueError):
        npiv.estimate_kernel(x + 1.0, w, y)


def test_simulation_and_band():
    r = npiv.simulate(n=60, reps=8, cells=[(0.1, 0.2)], grid_size=17)
    cell = r["cells"][0]
    np.testing.assert_allclose(cell["point_mse"], cell["point_bias2"] + cell["point_var"], atol=1e-10)
    reps = np.tile(r["truth"], (4, 1))
    assert np.all(npiv.estimation_band(reps, r["truth"], 0.95) == 0)


def test_spectrum():
    values = npiv.spectrum_design(129)
    assert np.all(np.diff(values) <= 0)
    assert 1.9 <= npiv.decay_exponent(values, 1, 20) <= 2.1
