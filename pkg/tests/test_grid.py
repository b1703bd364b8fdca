import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modspace.errors import BoundaryDecayWarning, NumericalSetupError
from modspace.grid import (
    BoxGrid,
    Constructor,
    default_grid,
    dilate_constructor,
    fourier,
    inverse_fourier,
    lp_norm,
    sample,
)


def gauss(t):
    t = np.asarray(t)
    if t.ndim and t.shape[-1] == 2 and t.ndim > 1:
        return np.exp(-np.sum(t * t, axis=-1))
    return np.exp(-t * t)


def test_grid_validation():
    with pytest.raises(ValueError):
        BoxGrid(dim=3, half_width=8.0, points_per_axis=64)
    with pytest.raises(ValueError):
        BoxGrid(dim=1, half_width=8.0, points_per_axis=65)
    with pytest.raises(ValueError):
        BoxGrid(dim=1, half_width=8.0, points_per_axis=8)
    with pytest.raises(ValueError):
        BoxGrid(dim=1, half_width=-1.0, points_per_axis=64)


def test_grid_lattices():
    g = BoxGrid(dim=1, half_width=12.0, points_per_axis=1024)
    ax = g.axis()
    assert ax[0] == -12.0 and len(ax) == 1024
    assert math.isclose(g.spacing, 24.0 / 1024)
    assert math.isclose(g.freq_spacing, math.pi / 12.0)
    xi = g.freq_axis()
    assert math.isclose(xi[0], -g.nyquist)
    assert np.allclose(np.diff(xi), g.freq_spacing)
    assert default_grid(2).dim == 2


def test_gaussian_transform_closed_form():
    # exp(-t^2) has transform sqrt(pi) exp(-xi^2/4) under this convention
    g = default_grid(1)
    spec = fourier(sample(gauss, g))
    xi = g.freq_axis()
    window = np.abs(xi) <= 10.0
    exact = math.sqrt(math.pi) * np.exp(-xi[window] ** 2 / 4)
    err = np.abs(spec.values[window] - exact).max()
    assert err <= 1e-8


def test_gaussian_transform_2d():
    g = BoxGrid(dim=2, half_width=8.0, points_per_axis=128)
    spec = fourier(sample(gauss, g))
    xi = g.freq_axis()
    xi1, xi2 = np.meshgrid(xi, xi, indexing="ij")
    exact = math.pi * np.exp(-(xi1 ** 2 + xi2 ** 2) / 4)
    box = (np.abs(xi1) <= 6) & (np.abs(xi2) <= 6)
    assert np.abs(spec.values - exact)[box].max() <= 1e-7


def test_plancherel():
    # ||fhat||_2^2 == (2 pi)^dim ||f||_2^2
    for dim in (1, 2):
        g = default_grid(dim)
        f = sample(gauss, g)
        lhs = lp_norm(fourier(f), 2) ** 2
        rhs = (2 * math.pi) ** dim * lp_norm(f, 2) ** 2
        assert abs(lhs - rhs) <= 1e-8 * rhs


def test_roundtrip():
    for dim in (1, 2):
        g = default_grid(dim)
        f = sample(gauss, g)
        back = inverse_fourier(fourier(f))
        assert np.abs(back.values - f.values).max() <= 1e-12


def test_transform_linearity_and_symmetry():
    g = BoxGrid(dim=1, half_width=10.0, points_per_axis=256)
    f = sample(gauss, g)
    h = sample(lambda t: np.exp(-2 * t * t) * t, g)
    lhs = fourier(SampledLike(g, 2.0 * f.values + 1j * h.values)).values
    rhs = 2.0 * fourier(f).values + 1j * fourier(h).values
    assert np.allclose(lhs, rhs, atol=1e-12)
    # real signal: fhat(-xi) == conj(fhat(xi)) on the lattice
    spec = fourier(f).values
    assert np.allclose(spec[1:][::-1], np.conj(spec[1:]), atol=1e-12)


def SampledLike(g, values):
    from modspace.grid import SampledSignal
    return SampledSignal(grid=g, values=values, label="combo")


def test_gauss_l2_norm_value():
    # ||exp(-t^2)||_2 == (pi/2)^{1/4}
    f = sample(gauss, default_grid(1))
    assert math.isclose(lp_norm(f, 2), (math.pi / 2) ** 0.25, rel_tol=1e-10)
    assert math.isclose(lp_norm(f, math.inf), 1.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_dilation_lp_identity():
    # ||f(lambda .)||_p == lambda^{-dim/p} ||f||_p
    for lam in (0.5, 2.0, 3.0):
        for p in (1, 2, 4):
            g = BoxGrid(dim=1, half_width=max(12.0, 12.0 / lam),
                        points_per_axis=2048)
            base = lp_norm(sample(gauss, g), p)
            scaled = lp_norm(sample(dilate_constructor(gauss, lam), g), p)
            assert math.isclose(scaled, lam ** (-1.0 / p) * base, rel_tol=1e-6)


def test_dilation_transports_metadata():
    ctor = Constructor(fn=gauss, label="gauss", dim=1,
                       spectrum=lambda xi: np.sqrt(np.pi) * np.exp(-xi ** 2 / 4),
                       valid_half_width=8.0)
    d = dilate_constructor(ctor, 2.0)
    assert d.valid_half_width == 4.0
    xi = np.linspace(-3, 3, 7)
    assert np.allclose(d.spectrum(xi), 0.5 * ctor.spectrum(xi / 2.0))
    with pytest.raises(ValueError):
        dilate_constructor(ctor, 0.0)


def test_sample_errors():
    g = default_grid(1)
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError, match="t = 0"):
            sample(lambda t: 1.0 / t, g)
    limited = Constructor(fn=gauss, label="trunc", dim=1, valid_half_width=2.0)
    with pytest.raises(NumericalSetupError):
        sample(limited, g)
    sample(limited, BoxGrid(dim=1, half_width=2.0, points_per_axis=64))


def test_boundary_decay_warning():
    g = BoxGrid(dim=1, half_width=4.0, points_per_axis=64)
    with pytest.warns(BoundaryDecayWarning):
        fourier(sample(lambda t: np.ones_like(t), g))


@settings(max_examples=50)
@given(c=st.floats(min_value=0.01, max_value=100.0),
       p=st.sampled_from([1, 1.5, 2, 4, math.inf]))
def test_norm_homogeneity(c, p):
    g = BoxGrid(dim=1, half_width=6.0, points_per_axis=64)
    f = sample(gauss, g)
    scaled = SampledLike(g, c * f.values)
    assert math.isclose(lp_norm(scaled, p), c * lp_norm(f, p), rel_tol=1e-12)
