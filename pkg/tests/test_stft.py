import math

import numpy as np
import pytest

from modspace.errors import NumericalSetupError
from modspace.grid import BoxGrid, default_grid, dilate_constructor, sample
from modspace.stft import (
    gauss_stft_closed_form,
    gauss_stft_magnitude,
    modulate_translate,
    stft,
    stft_columns,
)
from modspace.windows import gauss_window


def gauss(t):
    t = np.asarray(t, dtype=float)
    return np.exp(-t * t)


def test_closed_form_reference_values():
    # (p, q, lambda) -> exact mixed norm of the Gaussian pair
    assert math.isclose(gauss_stft_closed_form((2, 2), 1.0), math.pi,
                        rel_tol=1e-12)
    assert math.isclose(gauss_stft_closed_form((1, 1), 1.0),
                        2.0 * math.sqrt(2.0) * math.pi ** 1.5, rel_tol=1e-12)
    assert math.isclose(gauss_stft_closed_form((2, 2), 4.0), math.pi / 2.0,
                        rel_tol=1e-12)
    assert math.isclose(gauss_stft_closed_form((1, 1), 2.0),
                        math.sqrt(5.0) * math.pi ** 1.5, rel_tol=1e-12)
    assert math.isclose(gauss_stft_closed_form((math.inf, math.inf), 3.0),
                        math.sqrt(math.pi / 10.0), rel_tol=1e-12)
    # expand/shrink asymptotic envelopes stated in the docstring
    big = gauss_stft_closed_form((2, 4), 64.0)
    assert 0.1 < big / 64.0 ** (1.0 / 4.0 - 1.0) < 10.0
    small = gauss_stft_closed_form((2, 4), 1.0 / 64.0)
    assert 0.1 < small / 64.0 ** (1.0 / 2.0) < 10.0


def test_gauss_pair_value_at_origin():
    g = default_grid(1)
    tfm = stft(sample(gauss, g), gauss_window())
    j0 = np.argmin(np.abs(tfm.x_axis))
    m0 = np.argmin(np.abs(tfm.xi_axis))
    assert math.isclose(abs(tfm.values[j0, m0]), math.sqrt(math.pi / 2.0),
                        rel_tol=1e-9)


def test_magnitude_matches_closed_form():
    g = BoxGrid(dim=1, half_width=12.0, points_per_axis=512)
    lam = 2.0
    tfm = stft(sample(dilate_constructor(gauss, lam), g), gauss_window())
    xg, mg = np.meshgrid(tfm.x_axis, tfm.xi_axis, indexing="ij")
    exact = gauss_stft_magnitude(lam, xg, mg)
    assert np.abs(np.abs(tfm.values) - exact).max() <= 1e-8


def test_magnitude_covariance():
    # modulating and translating the signal shifts |V| on the lattice
    g = BoxGrid(dim=1, half_width=10.0, points_per_axis=256)
    w = gauss_window()
    sx, sm = 16, 8
    x0 = sx * g.spacing
    xi0 = sm * g.freq_spacing
    atom = modulate_translate(w, 0.0, 0.0)  # plain window as a signal
    shifted = modulate_translate(w, x0, xi0)
    v_base = np.abs(stft(sample(atom, g), w).values)
    v_shift = np.abs(stft(sample(shifted, g), w).values)
    n = g.points_per_axis
    inner = slice(n // 4, 3 * n // 4)
    lhs = v_shift[sx + n // 4:sx + 3 * n // 4, sm + n // 4:sm + 3 * n // 4]
    assert np.abs(lhs - v_base[inner, inner]).max() <= 1e-8


def test_energy_bound():
    # |V(x, xi)| <= ||f||_2 ||w||_2 everywhere
    g = default_grid(1)
    w = gauss_window()
    f = sample(dilate_constructor(gauss, 3.0), g)
    tfm = stft(f, w)
    f_l2 = math.sqrt(float(np.sum(np.abs(f.values) ** 2) * g.spacing))
    assert np.abs(tfm.values).max() <= f_l2 * w.l2 + 1e-10


def test_streamed_blocks_match_dense():
    g = BoxGrid(dim=1, half_width=8.0, points_per_axis=128)
    f = sample(gauss, g)
    w = gauss_window()
    dense = stft(f, w)
    rows = np.empty_like(dense.values)
    for js, block in stft_columns(f, w, block_rows=13):
        rows[js] = block
    assert np.array_equal(rows, dense.values)


def test_stride_and_extent():
    g = BoxGrid(dim=1, half_width=8.0, points_per_axis=128)
    f = sample(gauss, g)
    w = gauss_window()
    tfm = stft(f, w, stride=4)
    assert tfm.values.shape == (32, 128)
    assert math.isclose(tfm.dx, 4 * g.spacing)
    clipped = stft(f, w, x_half_width=2.0)
    assert np.abs(clipped.x_axis).max() <= 2.0 + 1e-12
    with pytest.raises(NumericalSetupError):
        stft(f, w, x_half_width=9.0)
    with pytest.raises(ValueError):
        stft(f, w, stride=3)


def test_dim2_matches_tensor_structure():
    # Gaussian everything: the 2-D transform factors into the 1-D one
    g2 = BoxGrid(dim=2, half_width=6.0, points_per_axis=32)
    g1 = BoxGrid(dim=1, half_width=6.0, points_per_axis=32)

    def gauss2(t):
        return np.exp(-np.sum(np.asarray(t) ** 2, axis=-1))

    t2 = stft(sample(gauss2, g2), gauss_window(2), stride=8)
    t1 = stft(sample(gauss, g1), gauss_window(1), stride=8)
    want = np.einsum("am,bn->abmn", t1.values, t1.values)
    assert np.abs(t2.values - want).max() <= 1e-10
