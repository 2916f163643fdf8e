import math

import numpy as np
import pytest

from bouslp.spectral import (
    Grid,
    MeanVorticityError,
    SpectralField,
    VelocityField,
    advect,
    biot_savart,
    curl,
    dealias,
    divergence,
    gradient,
    hermitian_defect,
    laplacian,
    lp_norm,
    lp_norm_vector,
    spectral_derivative,
)

from helpers import field_from, random_band_limited

TWO_PI = 2.0 * math.pi


def test_grid_validation():
    Grid(16)
    Grid(256)
    with pytest.raises(ValueError):
        Grid(15)
    with pytest.raises(ValueError):
        Grid(8)
    with pytest.raises(ValueError):
        Grid(96)


def test_grid_dealias_radius():
    assert Grid(64).dealias_radius == 21
    assert Grid(128).dealias_radius == 42


def test_roundtrip_physical_spectral(grid64):
    f = random_band_limited(grid64, kmax=20, seed=7)
    phys = f.to_physical()
    back = SpectralField.from_physical(grid64, phys).to_physical()
    assert np.max(np.abs(back - phys)) <= 1e-12 * np.max(np.abs(phys))


def test_hermitian_symmetry_of_real_fields(grid64):
    f = random_band_limited(grid64, kmax=20, seed=3)
    assert hermitian_defect(f) <= 1e-14


def test_derivative_single_mode(grid32):
    f = field_from(grid32, lambda x1, x2: np.sin(x1))
    df = spectral_derivative(f, 1).to_physical()
    expected = np.cos(grid32.arrays.x1)
    assert np.max(np.abs(df - expected)) <= 1e-12


def test_derivative_of_constant_is_zero(grid32):
    f = field_from(grid32, lambda x1, x2: 0 * x1 + 3.5)
    assert np.max(np.abs(spectral_derivative(f, 2).to_physical())) <= 1e-13


def test_laplacian_eigenfunction(grid32):
    # exp(i(3 x1 + 4 x2)) has Laplacian eigenvalue -25; use its real part
    f = field_from(grid32, lambda x1, x2: np.cos(3 * x1 + 4 * x2))
    lf = laplacian(f).to_physical()
    assert np.max(np.abs(lf + 25.0 * f.to_physical())) <= 1e-11


def test_biot_savart_zero_field(grid32):
    u = biot_savart(SpectralField.zero(grid32))
    assert np.max(np.abs(u.u1.to_physical())) == 0.0
    assert np.max(np.abs(u.u2.to_physical())) == 0.0


def test_biot_savart_single_mode(grid32):
    # w = sin x1  ->  u = (0, -cos x1)
    w = field_from(grid32, lambda x1, x2: np.sin(x1))
    u = biot_savart(w)
    a = grid32.arrays
    assert np.max(np.abs(u.u1.to_physical())) <= 1e-13
    assert np.max(np.abs(u.u2.to_physical() + np.cos(a.x1))) <= 1e-13


def test_biot_savart_taylor_green(grid32):
    w = field_from(grid32, lambda x1, x2: -2.0 * np.cos(x1) * np.cos(x2))
    u = biot_savart(w)
    a = grid32.arrays
    assert np.max(np.abs(u.u1.to_physical() - np.cos(a.x1) * np.sin(a.x2))) <= 1e-13
    assert np.max(np.abs(u.u2.to_physical() + np.sin(a.x1) * np.cos(a.x2))) <= 1e-13


def test_biot_savart_rejects_mean(grid32):
    w = field_from(grid32, lambda x1, x2: 1.0 + np.sin(x1))
    with pytest.raises(MeanVorticityError):
        biot_savart(w)
    # non-strict mode ignores the mean
    u = biot_savart(w, strict=False)
    assert np.isfinite(u.max_speed())


def test_curl_of_biot_savart_is_identity(grid64):
    w = random_band_limited(grid64, kmax=20, seed=11)
    u = biot_savart(w)
    defect = np.abs(curl(u).coeffs - w.coeffs).max()
    assert defect <= 1e-13 * max(1.0, np.abs(w.coeffs).max())


def test_divergence_of_biot_savart_is_zero(grid64):
    w = random_band_limited(grid64, kmax=20, seed=13)
    u = biot_savart(w)
    assert np.abs(divergence(u).coeffs).max() <= 1e-13


def test_lp_norm_constant(grid32):
    f = field_from(grid32, lambda x1, x2: 0 * x1 - 2.0)
    assert abs(lp_norm(f, 2) - 2.0 * TWO_PI) <= 1e-12


def test_lp_norm_sin_l2(grid32):
    f = field_from(grid32, lambda x1, x2: np.sin(x1))
    assert abs(lp_norm(f, 2) - math.pi * math.sqrt(2.0)) <= 1e-12


def fine_quadrature_power_norm(power):
    # independent oracle: 1D fine trapezoid of sin^power over [0, 2*pi),
    # extended over the second axis by the 2*pi factor
    m = 200001
    x = np.linspace(0.0, TWO_PI, m)
    integral_1d = np.trapezoid(np.sin(x) ** power, x)
    return (integral_1d * TWO_PI) ** (1.0 / power)


def test_lp_norm_sin_l4(grid32):
    f = field_from(grid32, lambda x1, x2: np.sin(x1))
    oracle = fine_quadrature_power_norm(4)
    # closed form for reference: (3*pi^2/2)^(1/4)
    assert abs(oracle - (1.5 * math.pi**2) ** 0.25) <= 1e-9
    assert abs(lp_norm(f, 4) - oracle) <= 1e-9


def test_lp_norm_infinity(grid32):
    f = field_from(grid32, lambda x1, x2: np.sin(x1) + 0.25 * np.cos(2 * x2))
    assert lp_norm(f, math.inf) == pytest.approx(np.abs(f.to_physical()).max())


def test_lp_norm_homogeneous(grid64):
    f = random_band_limited(grid64, kmax=15, seed=5)
    for p in (1.0, 1.5, 2.0, 4.0, math.inf):
        assert lp_norm(3.7 * f, p) == pytest.approx(3.7 * lp_norm(f, p), rel=1e-13)


def test_lp_norm_vector_magnitude(grid32):
    f1 = field_from(grid32, lambda x1, x2: np.cos(x1))
    f2 = field_from(grid32, lambda x1, x2: np.sin(x1))
    # |(cos, sin)| = 1 pointwise
    assert lp_norm_vector((f1, f2), math.inf) == pytest.approx(1.0, abs=1e-12)
    assert lp_norm_vector((f1, f2), 2) == pytest.approx(TWO_PI, rel=1e-12)


def test_advect_zero_velocity(grid32):
    z = SpectralField.zero(grid32)
    u = VelocityField(z, z)
    f = field_from(grid32, lambda x1, x2: np.sin(3 * x1) * np.cos(x2))
    assert np.abs(advect(u, f).coeffs).max() <= 1e-15


def test_advect_constant_velocity(grid32):
    c1 = field_from(grid32, lambda x1, x2: 0 * x1 + 2.0)
    c2 = field_from(grid32, lambda x1, x2: 0 * x1 - 1.0)
    u = VelocityField(c1, c2)
    f = field_from(grid32, lambda x1, x2: np.sin(x1))
    a = grid32.arrays
    expected = 2.0 * np.cos(a.x1)
    assert np.max(np.abs(advect(u, f).to_physical() - expected)) <= 1e-12


def test_advect_taylor_green_steady(grid64):
    w = field_from(grid64, lambda x1, x2: -2.0 * np.cos(x1) * np.cos(x2))
    u = biot_savart(w)
    adv = advect(u, w)
    assert np.abs(adv.coeffs).max() <= 1e-14
    # refined-grid pointwise product confirms the cancellation
    fine = Grid(128)
    wf = field_from(fine, lambda x1, x2: -2.0 * np.cos(x1) * np.cos(x2))
    uf = biot_savart(wf)
    af = fine.arrays
    wx = spectral_derivative(wf, 1).to_physical()
    wy = spectral_derivative(wf, 2).to_physical()
    pointwise = uf.u1.to_physical() * wx + uf.u2.to_physical() * wy
    assert np.abs(pointwise).max() <= 1e-13
    assert af.x1.shape == (128, 128)


def brute_force_convolution(f, g):
    """Exact spectral convolution of two sparse-coefficient fields."""
    grid = f.grid
    n = grid.n
    out = np.zeros((n, n), dtype=complex)
    fi, fj = np.nonzero(np.abs(f.coeffs) > 0)
    gi, gj = np.nonzero(np.abs(g.coeffs) > 0)
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    for a, b in zip(fi, fj):
        for c, d in zip(gi, gj):
            k1 = k[a] + k[c]
            k2 = k[b] + k[d]
            if abs(k1) > n // 2 - 1 or abs(k2) > n // 2 - 1:
                continue
            out[k1 % n, k2 % n] += f.coeffs[a, b] * g.coeffs[c, d]
    return SpectralField(grid, out)


@pytest.mark.parametrize("n", [32, 64])
def test_advect_matches_brute_force_convolution(n):
    # combined bandwidth inside the dealias radius, sparse supports
    grid = Grid(n)
    kmax = n // 8
    w = random_band_limited(grid, kmax=kmax, seed=21 + n)
    u = biot_savart(w)
    f = random_band_limited(grid, kmax=kmax, seed=22 + n)
    result = advect(u, f)
    fx, fy = gradient(f)
    expected = brute_force_convolution(u.u1, fx) + brute_force_convolution(u.u2, fy)
    expected = dealias(expected)
    scale = max(1.0, np.abs(expected.coeffs).max())
    assert np.abs(result.coeffs - expected.coeffs).max() <= 1e-11 * scale


def test_dealias_zeroes_high_modes(grid32):
    rng = np.random.default_rng(0)
    raw = SpectralField.from_physical(grid32, rng.standard_normal((32, 32)))
    f = dealias(raw)
    a = grid32.arrays
    assert np.all(f.coeffs[a.kmag > grid32.dealias_radius] == 0)


def test_product_of_dealiased_fields_is_alias_free(grid64):
    # after dealiasing both factors, the pseudospectral product agrees with
    # the exact truncated convolution
    f = dealias(random_band_limited(grid64, kmax=21, seed=31))
    g = dealias(random_band_limited(grid64, kmax=21, seed=32))
    from bouslp.spectral import multiply

    prod = multiply(f, g)
    expected = dealias(brute_force_convolution(f, g))
    scale = max(1.0, np.abs(expected.coeffs).max())
    assert np.abs(prod.coeffs - expected.coeffs).max() <= 1e-11 * scale
