import numpy as np

from bouslp.spectral import SpectralField


def field_from(grid, fn):
    """Build a SpectralField by sampling fn(x1, x2) on the grid."""
    a = grid.arrays
    return SpectralField.from_physical(grid, fn(a.x1, a.x2))


def single_mode_field(grid, k1, k2, amplitude=1.0):
    """Real field amplitude*cos(k1 x1 + k2 x2) with exact coefficients."""
    n = grid.n
    coeffs = np.zeros((n, n), dtype=complex)
    coeffs[k1 % n, k2 % n] = amplitude / 2.0
    coeffs[(-k1) % n, (-k2) % n] += amplitude / 2.0
    return SpectralField(grid, coeffs)


def random_band_limited(grid, kmax, seed, amplitude=1.0, decay=0.0, mean_free=True):
    """Seeded random real field with circular spectral support |k| <= kmax.

    ``decay`` shapes coefficients by |k|^(-decay); amplitude rescales the
    physical max to the requested value.
    """
    rng = np.random.default_rng(seed)
    a = grid.arrays
    noise = rng.standard_normal((grid.n, grid.n))
    coeffs = np.fft.fft2(noise) / grid.n**2
    envelope = (a.kmag <= kmax).astype(float)
    if decay > 0:
        with np.errstate(divide="ignore"):
            envelope = envelope * np.where(a.kmag > 0, a.kmag, 1.0) ** (-decay)
    coeffs = coeffs * envelope
    if mean_free:
        coeffs[0, 0] = 0.0
    f = SpectralField(grid, coeffs)
    peak = float(np.abs(f.to_physical()).max())
    if peak > 0:
        f = f * (amplitude / peak)
    return f
