"""Pure-numpy versions of the hot kernels.

These are the fallback when the compiled module is unavailable and the
reference the compiled kernels are tested against.
"""
import numpy as np


def phase_rotate(coeffs, omega, t):
    """Return ``coeffs * exp(-1j * t * omega)`` elementwise."""
    return coeffs * np.exp(-1j * (t * omega))


def weighted_mass(u, weight):
    """Return ``sum(weight * |u|^2)`` (no cell volume)."""
    return float(np.sum(weight * (u.real * u.real + u.imag * u.imag)))


def wigner_correlation(f, f_half):
    """Correlation matrix ``G[j, m] = f(x_j - m h/2) conj f(x_j + m h/2)``.

    ``m`` runs over one period in FFT order; odd ``m`` read the half-cell
    shifted samples ``f_half[j] = f(x_j + h/2)``.  The unpaired ``m = -N/2``
    column is replaced by its real part so the transform is exactly real.
    """
    n = f.shape[0]
    j = np.arange(n)[:, None]
    m = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)[None, :]
    p = np.floor_divide(m, 2)
    even = (m % 2) == 0
    left = np.where(even, f[(j - p) % n], f_half[(j - p - 1) % n])
    right = np.where(even, f[(j + p) % n], f_half[(j + p) % n])
    g = left * np.conj(right)
    g[:, n // 2] = g[:, n // 2].real
    return g
