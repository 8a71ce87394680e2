# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_reference`` for semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, fabs, sin

cnp.import_array()


def phase_rotate(coeffs, omega, double t):
    cdef cnp.ndarray c_arr = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray w_arr = np.ascontiguousarray(omega, dtype=np.float64)
    if c_arr.size != w_arr.size:
        raise ValueError("coeffs and omega must have the same size")
    out = np.empty_like(c_arr)
    cdef const double complex[::1] c = c_arr.reshape(-1)
    cdef const double[::1] w = w_arr.reshape(-1)
    cdef double complex[::1] o = out.reshape(-1)
    cdef Py_ssize_t i, n = c.shape[0]
    cdef double ph, cr, ci, re, im
    with nogil:
        for i in range(n):
            ph = t * w[i]
            cr = cos(ph)
            ci = -sin(ph)
            re = c[i].real
            im = c[i].imag
            o[i] = (re * cr - im * ci) + 1j * (re * ci + im * cr)
    return out.reshape(np.shape(coeffs))


def weighted_mass(u, weight):
    cdef const double complex[::1] a = np.ascontiguousarray(u, dtype=np.complex128).reshape(-1)
    cdef const double[::1] w = np.ascontiguousarray(weight, dtype=np.float64).reshape(-1)
    if a.shape[0] != w.shape[0]:
        raise ValueError("u and weight must have the same size")
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0, comp = 0.0, term, tot, re, im
    with nogil:
        # Neumaier compensated sum; a plain loop loses ~1e-13 at n ~ 1e6
        for i in range(n):
            re = a[i].real
            im = a[i].imag
            term = w[i] * (re * re + im * im)
            tot = acc + term
            if fabs(acc) >= fabs(term):
                comp += (acc - tot) + term
            else:
                comp += (term - tot) + acc
            acc = tot
    return acc + comp


def wigner_correlation(f, f_half):
    cdef const double complex[::1] fa = np.ascontiguousarray(f, dtype=np.complex128)
    cdef const double complex[::1] fh = np.ascontiguousarray(f_half, dtype=np.complex128)
    cdef Py_ssize_t n = fa.shape[0]
    if fh.shape[0] != n:
        raise ValueError("f and f_half must have the same size")
    out = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] g = out
    cdef Py_ssize_t j, mi, m, p, il, ir, half = n // 2
    cdef double complex l, r
    with nogil:
        for j in range(n):
            for mi in range(n):
                m = mi if mi < half else mi - n
                if m % 2 == 0:
                    p = m // 2
                    il = (j - p) % n
                    ir = (j + p) % n
                    l = fa[il if il >= 0 else il + n]
                    r = fa[ir if ir >= 0 else ir + n]
                else:
                    p = (m - 1) // 2
                    il = (j - p - 1) % n
                    ir = (j + p) % n
                    l = fh[il if il >= 0 else il + n]
                    r = fh[ir if ir >= 0 else ir + n]
                g[j, mi] = l * r.conjugate()
            g[j, half] = g[j, half].real
    return out
