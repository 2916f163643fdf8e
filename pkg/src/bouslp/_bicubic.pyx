# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Periodic Catmull-Rom bicubic interpolation at scattered points.

Hot kernel of the flow-map machinery: every backtracking stage evaluates a
grid field at n^2 scattered locations. A NumPy fallback with identical
semantics lives in bouslp.interp.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double catmull_rom(double fm1, double f0, double f1, double f2,
                               double t) noexcept nogil:
    return f0 + 0.5 * t * (f1 - fm1 + t * (2.0 * fm1 - 5.0 * f0 + 4.0 * f1 - f2
                                           + t * (3.0 * (f0 - f1) + f2 - fm1)))


def bicubic_periodic(double[:, ::1] values, double[::1] px, double[::1] py,
                     double period):
    """Interpolate ``values`` (sampled on a uniform periodic grid) at points.

    values[i, j] is the sample at (i*h, j*h) with h = period / n. Points may
    lie anywhere; they are wrapped into [0, period).
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t npts = px.shape[0]
    cdef double h = period / n
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(npts, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t p, i0, j0, a, b
    cdef double x, y, tx, ty
    cdef double col[4]
    cdef Py_ssize_t ia[4]
    cdef Py_ssize_t jb[4]

    if values.shape[1] != n:
        raise ValueError("values must be square")
    if py.shape[0] != npts:
        raise ValueError("px and py must have equal length")

    with nogil:
        for p in range(npts):
            x = px[p] / h
            y = py[p] / h
            i0 = <Py_ssize_t>(x // 1.0) if x >= 0 else <Py_ssize_t>(x // 1.0)
            j0 = <Py_ssize_t>(y // 1.0) if y >= 0 else <Py_ssize_t>(y // 1.0)
            # floor for negative arguments
            if x < i0:
                i0 -= 1
            if y < j0:
                j0 -= 1
            tx = x - i0
            ty = y - j0
            for a in range(4):
                ia[a] = (i0 - 1 + a) % n
                if ia[a] < 0:
                    ia[a] += n
                jb[a] = (j0 - 1 + a) % n
                if jb[a] < 0:
                    jb[a] += n
            for a in range(4):
                col[a] = catmull_rom(values[ia[a], jb[0]], values[ia[a], jb[1]],
                                     values[ia[a], jb[2]], values[ia[a], jb[3]], ty)
            out_v[p] = catmull_rom(col[0], col[1], col[2], col[3], tx)
    return out
