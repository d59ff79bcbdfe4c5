# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled displacement-matrix kernel.

Fills D(beta)[m, n] = <m|exp(beta a* - conj(beta) a)|n> for a batch of
complex amplitudes using the normalised associated-Laguerre recurrence
along each diagonal k = m - n.
"""
import numpy as np
from cython.parallel cimport prange
from libc.math cimport exp, sqrt


cdef void _fill(double br, double bi, Py_ssize_t dim, double complex* out) noexcept nogil:
    cdef double x = br * br + bi * bi
    cdef double pr = exp(-0.5 * x), pi = 0.0, tmp, sk, ur, ui
    cdef double mprev, mcur, mnext
    cdef Py_ssize_t k, n
    for k in range(dim):
        if k > 0:
            sk = sqrt(<double>k)
            tmp = (pr * br - pi * bi) / sk
            pi = (pr * bi + pi * br) / sk
            pr = tmp
        # upper-triangle prefactor (-1)^k conj(P_k)
        if k % 2 == 0:
            ur = pr
            ui = -pi
        else:
            ur = -pr
            ui = pi
        mprev = 1.0
        out[k * dim] = pr * mprev + 1j * (pi * mprev)
        if k > 0:
            out[k] = ur * mprev + 1j * (ui * mprev)
        if dim - k < 2:
            continue
        mcur = (1.0 + k - x) / sqrt(k + 1.0)
        out[(k + 1) * dim + 1] = pr * mcur + 1j * (pi * mcur)
        if k > 0:
            out[dim + k + 1] = ur * mcur + 1j * (ui * mcur)
        for n in range(1, dim - k - 1):
            mnext = ((2 * n + 1 + k - x) * mcur - sqrt(<double>(n * (n + k))) * mprev) \
                / sqrt(<double>((n + 1) * (n + 1 + k)))
            out[(n + 1 + k) * dim + n + 1] = pr * mnext + 1j * (pi * mnext)
            if k > 0:
                out[(n + 1) * dim + n + 1 + k] = ur * mnext + 1j * (ui * mnext)
            mprev = mcur
            mcur = mnext


def displacement_batch(betas, Py_ssize_t dim, int num_threads=1):
    """Return an array of shape (len(betas), dim, dim) of displacement matrices."""
    cdef const double[:, ::1] b = np.ascontiguousarray(
        np.asarray(betas, dtype=np.complex128).reshape(-1).view(np.float64).reshape(-1, 2)
    )
    cdef Py_ssize_t nb = b.shape[0], i
    out = np.zeros((nb, dim, dim), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    if nb == 0 or dim == 0:
        return out
    for i in prange(nb, nogil=True, num_threads=num_threads, schedule="static"):
        _fill(b[i, 0], b[i, 1], dim, &o[i, 0, 0])
    return out
