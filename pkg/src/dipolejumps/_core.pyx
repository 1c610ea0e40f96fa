# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory stepping kernel.

Mirror of dipolejumps._core_py (the readable reference); see there for the
algorithm.  Hot path is the 9-component complex matrix-vector product per
time step.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef double complex cplx

DEF DIM = 9
DEF BLOCK = 16384


cdef inline void _cmatvec(const cplx[:, ::1] m, const cplx* x, cplx* out) noexcept nogil:
    cdef int i, j
    cdef cplx s
    for i in range(DIM):
        s = 0
        for j in range(DIM):
            s = s + m[i, j] * x[j]
        out[i] = s


cdef inline void _rmatvec(const double[:, ::1] m, const cplx* x, cplx* out) noexcept nogil:
    cdef int i, j
    cdef cplx s
    for i in range(DIM):
        s = 0
        for j in range(DIM):
            s = s + m[i, j] * x[j]
        out[i] = s


cdef inline double _norm2(const cplx* v) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(DIM):
        s += v[i].real * v[i].real + v[i].imag * v[i].imag
    return s


def evolve(const cplx[:, ::1] u_full, const cplx[:, :, ::1] u_frac,
           const double[:, ::1] rplus, const double[:, ::1] rminus,
           double gamma_plus, double gamma_minus,
           const cplx[::1] psi0, double total_time, double dt, draw):
    """Evolve one trajectory; see dipolejumps._core_py.evolve."""
    cdef int n_bis = u_frac.shape[0]
    cdef cplx psi[DIM]
    cdef cplx tmp[DIM]
    cdef cplx lo[DIM]
    cdef cplx jp[DIM]
    cdef cplx jm[DIM]
    cdef int i, k, ch
    cdef double t = 0.0, u, n2, norm_prev, tloc, frac, tj, wp, wm, inv
    cdef Py_ssize_t ptr = 0, nrec = 0, cap = 4096

    buf_obj = draw(BLOCK)
    cdef const double[::1] buf = buf_obj
    times_obj = np.empty(cap, dtype=np.float64)
    chans_obj = np.empty(cap, dtype=np.int8)
    cdef double[::1] times = times_obj
    cdef signed char[::1] chans = chans_obj

    for i in range(DIM):
        psi[i] = psi0[i]
    norm_prev = _norm2(psi)

    if ptr >= BLOCK:
        buf_obj = draw(BLOCK); buf = buf_obj; ptr = 0
    u = 1.0 - buf[ptr]; ptr += 1

    while t < total_time:
        _cmatvec(u_full, psi, tmp)
        n2 = _norm2(tmp)
        if n2 > norm_prev * (1.0 + 1e-9):
            raise FloatingPointError(
                "norm grew within a step (%r -> %r); bad step size" % (norm_prev, n2))
        if n2 > u:
            for i in range(DIM):
                psi[i] = tmp[i]
            norm_prev = n2
            t += dt
            continue
        for i in range(DIM):
            lo[i] = psi[i]
        tloc = t
        frac = dt
        for k in range(n_bis):
            frac *= 0.5
            _cmatvec(u_frac[k], lo, tmp)
            if _norm2(tmp) > u:
                for i in range(DIM):
                    lo[i] = tmp[i]
                tloc += frac
        _cmatvec(u_frac[n_bis - 1], lo, tmp)
        tj = tloc + frac
        _rmatvec(rplus, tmp, jp)
        _rmatvec(rminus, tmp, jm)
        wp = gamma_plus * _norm2(jp)
        wm = gamma_minus * _norm2(jm)
        if ptr >= BLOCK:
            buf_obj = draw(BLOCK); buf = buf_obj; ptr = 0
        if buf[ptr] * (wp + wm) < wp:
            ch = 0
            inv = 1.0 / sqrt(_norm2(jp))
            for i in range(DIM):
                psi[i] = jp[i] * inv
        else:
            ch = 1
            inv = 1.0 / sqrt(_norm2(jm))
            for i in range(DIM):
                psi[i] = jm[i] * inv
        ptr += 1
        norm_prev = 1.0
        if tj <= total_time:
            if nrec >= cap:
                cap *= 2
                times_obj = np.concatenate([times_obj, np.empty(cap // 2)])
                chans_obj = np.concatenate(
                    [chans_obj, np.empty(cap // 2, dtype=np.int8)])
                times = times_obj
                chans = chans_obj
            times[nrec] = tj
            chans[nrec] = ch
            nrec += 1
        t = tj
        if ptr >= BLOCK:
            buf_obj = draw(BLOCK); buf = buf_obj; ptr = 0
        u = 1.0 - buf[ptr]; ptr += 1

    psi_out = np.empty(DIM, dtype=np.complex128)
    for i in range(DIM):
        psi_out[i] = psi[i]
    return times_obj[:nrec].copy(), chans_obj[:nrec].copy(), psi_out
