# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step RK4 propagation of a Lindblad generator.

The right-hand side is

    -i (Heff rho - rho Heff^dag) + sum_k rate_k L_k rho L_k^dag,

with Heff = H - (i/2) sum_k rate_k L_k^dag L_k. The state stays Hermitian,
so ``rho Heff^dag`` is ``(Heff rho)^dag`` and ``L rho L^dag`` is
``L (L rho)^dag``. Heff is block diagonal in the excitation number and the
jump operators only connect neighbouring blocks, so all products run over
compressed-row (CSR) copies of the operators.
"""

import numpy as np


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.conjugate()


cdef struct Csr:
    const Py_ssize_t *ptr
    const Py_ssize_t *col
    const double complex *val


cdef inline void _axpy(Py_ssize_t n, double vr, double vi,
                       const double *x, double *y) noexcept nogil:
    # y += v * x on interleaved (re, im) rows; real arithmetic so it vectorizes
    cdef Py_ssize_t j
    cdef double xr, xi
    for j in range(n):
        xr = x[2 * j]
        xi = x[2 * j + 1]
        y[2 * j] += vr * xr - vi * xi
        y[2 * j + 1] += vr * xi + vi * xr


cdef void _csr_times(Csr a, Py_ssize_t row0, const double complex[:, ::1] x,
                     double complex[:, ::1] out) noexcept nogil:
    # out = A @ x, with A the d rows of the stack starting at row0
    cdef Py_ssize_t d = out.shape[0]
    cdef Py_ssize_t i, j, p
    cdef double complex v
    cdef double *row
    for i in range(d):
        row = <double *> &out[i, 0]
        for j in range(2 * d):
            row[j] = 0.0
        for p in range(a.ptr[row0 + i], a.ptr[row0 + i + 1]):
            v = a.val[p]
            _axpy(d, v.real, v.imag, <const double *> &x[a.col[p], 0], row)


cdef void _rhs(Csr h, Csr jumps, const double[::1] rates,
               const double complex[:, ::1] rho,
               double complex[:, ::1] out,
               double complex[:, ::1] tmp,
               double complex[:, ::1] tmp2) noexcept nogil:
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t nj = rates.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double rate
    cdef double complex z

    _csr_times(h, 0, rho, tmp)
    for i in range(d):
        for j in range(d):
            z = tmp[i, j] - _conj(tmp[j, i])
            out[i, j].real = z.imag
            out[i, j].imag = -z.real

    for k in range(nj):
        rate = rates[k]
        _csr_times(jumps, k * d, rho, tmp)          # tmp = L rho
        for i in range(d):
            for j in range(d):
                tmp2[i, j] = _conj(tmp[j, i])                # tmp2 = rho L^dag
        _csr_times(jumps, k * d, tmp2, tmp)         # tmp = L rho L^dag
        for i in range(d):
            for j in range(d):
                out[i, j] = out[i, j] + rate * tmp[i, j]


def _csr(mats):
    """Stacked CSR arrays for a (K, d, d) stack: rows of all K matrices in sequence."""
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    k, d, _ = mats.shape
    flat = mats.reshape(k * d, d)
    rows, cols = np.nonzero(flat)
    ptr = np.zeros(k * d + 1, dtype=np.intp)
    np.cumsum(np.bincount(rows, minlength=k * d), out=ptr[1:])
    return ptr, cols.astype(np.intp), np.ascontiguousarray(flat[rows, cols])


def rk4_propagate(heff, jumps, rates, rho0, double dt, Py_ssize_t nsteps,
                  Py_ssize_t record_every=1):
    """Integrate ``nsteps`` RK4 steps; return states at every ``record_every``-th
    step, at step 0, and at the final step."""
    heff = np.ascontiguousarray(heff, dtype=np.complex128)
    cdef Py_ssize_t d = heff.shape[0]
    jumps = np.ascontiguousarray(jumps, dtype=np.complex128).reshape(-1, d, d)
    cdef const double[::1] g = np.ascontiguousarray(rates, dtype=np.float64)
    if jumps.shape[0] != g.shape[0]:
        raise ValueError("one rate per jump operator is required")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    h_ptr, h_col, h_val = _csr(heff[None])
    j_ptr, j_col, j_val = _csr(jumps)
    # keep at least one element so the memoryviews are valid for empty stacks
    j_col = j_col if j_col.size else np.zeros(1, dtype=np.intp)
    j_val = j_val if j_val.size else np.zeros(1, dtype=np.complex128)
    h_col = h_col if h_col.size else np.zeros(1, dtype=np.intp)
    h_val = h_val if h_val.size else np.zeros(1, dtype=np.complex128)
    cdef const Py_ssize_t[::1] hp = h_ptr, hc = h_col, jp = j_ptr, jc = j_col
    cdef const double complex[::1] hv = h_val, jv = j_val
    cdef Csr H, L
    H.ptr, H.col, H.val = &hp[0], &hc[0], &hv[0]
    L.ptr, L.col, L.val = &jp[0], &jc[0], &jv[0]

    cdef Py_ssize_t nrec = nsteps // record_every + 1 + (1 if nsteps % record_every else 0)
    out_np = np.empty((nrec, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_np
    cdef double complex[:, ::1] rho = np.array(rho0, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] stage = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] acc = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] kbuf = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] tmp2 = np.empty((d, d), dtype=np.complex128)
    cdef Py_ssize_t s, i, j, r = 0
    cdef double half = 0.5 * dt, sixth = dt / 6.0

    for i in range(d):
        for j in range(d):
            out[0, i, j] = rho[i, j]
    r = 1
    with nogil:
        for s in range(1, nsteps + 1):
            _rhs(H, L, g, rho, kbuf, tmp, tmp2)
            for i in range(d):
                for j in range(d):
                    acc[i, j] = kbuf[i, j]
                    stage[i, j] = rho[i, j] + half * kbuf[i, j]
            _rhs(H, L, g, stage, kbuf, tmp, tmp2)
            for i in range(d):
                for j in range(d):
                    acc[i, j] = acc[i, j] + 2.0 * kbuf[i, j]
                    stage[i, j] = rho[i, j] + half * kbuf[i, j]
            _rhs(H, L, g, stage, kbuf, tmp, tmp2)
            for i in range(d):
                for j in range(d):
                    acc[i, j] = acc[i, j] + 2.0 * kbuf[i, j]
                    stage[i, j] = rho[i, j] + dt * kbuf[i, j]
            _rhs(H, L, g, stage, kbuf, tmp, tmp2)
            for i in range(d):
                for j in range(d):
                    rho[i, j] = rho[i, j] + sixth * (acc[i, j] + kbuf[i, j])
            if s % record_every == 0 or s == nsteps:
                for i in range(d):
                    for j in range(d):
                        out[r, i, j] = rho[i, j]
                r += 1
    return out_np
