# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels.

Same API and algorithms as ``_pykernels``; that module is the reference
and carries the documentation.  Results agree with the fallback up to
floating-point summation order.
"""

from libc.math cimport exp, log, sqrt, fabs, isfinite, INFINITY

import numpy as np

BACKEND_NAME = "c"


def posy_eval_log(const double[::1] logc, const double[:, ::1] A,
                  const double[::1] z):
    cdef Py_ssize_t T = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t t, j
    cdef double acc, m, total, scale
    s_arr = np.empty(T)
    cdef double[::1] s = s_arr
    m = -INFINITY
    for t in range(T):
        acc = logc[t]
        for j in range(n):
            acc += A[t, j] * z[j]
        s[t] = acc
        if acc > m:
            m = acc
    total = 0.0
    for t in range(T):
        s[t] = exp(s[t] - m)
        total += s[t]
    grad_arr = np.zeros(n)
    cdef double[::1] grad = grad_arr
    for t in range(T):
        for j in range(n):
            grad[j] += A[t, j] * s[t]
    scale = exp(m)
    for j in range(n):
        grad[j] *= scale
    return scale * total, grad_arr


def dual_objective(const double[::1] logc, const int[::1] block,
                   int nblocks, const double[::1] w):
    cdef Py_ssize_t T = w.shape[0]
    cdef Py_ssize_t t
    cdef int i
    cdef double phi = 0.0
    u_arr = np.zeros(nblocks)
    cdef double[::1] u = u_arr
    for t in range(T):
        if w[t] > 0.0:
            phi += w[t] * (logc[t] - log(w[t]))
        u[block[t]] += w[t]
    for i in range(1, nblocks):
        if u[i] > 0.0:
            phi += u[i] * log(u[i])
    return phi


def dual_gradient(const double[::1] logc, const int[::1] block,
                  int nblocks, const double[::1] w, double wfloor=1e-18):
    cdef Py_ssize_t T = w.shape[0]
    cdef Py_ssize_t t
    cdef int i
    cdef double wt, ub
    u_arr = np.zeros(nblocks)
    cdef double[::1] u = u_arr
    for t in range(T):
        u[block[t]] += w[t]
    g_arr = np.empty(T)
    cdef double[::1] g = g_arr
    for t in range(T):
        wt = w[t]
        if wt < wfloor:
            wt = wfloor
        g[t] = logc[t] - log(wt) - 1.0
        if block[t] > 0:
            ub = u[block[t]]
            if ub < wfloor:
                ub = wfloor
            g[t] += log(ub) + 1.0
    return g_arr


cdef double _pen_vg(const double[::1] obj_logc, const double[:, ::1] obj_A,
                    const double[::1] con_logc, const double[:, ::1] con_A,
                    const int[::1] con_ptr, const double[::1] z, double rho,
                    bint need_grad, double[::1] g, double[::1] eo,
                    double[::1] ec, double* gscale):
    cdef Py_ssize_t Tobj = obj_A.shape[0]
    cdef Py_ssize_t n = obj_A.shape[1]
    cdef Py_ssize_t ncon = con_ptr.shape[0] - 1
    cdef Py_ssize_t t, j, i, lo, hi
    cdef double acc, m, tot, total, mi, ti, vi, lam, pnorm, gs
    m = -INFINITY
    for t in range(Tobj):
        acc = obj_logc[t]
        for j in range(n):
            acc += obj_A[t, j] * z[j]
        eo[t] = acc
        if acc > m:
            m = acc
    tot = 0.0
    for t in range(Tobj):
        eo[t] = exp(eo[t] - m)
        tot += eo[t]
    total = m + log(tot)
    gs = 1.0
    if need_grad:
        for j in range(n):
            g[j] = 0.0
        for t in range(Tobj):
            for j in range(n):
                g[j] += obj_A[t, j] * eo[t]
        pnorm = 0.0
        for j in range(n):
            g[j] /= tot
            pnorm += g[j] * g[j]
        gs += sqrt(pnorm)
    for i in range(ncon):
        lo = con_ptr[i]
        hi = con_ptr[i + 1]
        mi = -INFINITY
        for t in range(lo, hi):
            acc = con_logc[t]
            for j in range(n):
                acc += con_A[t, j] * z[j]
            ec[t] = acc
            if acc > mi:
                mi = acc
        ti = 0.0
        for t in range(lo, hi):
            ec[t] = exp(ec[t] - mi)
            ti += ec[t]
        vi = mi + log(ti)
        if vi > 0.0:
            total += rho * vi * vi
            if need_grad:
                lam = 2.0 * rho * vi
                pnorm = 0.0
                for j in range(n):
                    acc = 0.0
                    for t in range(lo, hi):
                        acc += con_A[t, j] * ec[t]
                    acc /= ti
                    g[j] += lam * acc
                    pnorm += acc * acc
                gs += lam * sqrt(pnorm)
    if need_grad:
        gscale[0] = gs
    return total


def oracle_stage(const double[::1] obj_logc, const double[:, ::1] obj_A,
                 const double[::1] con_logc, const double[:, ::1] con_A,
                 const int[::1] con_ptr, const double[::1] z0, double rho,
                 double tol, int max_iter, double step0, double zcap,
                 double gfloor=0.0):
    cdef Py_ssize_t n = obj_A.shape[1]
    cdef Py_ssize_t Tobj = obj_A.shape[0]
    cdef Py_ssize_t Tcon = con_A.shape[0]
    cdef Py_ssize_t j
    cdef int iters = 0, flag = 1, h, hcount, hpos, k
    cdef bint accepted
    cdef double f, ftry, fnew, fref, gscale = 1.0
    cdef double gnorm, gninf, zinf, alpha, gsq, sts, sty, sv, yv, thresh
    cdef double step = step0
    cdef double fhist[8]

    z_arr = np.array(z0, dtype=np.float64)
    ztry_arr = np.zeros(n)
    g_arr = np.zeros(n)
    gtry_arr = np.zeros(n)
    eo_arr = np.empty(max(Tobj, 1))
    ec_arr = np.empty(max(Tcon, 1))
    cdef double[::1] z = z_arr
    cdef double[::1] ztry = ztry_arr
    cdef double[::1] g = g_arr
    cdef double[::1] gtry = gtry_arr
    cdef double[::1] eo = eo_arr
    cdef double[::1] ec = ec_arr

    f = _pen_vg(obj_logc, obj_A, con_logc, con_A, con_ptr, z, rho,
                True, g, eo, ec, &gscale)
    fhist[0] = f
    hcount = 1
    hpos = 1
    while iters < max_iter:
        gnorm = 0.0
        gninf = 0.0
        zinf = 0.0
        for j in range(n):
            gnorm += g[j] * g[j]
            if fabs(g[j]) > gninf:
                gninf = fabs(g[j])
            if fabs(z[j]) > zinf:
                zinf = fabs(z[j])
        gnorm = sqrt(gnorm)
        thresh = tol * gscale
        if gfloor > thresh:
            thresh = gfloor
        if gnorm <= thresh:
            flag = 0
            break
        if zinf > zcap:
            flag = 2
            break
        iters += 1
        alpha = step
        if alpha < 1e-14:
            alpha = 1e-14
        if alpha > 1e10:
            alpha = 1e10
        # keep any single move at or below 4 log-units so one wild step
        # cannot throw the iterate past the divergence cap
        if alpha > 4.0 / (gninf if gninf > 1e-30 else 1e-30):
            alpha = 4.0 / (gninf if gninf > 1e-30 else 1e-30)
        fref = fhist[0]
        for h in range(1, hcount):
            if fhist[h] > fref:
                fref = fhist[h]
        gsq = gnorm * gnorm
        accepted = False
        for h in range(60):
            for j in range(n):
                ztry[j] = z[j] - alpha * g[j]
            ftry = _pen_vg(obj_logc, obj_A, con_logc, con_A, con_ptr,
                           ztry, rho, False, gtry, eo, ec, &gscale)
            if isfinite(ftry) and ftry <= fref - 1e-4 * alpha * gsq:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            flag = 3
            break
        fnew = _pen_vg(obj_logc, obj_A, con_logc, con_A, con_ptr, ztry,
                       rho, True, gtry, eo, ec, &gscale)
        sts = 0.0
        sty = 0.0
        for j in range(n):
            sv = ztry[j] - z[j]
            yv = gtry[j] - g[j]
            sts += sv * sv
            sty += sv * yv
        step = sts / sty if sty > 1e-300 else alpha * 2.0
        for j in range(n):
            z[j] = ztry[j]
            g[j] = gtry[j]
        f = fnew
        if hcount < 8:
            fhist[hcount] = f
            hcount += 1
        else:
            for k in range(7):
                fhist[k] = fhist[k + 1]
            fhist[7] = f
    gnorm = 0.0
    for j in range(n):
        gnorm += g[j] * g[j]
    gnorm = sqrt(gnorm)
    return z_arr, f, gnorm, gscale, iters, flag
