"""Pure-numpy implementations of the numeric kernels.

This module mirrors the API of the compiled extension ``_ckernels`` and
is selected by ``lexgp._kernels`` when the extension is unavailable (or
when LEXGP_BACKEND=python forces it).  Keep the two in lockstep: the
parity tests compare them on random data.

Kernel inventory:

* ``posy_eval_log`` -- posynomial value at x = exp(z) plus its gradient
  in z, computed through a max-shifted sum of exponentials.
* ``dual_objective`` / ``dual_gradient`` -- the log of the product-form
  dual function and its gradient, with the 0*log(0) -> 0 convention.
* ``oracle_stage`` -- one penalty stage of the independent primal
  descent: nonmonotone backtracking gradient descent with spectral
  (Barzilai-Borwein) initial steps.  This deliberately carries its own
  sum-of-exponentials code so the oracle shares no evaluation route with
  the dual-based solver.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def posy_eval_log(logc, A, z):
    """Value of sum_t exp(logc_t + A[t] . z) and its gradient in z.

    Returns ``(value, grad)`` where ``grad[j]`` is the derivative of the
    value (not of its log) with respect to ``z[j]``.
    """
    s = A @ z + logc
    m = float(s.max())
    e = np.exp(s - m)
    total = float(e.sum())
    scale = np.exp(m)
    value = scale * total
    grad = scale * (A.T @ e)
    return value, grad


def dual_objective(logc, block, nblocks, w):
    """Log of the product-form dual at weights ``w``.

    ``block[t]`` gives the group of term ``t``: 0 for the objective,
    i >= 1 for constraint i.  Zero weights contribute zero, matching the
    limit of w*log(c/w).
    """
    w = np.asarray(w, dtype=float)
    pos = w > 0.0
    phi = float(np.sum(w[pos] * (logc[pos] - np.log(w[pos]))))
    u = np.bincount(block, weights=w, minlength=nblocks)
    upos = u[1:][u[1:] > 0.0]
    if upos.size:
        phi += float(np.sum(upos * np.log(upos)))
    return phi


def dual_gradient(logc, block, nblocks, w, wfloor=1e-18):
    """Gradient of ``dual_objective`` in w.

    Weights and group sums are floored at ``wfloor`` inside the logs so
    the boundary limits come out right: a term whose whole group has
    zero weight gets gradient logc_t (the floors cancel), while a zero
    term inside an otherwise active group gets a large positive push.
    """
    w = np.asarray(w, dtype=float)
    ws = np.maximum(w, wfloor)
    u = np.bincount(block, weights=w, minlength=nblocks)
    us = np.maximum(u, wfloor)
    g = logc - np.log(ws) - 1.0
    con = block > 0
    if con.any():
        g = g.copy()
        g[con] += np.log(us[block[con]]) + 1.0
    return g


def _penalty_vg(obj_logc, obj_A, con_logc, con_A, con_ptr, z, rho, need_grad):
    """Penalized log-space objective; value, gradient and a gradient
    scale (1 + norms of the stacked pieces) used for relative tests."""
    s = obj_A @ z + obj_logc
    m = float(s.max())
    e = np.exp(s - m)
    tot = float(e.sum())
    f = m + np.log(tot)
    total = f
    g = None
    gscale = 1.0
    if need_grad:
        g = (obj_A.T @ e) / tot
        gscale += float(np.linalg.norm(g))
    ncon = len(con_ptr) - 1
    for i in range(ncon):
        lo, hi = con_ptr[i], con_ptr[i + 1]
        Ai = con_A[lo:hi]
        si = Ai @ z + con_logc[lo:hi]
        mi = float(si.max())
        ei = np.exp(si - mi)
        ti = float(ei.sum())
        vi = mi + np.log(ti)
        if vi > 0.0:
            total += rho * vi * vi
            if need_grad:
                gi = (Ai.T @ ei) / ti
                lam = 2.0 * rho * vi
                g = g + lam * gi
                gscale += lam * float(np.linalg.norm(gi))
    return total, g, gscale


def oracle_stage(obj_logc, obj_A, con_logc, con_A, con_ptr, z0, rho,
                 tol, max_iter, step0, zcap, gfloor=0.0):
    """Descend the penalized objective at one penalty weight ``rho``.

    Nonmonotone (window 8) Armijo backtracking along the negative
    gradient, with Barzilai-Borwein initial step lengths.  Stops when
    the gradient norm drops to ``max(tol * scale, gfloor)`` (scale as
    produced by the evaluation routine; ``gfloor`` is the caller's
    allowance for rounding noise in the penalty gradient, which grows
    with rho), when the iteration budget runs out, when any |z_j|
    exceeds ``zcap`` (unboundedness suspicion), or when a line search
    stalls.

    Returns ``(z, value, gnorm, gscale, iters, flag)`` with flag 0 =
    gradient converged, 1 = budget exhausted, 2 = z cap exceeded,
    3 = stalled line search.
    """
    z = np.array(z0, dtype=float, copy=True)
    f, g, gscale = _penalty_vg(obj_logc, obj_A, con_logc, con_A, con_ptr,
                               z, rho, True)
    fhist = [f]
    step = step0
    iters = 0
    flag = 1
    with np.errstate(over="ignore"):
        while iters < max_iter:
            gnorm = float(np.linalg.norm(g))
            if gnorm <= max(tol * gscale, gfloor):
                flag = 0
                break
            if float(np.abs(z).max()) > zcap:
                flag = 2
                break
            iters += 1
            gninf = float(np.abs(g).max())
            # keep any single move at or below 4 log-units so one wild
            # step cannot throw the iterate past the divergence cap
            alpha = min(max(step, 1e-14), 1e10, 4.0 / max(gninf, 1e-30))
            fref = max(fhist)
            gsq = gnorm * gnorm
            accepted = False
            for _ in range(60):
                z_try = z - alpha * g
                f_try, _, _ = _penalty_vg(obj_logc, obj_A, con_logc, con_A,
                                          con_ptr, z_try, rho, False)
                if np.isfinite(f_try) and f_try <= fref - 1e-4 * alpha * gsq:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                flag = 3
                break
            f_new, g_new, gscale = _penalty_vg(obj_logc, obj_A, con_logc,
                                               con_A, con_ptr, z_try, rho,
                                               True)
            svec = z_try - z
            yvec = g_new - g
            sty = float(svec @ yvec)
            step = float(svec @ svec) / sty if sty > 1e-300 else alpha * 2.0
            z, f, g = z_try, f_new, g_new
            fhist.append(f)
            if len(fhist) > 8:
                fhist.pop(0)
    gnorm = float(np.linalg.norm(g))
    return z, f, gnorm, gscale, iters, flag
