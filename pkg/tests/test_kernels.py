"""Parity checks between the compiled kernels and the numpy fallback,
plus the backend-selection contract."""

import os
import subprocess
import sys

import numpy as np
import pytest

from lexgp import available_backends, kernel_backend
from lexgp._kernels import _pykernels

_ckernels = pytest.importorskip(
    "lexgp._kernels._ckernels",
    reason="compiled kernels not built in this environment")


def random_posy_arrays(rng, T, n):
    logc = rng.normal(0.0, 1.0, size=T)
    A = rng.integers(-3, 4, size=(T, n)).astype(float)
    return logc, A


# ---------------------------------------------------------------------------
# elementwise parity on random data


def test_posy_eval_log_parity():
    rng = np.random.default_rng(101)
    for _ in range(25):
        T = int(rng.integers(1, 8))
        n = int(rng.integers(1, 5))
        logc, A = random_posy_arrays(rng, T, n)
        z = rng.normal(0.0, 2.0, size=n)
        vp, gp = _pykernels.posy_eval_log(logc, A, z)
        vc, gc = _ckernels.posy_eval_log(logc, A, z)
        np.testing.assert_allclose(vc, vp, rtol=1e-12)
        np.testing.assert_allclose(np.asarray(gc), gp, rtol=1e-12,
                                   atol=1e-12 * abs(vp))


def test_dual_objective_parity():
    rng = np.random.default_rng(202)
    for _ in range(25):
        T = int(rng.integers(2, 9))
        nblocks = int(rng.integers(1, 4))
        logc = rng.normal(0.0, 1.0, size=T)
        block = np.sort(rng.integers(0, nblocks, size=T)).astype(np.int32)
        block[0] = 0
        w = rng.uniform(0.0, 2.0, size=T)
        w[rng.random(T) < 0.3] = 0.0
        pp = _pykernels.dual_objective(logc, block, nblocks, w)
        cc = _ckernels.dual_objective(logc, block, nblocks, w)
        np.testing.assert_allclose(cc, pp, rtol=1e-12, atol=1e-13)


def test_dual_gradient_parity():
    rng = np.random.default_rng(303)
    for _ in range(25):
        T = int(rng.integers(2, 9))
        nblocks = int(rng.integers(1, 4))
        logc = rng.normal(0.0, 1.0, size=T)
        block = np.sort(rng.integers(0, nblocks, size=T)).astype(np.int32)
        block[0] = 0
        w = rng.uniform(0.0, 2.0, size=T)
        w[rng.random(T) < 0.3] = 0.0
        gp = _pykernels.dual_gradient(logc, block, nblocks, w)
        gc = _ckernels.dual_gradient(logc, block, nblocks, w)
        np.testing.assert_allclose(np.asarray(gc), gp, rtol=1e-12,
                                   atol=1e-12)


def test_oracle_stage_parity_on_an_easy_descent():
    # min x1^-1 x2^-1 with x1/2 <= 1, x2/4 <= 1 in log space
    obj_logc = np.array([0.0])
    obj_A = np.array([[-1.0, -1.0]])
    con_logc = np.array([np.log(0.5), np.log(0.25)])
    con_A = np.array([[1.0, 0.0], [0.0, 1.0]])
    con_ptr = np.array([0, 1, 2], dtype=np.int32)
    z0 = np.zeros(2)
    args = (obj_logc, obj_A, con_logc, con_A, con_ptr)
    zp, vp, gp, _, _, fp = _pykernels.oracle_stage(
        *args, z0.copy(), 1000.0, 1e-10, 5000, 1.0, 50.0)
    zc, vc, gc, _, _, fc = _ckernels.oracle_stage(
        *args, z0.copy(), 1000.0, 1e-10, 5000, 1.0, 50.0)
    assert fp == fc == 0
    np.testing.assert_allclose(vc, vp, rtol=1e-8)
    np.testing.assert_allclose(np.asarray(zc), np.asarray(zp), atol=1e-6)


# ---------------------------------------------------------------------------
# boundary conventions (checked on the fallback, which documents them)


def test_zero_weight_contributes_nothing_to_the_objective():
    logc = np.array([0.3, -0.7, 1.1])
    block = np.array([0, 1, 1], dtype=np.int32)
    full = _pykernels.dual_objective(logc, block, 2,
                                     np.array([1.0, 0.5, 0.0]))
    trimmed = (1.0 * (logc[0] - np.log(1.0))
               + 0.5 * (logc[1] - np.log(0.5))
               + 0.5 * np.log(0.5))
    np.testing.assert_allclose(full, trimmed, rtol=1e-14)


def test_gradient_of_a_fully_zero_block_is_its_log_coeff():
    logc = np.array([0.0, 2.5])
    block = np.array([0, 1], dtype=np.int32)
    g = _pykernels.dual_gradient(logc, block, 2, np.array([1.0, 0.0]))
    # the weight floor and the block-sum floor cancel
    np.testing.assert_allclose(g[1], logc[1], atol=1e-12)


def test_gradient_of_a_zero_weight_in_an_active_block_pushes_up():
    logc = np.array([0.0, 0.4, -0.2])
    block = np.array([0, 1, 1], dtype=np.int32)
    g = _pykernels.dual_gradient(logc, block, 2,
                                 np.array([1.0, 0.8, 0.0]))
    assert g[2] > 30.0


def test_both_backends_share_the_boundary_conventions():
    logc = np.array([0.0, 2.5, 0.4, -0.2])
    block = np.array([0, 1, 2, 2], dtype=np.int32)
    w = np.array([1.0, 0.0, 0.8, 0.0])
    gp = _pykernels.dual_gradient(logc, block, 3, w)
    gc = np.asarray(_ckernels.dual_gradient(logc, block, 3, w))
    np.testing.assert_allclose(gc, gp, rtol=1e-12)


# ---------------------------------------------------------------------------
# backend selection


def run_with_backend(value):
    env = dict(os.environ)
    if value is None:
        env.pop("LEXGP_BACKEND", None)
    else:
        env["LEXGP_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c",
         "import lexgp; print(lexgp.kernel_backend)"],
        capture_output=True, text=True, env=env, timeout=120)


def test_the_active_backend_is_a_known_one():
    assert kernel_backend in ("c", "python")
    assert kernel_backend in available_backends()
    assert "python" in available_backends()


def test_forcing_the_fallback():
    res = run_with_backend("python")
    assert res.returncode == 0
    assert res.stdout.strip() == "python"


def test_forcing_the_extension():
    res = run_with_backend("c")
    assert res.returncode == 0
    assert res.stdout.strip() == "c"


def test_auto_prefers_the_extension_when_built():
    res = run_with_backend(None)
    assert res.returncode == 0
    assert res.stdout.strip() == "c"


def test_unknown_backend_is_rejected_at_import():
    res = run_with_backend("fortran")
    assert res.returncode != 0
    assert "LEXGP_BACKEND" in res.stderr
