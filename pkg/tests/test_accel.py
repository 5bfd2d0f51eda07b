"""Both kernel flavours must agree; integer outputs bit-identically."""

import os
import subprocess
import sys

import numpy as np
import pytest

from puremit import _accel


def _random_kraus(rng, k, d):
    ops = rng.normal(size=(k, d, d)) + 1j * rng.normal(size=(k, d, d))
    return np.ascontiguousarray(ops)


def test_kraus_apply_matches_direct_sum():
    rng = np.random.default_rng(5)
    for k, d in [(1, 2), (4, 2), (3, 8), (16, 4)]:
        ops = _random_kraus(rng, k, d)
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        want = sum(ops[i] @ rho @ ops[i].conj().T for i in range(k))
        got = _accel.kraus_apply_numpy(ops, ops.conj().transpose(0, 2, 1), rho)
        assert np.max(np.abs(got - want)) < 1e-12


@pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba unavailable")
def test_kraus_apply_flavours_agree():
    rng = np.random.default_rng(6)
    for k, d in [(1, 2), (4, 4), (7, 8)]:
        ops = _random_kraus(rng, k, d)
        dag = np.ascontiguousarray(ops.conj().transpose(0, 2, 1))
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a = _accel.kraus_apply_numpy(ops, dag, rho)
        b = _accel.kraus_apply_numba(ops, dag, rho)
        assert np.max(np.abs(a - b)) < 1e-12


def test_bin_outcomes_matches_searchsorted():
    rng = np.random.default_rng(7)
    probs = np.array([0.1, 0.0, 0.4, 0.5])
    cum = np.cumsum(probs)
    draws = rng.uniform(size=1000)
    counts = _accel.bin_outcomes_numpy(cum, draws)
    assert counts.sum() == 1000
    assert counts[1] == 0  # zero-probability bin never drawn
    idx = np.searchsorted(cum, draws, side="right")
    want = np.bincount(np.minimum(idx, 3), minlength=4)
    assert np.array_equal(counts, want)


def test_bin_outcomes_folds_overflow_draws():
    # rounding can leave cum[-1] slightly below 1; draws beyond it must
    # land in the last bin instead of indexing out of range
    cum = np.array([0.25, 0.5, 1.0 - 1e-12])
    draws = np.array([0.999999999999999, 0.1, 0.3])
    counts = _accel.bin_outcomes_numpy(cum, draws)
    assert counts.tolist() == [1, 1, 1]


@pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba unavailable")
def test_bin_outcomes_flavours_bit_identical():
    rng = np.random.default_rng(8)
    for n in (1, 2, 17):
        probs = rng.uniform(size=n)
        cum = np.cumsum(probs / probs.sum())
        draws = rng.uniform(size=5000)
        a = _accel.bin_outcomes_numpy(cum, draws)
        b = _accel.bin_outcomes_numba(cum, draws)
        assert np.array_equal(a, b)


def test_backend_name_matches_flag():
    assert _accel.backend() in ("numba", "numpy")
    assert _accel.backend() == ("numba" if _accel.NUMBA_ENABLED else "numpy")


def test_env_flag_forces_numpy_path():
    env = dict(os.environ, PUREMIT_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "from puremit._accel import backend; print(backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
