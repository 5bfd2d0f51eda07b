"""Inner numeric kernels, in a numba flavour and a pure-numpy flavour.

Two loops dominate runtime once circuits get deep or shot counts get
large: the Kraus sum ``sum_k K_k rho K_k^dag`` (applied once per gate and
once per noise insertion) and the binning of uniform draws into Born-rule
outcome counts (once per shot batch).  Both are implemented twice with
identical semantics.  The numba path is used when numba imports cleanly
and the environment variable ``PUREMIT_NUMBA`` is unset or truthy; set
``PUREMIT_NUMBA=0`` to force the numpy path.  Integer outputs are
bit-identical across the two paths; floating-point outputs may differ at
rounding level because summation order differs.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


def _flag_enabled() -> bool:
    val = os.environ.get("PUREMIT_NUMBA", "1").strip().lower()
    return val not in ("0", "false", "off", "no")


NUMBA_ENABLED = HAS_NUMBA and _flag_enabled()


def kraus_apply_numpy(ops: np.ndarray, ops_dag: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Return ``sum_k ops[k] @ rho @ ops_dag[k]`` via batched matmul."""
    return np.ascontiguousarray((ops @ rho @ ops_dag).sum(axis=0))


def bin_outcomes_numpy(cum: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Count draws per outcome given cumulative probabilities ``cum``.

    ``cum`` is ascending with last entry ~1; draw u lands in the first
    bin whose cumulative weight exceeds it.  Draws beyond cum[-1]
    (possible at rounding level) are folded into the last bin.
    """
    idx = np.searchsorted(cum, draws, side="right")
    idx = np.minimum(idx, cum.shape[0] - 1)
    return np.bincount(idx, minlength=cum.shape[0]).astype(np.int64)


if HAS_NUMBA:

    @numba.njit(cache=True)
    def _kraus_apply_numba(ops, ops_dag, rho):  # pragma: no cover - exercised via dispatch
        acc = np.zeros_like(rho)
        for k in range(ops.shape[0]):
            acc += np.dot(np.dot(ops[k], rho), ops_dag[k])
        return acc

    @numba.njit(cache=True)
    def _bin_outcomes_numba(cum, draws):  # pragma: no cover - exercised via dispatch
        n = cum.shape[0]
        counts = np.zeros(n, dtype=np.int64)
        for i in range(draws.shape[0]):
            u = draws[i]
            # binary search matching searchsorted(side="right")
            lo = 0
            hi = n
            while lo < hi:
                mid = (lo + hi) // 2
                if cum[mid] <= u:
                    lo = mid + 1
                else:
                    hi = mid
            if lo > n - 1:
                lo = n - 1
            counts[lo] += 1
        return counts

    def kraus_apply_numba(ops, ops_dag, rho):
        return _kraus_apply_numba(
            np.ascontiguousarray(ops),
            np.ascontiguousarray(ops_dag),
            np.ascontiguousarray(rho),
        )

    def bin_outcomes_numba(cum, draws):
        return _bin_outcomes_numba(
            np.ascontiguousarray(cum), np.ascontiguousarray(draws)
        )

else:  # pragma: no cover
    kraus_apply_numba = None
    bin_outcomes_numba = None


if NUMBA_ENABLED:
    kraus_apply = kraus_apply_numba
    bin_outcomes = bin_outcomes_numba
else:
    kraus_apply = kraus_apply_numpy
    bin_outcomes = bin_outcomes_numpy


def backend() -> str:
    """Name of the kernel path selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"
