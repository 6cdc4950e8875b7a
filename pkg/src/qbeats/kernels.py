"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The one genuinely hot inner loop in this package is the eigenbasis phase
reassembly: given H = V w V^dag, an initial density matrix and an observable,
the expectation value at every time point is

    f(t) = sum_jk M_jk exp(-i (w_j - w_k) t),    M = (V^dag rho V) * (V^dag P V)^T

which is O(dim^2) work per time point.  The numba path fuses the loop and
parallelizes over time points without materializing dim x n_times
temporaries; the numpy path evaluates the same bilinear form with one BLAS
matmul.  BLAS wins for large dimensions, the fused loop for the small sector
blocks that dominate the density pipelines, so the default dispatch is
size-based (see benchmarks/bench_kernels.py).

Backend selection: QBEATS_KERNEL = auto (default) | numba | numpy.
QBEATS_DISABLE_NUMBA=1 is an alias for numpy; both also apply when numba is
not importable.
"""

from __future__ import annotations

import os

import numpy as np

_MODE = os.environ.get("QBEATS_KERNEL", "auto").strip().lower() or "auto"
if os.environ.get("QBEATS_DISABLE_NUMBA", "").strip() not in ("", "0"):
    _MODE = "numpy"
if _MODE not in ("auto", "numba", "numpy"):
    raise ValueError(f"QBEATS_KERNEL must be auto, numba or numpy, got {_MODE!r}")

# fused loop beats one zgemm only while the matrix stays cache-friendly
NUMBA_DIM_CUTOFF = 256

try:  # pragma: no cover - import guard
    if _MODE == "numpy":
        raise ImportError("numba disabled by environment")
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False
    if _MODE == "numba":
        raise


def kernel_backend() -> str:
    """Active backend policy: 'numba', 'numpy', or 'auto (numba <= N)'."""
    if not _HAVE_NUMBA:
        return "numpy"
    if _MODE == "numba":
        return "numba"
    return f"auto (numba for dim <= {NUMBA_DIM_CUTOFF})"


def phase_sum_numpy(M: np.ndarray, w: np.ndarray, times: np.ndarray) -> np.ndarray:
    """f(t) = sum_jk M_jk exp(-i(w_j - w_k) t) for every t, via BLAS.

    With u_j(t) = exp(-i w_j t) the sum is u(t)^T M conj(u(t)); evaluating
    W = M conj(U) for the full time grid turns the dim^2 x T loop into one
    zgemm.  Memory per call: 2 * dim * T complex temporaries.
    """
    U = np.exp(-1j * np.outer(w, times))
    W = M @ np.conj(U)
    return np.einsum("jt,jt->t", U, W)


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True, fastmath=True)
    def _phase_sum_numba(Mr, Mi, w, times, out_r, out_i):  # pragma: no cover - compiled
        n = w.shape[0]
        T = times.shape[0]
        for ti in prange(T):
            t = times[ti]
            ur = np.empty(n)
            ui = np.empty(n)
            for j in range(n):
                ur[j] = np.cos(w[j] * t)
                ui[j] = -np.sin(w[j] * t)
            acc_r = 0.0
            acc_i = 0.0
            for j in range(n):
                # s_j accumulates M_jk * conj(u_k) with conj(u_k) = (ur[k], -ui[k])
                sr = 0.0
                si = 0.0
                for k in range(n):
                    sr += Mr[j, k] * ur[k] + Mi[j, k] * ui[k]
                    si += Mi[j, k] * ur[k] - Mr[j, k] * ui[k]
                acc_r += ur[j] * sr - ui[j] * si
                acc_i += ur[j] * si + ui[j] * sr
            out_r[ti] = acc_r
            out_i[ti] = acc_i

    def phase_sum_numba(M: np.ndarray, w: np.ndarray, times: np.ndarray) -> np.ndarray:
        out_r = np.empty(len(times))
        out_i = np.empty(len(times))
        _phase_sum_numba(
            np.ascontiguousarray(M.real),
            np.ascontiguousarray(M.imag),
            np.ascontiguousarray(w, dtype=np.float64),
            np.ascontiguousarray(times, dtype=np.float64),
            out_r,
            out_i,
        )
        return out_r + 1j * out_i


def phase_sum(M: np.ndarray, w: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Dispatch to the active backend."""
    if _HAVE_NUMBA and (_MODE == "numba" or M.shape[0] <= NUMBA_DIM_CUTOFF):
        return phase_sum_numba(M, w, times)
    return phase_sum_numpy(M, w, times)
