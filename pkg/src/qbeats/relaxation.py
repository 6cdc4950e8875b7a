"""Infinite-temperature thermal relaxation as explicit Kraus channels.

Amplitude damping symmetrized over decay direction plus a probabilistic
phase flip, parameterized by T1, T2 and the elapsed time t:

    p_x = 1 - exp(-t/T1)
    p_z = (1 - exp(-t (1/T2 - 1/(2 T1)))) / 2
    phi_x = 2 asin(sqrt(p_x))

The channel fixes identity/2 (infinite-temperature fixed point); populations
approach 1/2 with factor exp(-t/T1) and coherences scale by exp(-t/T2).
Noise acts on electronic sites only and is applied once, after the coherent
block, matching the circuit placement (the channel commutes with the
electronic Zeeman evolution).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DensityMatrix, SINGLET, TimeSeries, clip_probabilities, pair_probabilities

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class RelaxationParams:
    """Channel parameters for one elapsed duration."""

    t: float
    T1: float = math.inf
    T2: float = math.inf

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("elapsed time must be >= 0")
        rate = self.dephasing_rate
        if rate < -1e-15:
            raise ValueError(
                f"unphysical parameters: 1/T2 - 1/(2 T1) = {rate} < 0 (requires T2 <= 2 T1)"
            )

    @property
    def dephasing_rate(self) -> float:
        r1 = 0.0 if math.isinf(self.T1) else 1.0 / self.T1
        r2 = 0.0 if math.isinf(self.T2) else 1.0 / self.T2
        return r2 - r1 / 2

    @property
    def p_x(self) -> float:
        return 0.0 if math.isinf(self.T1) else 1.0 - math.exp(-self.t / self.T1)

    @property
    def p_z(self) -> float:
        return 0.5 * (1.0 - math.exp(-self.t * self.dephasing_rate))

    @property
    def phi_x(self) -> float:
        return 2.0 * math.asin(math.sqrt(self.p_x))

    @property
    def population_factor(self) -> float:
        """exp(-t/T1): contraction of populations toward 1/2."""
        return 1.0 - self.p_x

    @property
    def coherence_factor(self) -> float:
        """exp(-t/T2): scaling of off-diagonal elements."""
        return math.sqrt(1.0 - self.p_x) * (1.0 - 2.0 * self.p_z)


@dataclass(frozen=True)
class KrausChannel:
    """Single-site operator-sum channel targeting one register site."""

    operators: tuple[np.ndarray, ...]
    target_site: str = "e1"

    def completeness_defect(self) -> float:
        acc = sum(k.conj().T @ k for k in self.operators)
        return float(np.abs(acc - np.eye(acc.shape[0])).max())

    def validate(self, tol: float = 1e-13) -> "KrausChannel":
        defect = self.completeness_defect()
        if defect > tol:
            raise ValueError(f"Kraus completeness violated by {defect:.2e}")
        return self


def infinite_temperature_thermal_channel(params: RelaxationParams,
                                         target_site: str = "e1") -> KrausChannel:
    """Symmetrized amplitude damping composed with a probabilistic phase flip."""
    px, pz = params.p_x, params.p_z
    if px > 0:
        k0 = np.array([[math.sqrt(1 - px), 0.0], [0.0, 1.0]], dtype=complex)
        k1 = np.array([[0.0, 0.0], [math.sqrt(px), 0.0]], dtype=complex)
        damping = [k / math.sqrt(2) for k in (k0, k1, _X @ k0 @ _X, _X @ k1 @ _X)]
    else:
        damping = [np.eye(2, dtype=complex)]
    if pz > 0:
        dephasing = [math.sqrt(1 - pz) * np.eye(2, dtype=complex), math.sqrt(pz) * _Z]
    else:
        dephasing = [np.eye(2, dtype=complex)]
    ops = tuple(d @ k for d in dephasing for k in damping)
    return KrausChannel(ops, target_site).validate()


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    """Operator-sum application on the embedded target site."""
    if channel.target_site not in rho.labels:
        raise ValueError(f"site {channel.target_site!r} not in register {rho.labels}")
    site = rho.labels.index(channel.target_site)
    n = len(rho.dims)
    d = rho.dims[site]
    work = rho.matrix.reshape(rho.dims + rho.dims)
    out = np.zeros_like(work)
    for k in channel.operators:
        if k.shape != (d, d):
            raise ValueError("Kraus operator dimension does not match target site")
        term = np.tensordot(k, work, axes=([1], [site]))
        term = np.moveaxis(term, 0, site)
        term = np.tensordot(term, k.conj().T, axes=([n + site], [0]))
        term = np.moveaxis(term, -1, n + site)
        out += term
    return DensityMatrix(out.reshape(rho.dim, rho.dim), rho.dims, rho.labels)


# ---------------------------------------------------------------------------
# Electron-pair trajectory relaxation (closed form)
# ---------------------------------------------------------------------------

def _apply_qubit_thermal_axis(traj: np.ndarray, axis_pair: tuple[int, int],
                              g: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Thermal-channel action on one qubit of a (T,2,2,2,2) trajectory stack.

    g = exp(-t/T1) population factor, f = exp(-t/T2) coherence factor.
    """
    i, j = axis_pair
    sl = [slice(None)] * traj.ndim

    def pick(bi, bj):
        s = list(sl)
        s[i], s[j] = bi, bj
        return tuple(s)

    out = np.empty_like(traj)
    g_ = g.reshape((-1,) + (1,) * (traj.ndim - 3))
    f_ = f.reshape((-1,) + (1,) * (traj.ndim - 3))
    d00, d11 = traj[pick(0, 0)], traj[pick(1, 1)]
    out[pick(0, 0)] = 0.5 * (d00 + d11) + 0.5 * g_ * (d00 - d11)
    out[pick(1, 1)] = 0.5 * (d00 + d11) - 0.5 * g_ * (d00 - d11)
    out[pick(0, 1)] = f_ * traj[pick(0, 1)]
    out[pick(1, 0)] = f_ * traj[pick(1, 0)]
    return out


def relax_pair_trajectory(traj: np.ndarray, times: np.ndarray,
                          T1: float, T2: float,
                          sites: str = "both") -> np.ndarray:
    """Apply the time-t thermal channel to each 4x4 pair state of a trajectory.

    ``sites`` selects 'both', 'e1' or 'e2'.  Matches the operator-sum channel
    exactly (closed-form population/coherence factors).
    """
    t = np.asarray(times, dtype=float)
    RelaxationParams(0.0, T1, T2)  # physicality check: 1/T2 >= 1/(2 T1)
    g = np.exp(-t / T1) if math.isfinite(T1) else np.ones_like(t)
    f = np.exp(-t / T2) if math.isfinite(T2) else np.ones_like(t)
    work = traj.reshape(len(t), 2, 2, 2, 2)  # (t, e1, e2, e1', e2')
    if sites in ("both", "e1"):
        work = _apply_qubit_thermal_axis(work, (1, 3), g, f)
    if sites in ("both", "e2"):
        work = _apply_qubit_thermal_axis(work, (2, 4), g, f)
    if sites not in ("both", "e1", "e2"):
        raise ValueError(f"unknown site selector {sites!r}")
    return work.reshape(len(t), 4, 4)


def relaxed_singlet_values(traj: np.ndarray, times: np.ndarray,
                           T1: float, T2: float, sites: str = "both") -> np.ndarray:
    relaxed = relax_pair_trajectory(traj, times, T1, T2, sites)
    return np.real(np.einsum("a,tab,b->t", SINGLET.conj(), relaxed, SINGLET))


def relaxed_singlet_trace(traj: np.ndarray, times: np.ndarray, T1: float, T2: float,
                          label: str = "", sites: str = "both") -> TimeSeries:
    vals = relaxed_singlet_values(traj, times, T1, T2, sites)
    return TimeSeries(times, clip_probabilities(vals, label), label)


def relaxed_pair_probabilities(traj: np.ndarray, times: np.ndarray,
                               T1: float, T2: float, sites: str = "both") -> np.ndarray:
    """Bell-outcome probabilities (T, 4) after per-time relaxation."""
    return pair_probabilities(relax_pair_trajectory(traj, times, T1, T2, sites))


def half_rate_equivalence_check(traj: np.ndarray, times: np.ndarray,
                                T1: float, T2: float, tol: float = 1e-10) -> bool:
    """Both electrons at (T1,T2) versus one electron at (T1/2, T2/2).

    True iff the singlet traces agree pointwise within ``tol``.
    """
    both = relaxed_singlet_values(traj, times, T1, T2, sites="both")
    single = relaxed_singlet_values(traj, times, T1 / 2, T2 / 2, sites="e1")
    return bool(np.abs(both - single).max() <= tol)
