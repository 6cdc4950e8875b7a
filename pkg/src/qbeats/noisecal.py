"""Measurement-statistics correction and injection for delay-based noise runs.

A noisy run of the Hamiltonian circuit yields damped Bell-outcome
probabilities; a reference run with the circuit replaced by matched-duration
delays isolates the noise.  The correction equations recover the undamped
statistics

    T+_k = (T+_k~ - T+') / (1 - 4 T+')          (and likewise for T-)
    A_k  = S_k~  - T+_k T+' - T-_k T-'
    B_k  = T0_k~ - T+_k T+' - T-_k T-'
    S_k  = (A_k S' - B_k T0') / (S'^2 - T0'^2)
    T0_k = (B_k S' - A_k T0') / (S'^2 - T0'^2)

and the injection step folds a target channel's statistics back in:

    S_k^n = S_k S'' + T0_k T0'' + T+_k T+'' + T-_k T-''.

The forward damping model implied by inverting the correction equations is
also provided; correct(damp(x)) round-trips exactly up to float error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SINGLET, pair_probabilities
from .relaxation import RelaxationParams, relax_pair_trajectory

DENOMINATOR_FLOOR = 1e-6


@dataclass(frozen=True)
class MeasurementStats:
    """Bell-basis outcome probabilities (singlet, T0, T+, T-)."""

    s: float
    t0: float
    tp: float
    tm: float

    def __post_init__(self):
        # corrected statistics are estimators and may carry small model error,
        # so construction is lenient; measured/channel stats use validate()
        total = self.s + self.t0 + self.tp + self.tm
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"outcome probabilities sum to {total}, not 1")
        if min(self.s, self.t0, self.tp, self.tm) < -0.05:
            raise ValueError("strongly negative outcome probability")

    def validate(self, tol: float = 1e-12) -> "MeasurementStats":
        total = self.s + self.t0 + self.tp + self.tm
        if abs(total - 1.0) > tol:
            raise ValueError(f"outcome probabilities sum to {total}, not 1")
        if min(self.s, self.t0, self.tp, self.tm) < -tol:
            raise ValueError("negative outcome probability")
        return self

    @staticmethod
    def from_array(p) -> "MeasurementStats":
        p = np.asarray(p, dtype=float)
        p = np.where(np.abs(p) < 1e-15, 0.0, p)
        return MeasurementStats(*p)

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.t0, self.tp, self.tm])


def correct_stats(measured: MeasurementStats, reference: MeasurementStats,
                  floor: float = DENOMINATOR_FLOOR) -> MeasurementStats:
    """Recover undamped statistics from a damped run and its delay-only reference."""
    den_p = 1.0 - 4.0 * reference.tp
    den_m = 1.0 - 4.0 * reference.tm
    den_s = reference.s**2 - reference.t0**2
    if min(abs(den_p), abs(den_m), abs(den_s)) < floor:
        raise ValueError(
            "unrecoverable noise level: correction denominators "
            f"({den_p:.3e}, {den_m:.3e}, {den_s:.3e}) below floor {floor:g}"
        )
    tp = (measured.tp - reference.tp) / den_p
    tm = (measured.tm - reference.tm) / den_m
    a = measured.s - tp * reference.tp - tm * reference.tm
    b = measured.t0 - tp * reference.tp - tm * reference.tm
    s = (a * reference.s - b * reference.t0) / den_s
    t0 = (b * reference.s - a * reference.t0) / den_s
    return MeasurementStats(s, t0, tp, tm)


def damp_stats(undamped: MeasurementStats, reference: MeasurementStats) -> MeasurementStats:
    """Forward damping model (the exact inverse of ``correct_stats``)."""
    tp = undamped.tp * (1.0 - 4.0 * reference.tp) + reference.tp
    tm = undamped.tm * (1.0 - 4.0 * reference.tm) + reference.tm
    s = (undamped.s * reference.s + undamped.t0 * reference.t0
         + undamped.tp * reference.tp + undamped.tm * reference.tm)
    t0 = (undamped.t0 * reference.s + undamped.s * reference.t0
          + undamped.tp * reference.tp + undamped.tm * reference.tm)
    return MeasurementStats(s, t0, tp, tm)


def inject_singlet(undamped: MeasurementStats, target: MeasurementStats) -> float:
    """Noisy singlet probability with the target channel's statistics folded in."""
    return float(
        undamped.s * target.s + undamped.t0 * target.t0
        + undamped.tp * target.tp + undamped.tm * target.tm
    )


def channel_target_stats(params: RelaxationParams, sites: str = "both") -> MeasurementStats:
    """Bell statistics of the thermal channel applied to a fresh singlet pair."""
    rho = np.outer(SINGLET, SINGLET.conj())[None, :, :]
    relaxed = relax_pair_trajectory(rho, np.array([params.t]), params.T1, params.T2, sites)
    return MeasurementStats.from_array(pair_probabilities(relaxed)[0])
