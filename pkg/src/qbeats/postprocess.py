"""Fluorescence-intensity post-processing and TR-MFE ratio curves.

Singlet-probability traces become ideal intensities through the geminate
lifetime envelope F(t) = 1/(t+t0)^(3/2) and the recombination fraction
theta; observed intensities fold in the fluorescence decay E(t) =
exp(-t/tau_f) (causal) and the detector response G(t), a centered boxcar of
width t_g.  The reported ratio is R = (E * I_B * G) / (E * I_0 * G).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import TimeSeries

DENOMINATOR_RELATIVE_FLOOR = 1e-12


@dataclass(frozen=True)
class FluorescenceParams:
    """theta (recombination fraction), tau_f, t0, t_g (all times ns)."""

    theta: float
    tau_f: float
    t0: float
    t_g: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.tau_f <= 0 or self.t0 <= 0 or self.t_g <= 0:
            raise ValueError("tau_f, t0 and t_g must be positive")


def _uniform_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    if len(steps) == 0:
        raise ValueError("need at least two grid points")
    h = steps[0]
    if not np.allclose(steps, h, rtol=1e-9, atol=1e-12):
        raise ValueError("post-processing requires a uniform time grid")
    return float(h)


def ideal_intensity(S: TimeSeries, params: FluorescenceParams) -> TimeSeries:
    """I~(t) = F(t) [theta S(t) + (1-theta)/4] with F(t) = (t+t0)^(-3/2)."""
    shifted = S.times + params.t0
    if np.any(shifted <= 0):
        raise ValueError("t + t0 must be positive on the whole grid")
    f = shifted ** -1.5
    vals = f * (params.theta * S.values + 0.25 * (1.0 - params.theta))
    return TimeSeries(S.times, vals, f"I_{S.label}" if S.label else "I")


def boxcar_kernel(t_g: float, step: float) -> np.ndarray:
    """Centered boxcar of width t_g, height 1/t_g, cell-overlap discretized.

    Odd length; edge cells carry their partial overlap so the kernel mass is
    exactly 1 (a final one-cell compensation absorbs float rounding).
    """
    half = t_g / 2
    K = int(math.ceil(half / step + 0.5))
    offsets = np.arange(-K, K + 1) * step
    lo = np.maximum(offsets - step / 2, -half)
    hi = np.minimum(offsets + step / 2, half)
    w = np.clip(hi - lo, 0.0, None) / t_g
    for _ in range(3):  # absorb float rounding into the center cell
        defect = 1.0 - w.sum()
        if defect == 0.0:
            break
        w[K] += defect
    return w


def exponential_kernel(tau_f: float, step: float, n_max: int) -> np.ndarray:
    """Causal exp(-t/tau_f) sampled with trapezoidal weights, truncated."""
    n = min(n_max, int(math.ceil(50 * tau_f / step)) + 1)
    k = np.arange(n)
    w = step * np.exp(-k * step / tau_f)
    w[0] *= 0.5
    return w


def observed_intensity(S: TimeSeries, params: FluorescenceParams) -> TimeSeries:
    """E * I~ * G on the trace's grid (zero-extended to the left of t=0)."""
    h = _uniform_step(S.times)
    if h > min(params.tau_f, params.t_g) / 4:
        raise ValueError(
            f"grid step {h} ns too coarse: need <= min(tau_f, t_g)/4 = "
            f"{min(params.tau_f, params.t_g) / 4} ns"
        )
    ideal = ideal_intensity(S, params)
    e = exponential_kernel(params.tau_f, h, len(S.times))
    g = boxcar_kernel(params.t_g, h)
    vals = np.convolve(ideal.values, e)[: len(S.times)]
    k = len(g) // 2
    vals = np.convolve(vals, g)[k: k + len(S.times)]
    out = TimeSeries(S.times, vals, ideal.label, dict(S.meta))
    out.meta["edge_unreliable_before_ns"] = params.t_g + 3 * params.tau_f
    return out


def observed_ratio(S_B: TimeSeries, S_0: TimeSeries,
                   params: FluorescenceParams) -> TimeSeries:
    """R(t) = [E * I_B * G] / [E * I_0 * G], restricted to a safe denominator."""
    if S_B.times.shape != S_0.times.shape or not np.allclose(S_B.times, S_0.times):
        raise ValueError("field-on and field-off traces must share a grid")
    num = observed_intensity(S_B, params)
    den = observed_intensity(S_0, params)
    floor = DENOMINATOR_RELATIVE_FLOOR * np.abs(den.values).max()
    mask = np.abs(den.values) > floor
    if not mask.any():
        raise ValueError("denominator underflow across the whole grid")
    ratio = num.values[mask] / den.values[mask]
    out = TimeSeries(S_B.times[mask], ratio, "I_B/I_0")
    out.meta["edge_unreliable_before_ns"] = params.t_g + 3 * params.tau_f
    return out
