"""End-to-end simulation pipelines: build -> evolve -> relax -> combine.

One-group systems reduce to five representative |I, m=I> evolutions whose
count-weighted average reproduces the maximally mixed nuclear state (zero
field weights over I, high field weights over |m|).  Two-group systems run
one mixed-register evolution per I2 sector; sector results are combined at
the electron-pair-trajectory level, which keeps the classical reassembly
exact also in the presence of relaxation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    SINGLET,
    TimeSeries,
    clip_probabilities,
    one_group_weights,
    pair_trajectory_pure,
    sector_statevector,
)
from .hamiltonians import (
    BlockHamiltonian,
    SpinSystemSpec,
    TwoGroupSector,
    build_reduced_one_group,
    build_two_group_block,
    distinct_spins,
    one_group_reduced_index,
)
from .relaxation import relax_pair_trajectory, relaxed_singlet_values
from .spinalg import HalfInt, spin_addition_counts


@dataclass
class PairTrace:
    """Electron-pair trajectory (T,4,4) on a grid, with provenance metadata."""

    times: np.ndarray
    trajectory: np.ndarray
    meta: dict

    def singlet(self, label: str = "") -> TimeSeries:
        vals = np.real(np.einsum("a,tab,b->t", SINGLET.conj(), self.trajectory, SINGLET))
        return TimeSeries(self.times, clip_probabilities(vals, label), label, dict(self.meta))

    def relaxed(self, T1: float, T2: float, sites: str = "both") -> "PairTrace":
        if math.isinf(T1) and math.isinf(T2):
            return self
        relaxed = relax_pair_trajectory(self.trajectory, self.times, T1, T2, sites)
        meta = dict(self.meta, T1=T1, T2=T2)
        return PairTrace(self.times, relaxed, meta)


def one_group_sector_trajectories(spec: SpinSystemSpec, times: np.ndarray,
                                  H: BlockHamiltonian | None = None) -> dict[HalfInt, PairTrace]:
    """Pair trajectories of |I, m=I> x |S> for every distinct I (reduced basis)."""
    n = spec.groups[0].count
    H = H or build_reduced_one_group(spec)
    nuc_dim = H.dims[1]
    out = {}
    for I in distinct_spins(n):
        psi = sector_statevector(one_group_reduced_index(n, I, I), nuc_dim)
        traj = pair_trajectory_pure(H, psi, times)
        out[I] = PairTrace(times, traj, {"I": I, "m": I})
    return out


def one_group_average_trace(spec: SpinSystemSpec, field_regime: str,
                            times: np.ndarray, apply_noise: bool = True) -> TimeSeries:
    """Count-weighted mixed-state S(t) for a one-group system.

    The |I, m=I> representatives stand in for their degeneracy class (I at
    zero field, |m| at high field); relaxation, when enabled and finite, is
    applied to the averaged pair trajectory at each measurement time.
    """
    n = spec.groups[0].count
    trajs = one_group_sector_trajectories(spec, times)
    weights = one_group_weights(n, field_regime)
    total = sum(weights.values())
    avg = np.zeros_like(next(iter(trajs.values())).trajectory)
    for key, w in weights.items():
        avg = avg + (w / total) * trajs[HalfInt(abs(key.twice_value))].trajectory
    trace = PairTrace(times, avg, {"system": "one_group", "field_regime": field_regime})
    if apply_noise:
        trace = trace.relaxed(spec.T1, spec.T2)
    return trace.singlet(f"S_{field_regime}")


def two_group_sector_trace(sector: TwoGroupSector, times: np.ndarray) -> PairTrace:
    """Mixed-register pair trajectory of one I2 sector (real slots only).

    Subnormalized by design: each real register slot carries weight
    1/register_size, exactly what a padded purification run leaves behind
    once the frozen padding-state contribution is subtracted.
    """
    H = sector.hamiltonian
    reg = sector.register_size
    acc = None
    for r in range(sector.real_register):
        traj = pair_trajectory_pure(H, sector_statevector(r, reg), times)
        acc = traj if acc is None else acc + traj
    return PairTrace(times, acc / reg, {"I2": sector.I2})


def two_group_pair_trace(spec: SpinSystemSpec, times: np.ndarray,
                         threads: int = 1) -> PairTrace:
    """Fully mixed nuclear-state pair trajectory via I2 sector decomposition."""
    n1, n2 = spec.groups[0].count, spec.groups[1].count
    counts2 = spin_addition_counts(n2)
    total = 2 ** (n1 + n2)
    sectors = sorted(counts2, reverse=True)

    def sector_contribution(I2):
        sector = build_two_group_block(I2, spec)
        tr = two_group_sector_trace(sector, times)
        return (counts2[I2] * sector.register_size / total) * tr.trajectory

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(sector_contribution, sectors))
    else:
        parts = [sector_contribution(I2) for I2 in sectors]
    return PairTrace(times, sum(parts), {"system": "two_group"})


def two_group_mixed_trace(spec: SpinSystemSpec, times: np.ndarray,
                          apply_noise: bool = True, threads: int = 1) -> TimeSeries:
    """Fully mixed nuclear-state S(t) for a two-group system via I2 sectors."""
    trace = two_group_pair_trace(spec, times, threads)
    if apply_noise:
        trace = trace.relaxed(spec.T1, spec.T2)
    return trace.singlet("S_two_group")


def half_rate_equivalence_check(spec: SpinSystemSpec, times: np.ndarray,
                                tol: float = 1e-10) -> bool:
    """Both-site channel at (T1,T2) vs single-site at (T1/2,T2/2), spec-level.

    Runs the system's standard coherent pipeline and compares the relaxed
    singlet traces pointwise.
    """
    if len(spec.groups) == 1:
        trajs = one_group_sector_trajectories(spec, times)
        traj = sum(t.trajectory for t in trajs.values()) / len(trajs)
    else:
        I2_max = max(spin_addition_counts(spec.groups[1].count))
        traj = two_group_sector_trace(build_two_group_block(I2_max, spec), times).trajectory
    both = relaxed_singlet_values(traj, times, spec.T1, spec.T2, sites="both")
    single = relaxed_singlet_values(traj, times, spec.T1 / 2, spec.T2 / 2, sites="e1")
    return bool(np.abs(both - single).max() <= tol)
