"""Statevector and density-matrix circuit backends.

Probabilistic gates are expanded exactly: the statevector backend evolves a
weighted ensemble over the 2^k present/absent configurations, the density
backend applies the equivalent mixture map gate by gate (identical result by
linearity).  The density backend optionally attaches a synthetic per-site
thermal noise model: after every gate of nonzero duration each involved site
relaxes for that duration with its own (T1, T2), and delay gates additionally
accumulate a deterministic drift phase.  That one mechanism realizes both the
noisy-identity-gate method and the delay-based inherent-noise method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .circuits import Circuit, Gate
from .dynamics import DensityMatrix
from .relaxation import RelaxationParams, infinite_temperature_thermal_channel

STATEVECTOR_MAX_SITES = 12
DENSITY_NOISE_MAX_SITES = 6

DEFAULT_QUBIT_T1_NS = 100_000.0  # 100 us
DEFAULT_QUBIT_T2_NS = 100_000.0
DEFAULT_IDENTITY_DURATION_NS = 35.5


@dataclass(frozen=True)
class SyntheticQubitNoise:
    """Per-site thermal relaxation standing in for inherent hardware noise."""

    T1: tuple[float, ...] | float = DEFAULT_QUBIT_T1_NS
    T2: tuple[float, ...] | float = DEFAULT_QUBIT_T2_NS
    gate_durations: dict = field(default_factory=dict)  # kind -> ns (DELAY uses its param)
    # deterministic per-site Z-phase accumulated during delays, rad/ns;
    # a common-mode rate is invisible to the singlet subspace
    drift_phase_rate: tuple[float, ...] | float = 0.0

    def site_T1(self, site: int) -> float:
        return self.T1[site] if isinstance(self.T1, tuple) else self.T1

    def site_T2(self, site: int) -> float:
        return self.T2[site] if isinstance(self.T2, tuple) else self.T2

    def site_drift(self, site: int) -> float:
        if isinstance(self.drift_phase_rate, tuple):
            return self.drift_phase_rate[site]
        return self.drift_phase_rate

    def duration_of(self, gate: Gate) -> float:
        if gate.kind == "DELAY":
            return gate.duration
        return float(self.gate_durations.get(gate.kind, 0.0))


def _gate_matrix(gate: Gate) -> np.ndarray:
    k = gate.kind
    if k == "UNITARY":
        return gate.matrix
    if k == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if k == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if k == "DELAY":
        return np.eye(2, dtype=complex)
    if k == "RX":
        th = gate.params[0] / 2
        return np.array([[math.cos(th), -1j * math.sin(th)],
                         [-1j * math.sin(th), math.cos(th)]], dtype=complex)
    if k == "RZ":
        th = gate.params[0] / 2
        return np.array([[np.exp(-1j * th), 0], [0, np.exp(1j * th)]], dtype=complex)
    if k == "U3":
        th, phi, lam = gate.params
        c, s = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -np.exp(1j * lam) * s],
                         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=complex)
    if k == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                        dtype=complex)
    if k == "CRX":
        rx = _gate_matrix(Gate("RX", (0,), (gate.params[0],)))
        out = np.eye(4, dtype=complex)
        out[2:, 2:] = rx
        return out
    raise ValueError(f"unknown gate kind {k!r}")


def apply_unitary_to_state(psi: np.ndarray, U: np.ndarray, sites: tuple[int, ...],
                           n: int) -> np.ndarray:
    """Apply U on the given sites of an n-qubit statevector."""
    k = len(sites)
    work = psi.reshape([2] * n)
    work = np.moveaxis(work, sites, range(k))
    shape = work.shape
    work = U @ work.reshape(2**k, -1)
    work = np.moveaxis(work.reshape(shape), range(k), sites)
    return work.reshape(-1)


def apply_unitary_to_density(rho: np.ndarray, U: np.ndarray, sites: tuple[int, ...],
                             n: int) -> np.ndarray:
    work = rho.reshape([2] * (2 * n))
    ket_axes = list(sites)
    bra_axes = [n + s for s in sites]
    k = len(sites)
    work = np.moveaxis(work, ket_axes, range(k))
    shape = work.shape
    work = (U @ work.reshape(2**k, -1)).reshape(shape)
    work = np.moveaxis(work, range(k), ket_axes)
    work = np.moveaxis(work, bra_axes, range(k))
    shape = work.shape
    work = (U.conj() @ work.reshape(2**k, -1)).reshape(shape)
    work = np.moveaxis(work, range(k), bra_axes)
    return work.reshape(rho.shape)


def _apply_kraus_to_density(rho: np.ndarray, ops, site: int, n: int) -> np.ndarray:
    out = np.zeros_like(rho)
    for K in ops:
        work = rho.reshape([2] * (2 * n))
        work = np.moveaxis(work, site, 0)
        shape = work.shape
        work = (K @ work.reshape(2, -1)).reshape(shape)
        work = np.moveaxis(work, 0, site)
        work = np.moveaxis(work, n + site, 0)
        shape = work.shape
        work = (K.conj() @ work.reshape(2, -1)).reshape(shape)
        work = np.moveaxis(work, 0, n + site)
        out += work.reshape(rho.shape)
    return out


def expand_probabilistic(circuit: Circuit) -> list[tuple[float, Circuit]]:
    """Weighted mixture over all present/absent configurations of probabilistic gates."""
    slots = circuit.probabilistic_gates
    if not slots:
        return [(1.0, circuit)]
    configs = []
    for choice in iter_product((True, False), repeat=len(slots)):
        weight = 1.0
        gates = []
        picks = dict(zip(slots, choice))
        for i, g in enumerate(circuit.gates):
            if i in picks:
                weight *= g.prob if picks[i] else (1.0 - g.prob)
                if picks[i]:
                    gates.append(Gate(g.kind, g.sites, g.params, None, g.matrix))
            else:
                gates.append(g)
        if weight > 0.0:
            cfg = Circuit(circuit.site_count, gates, circuit.measured_sites)
            configs.append((weight, cfg))
    return configs


def run_statevector(circuit: Circuit, psi0: np.ndarray | None = None) -> np.ndarray:
    """Deterministic statevector simulation (no probabilistic gates, no noise)."""
    n = circuit.site_count
    if n > STATEVECTOR_MAX_SITES:
        raise ValueError(f"statevector backend capped at {STATEVECTOR_MAX_SITES} sites")
    if circuit.probabilistic_gates:
        raise ValueError("probabilistic gates require expand_probabilistic or run_density")
    if psi0 is None:
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(psi0, dtype=complex)
    for g in circuit.gates:
        psi = apply_unitary_to_state(psi, _gate_matrix(g), g.sites, n)
    return psi


def run_statevector_ensemble(circuit: Circuit,
                             psi0: np.ndarray | None = None) -> list[tuple[float, np.ndarray]]:
    """Exact probabilistic-gate expansion as a weighted statevector ensemble."""
    return [(w, run_statevector(cfg, psi0)) for w, cfg in expand_probabilistic(circuit)]


def run_density(circuit: Circuit, rho0: np.ndarray | None = None,
                noise: SyntheticQubitNoise | None = None) -> DensityMatrix:
    """Density-matrix simulation with exact probabilistic-gate mixtures.

    With a noise model attached, each gate is followed by per-site thermal
    relaxation for the gate duration; delay gates also accumulate the model's
    deterministic drift phase.
    """
    n = circuit.site_count
    if noise is not None and n > DENSITY_NOISE_MAX_SITES:
        raise ValueError(f"density backend with noise capped at {DENSITY_NOISE_MAX_SITES} sites")
    if noise is None and n > STATEVECTOR_MAX_SITES // 2:
        raise ValueError("density backend capped at "
                         f"{STATEVECTOR_MAX_SITES // 2} sites without noise")
    dim = 2**n
    if rho0 is None:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
    else:
        rho = np.array(rho0, dtype=complex)

    for g in circuit.gates:
        U = _gate_matrix(g)
        applied = apply_unitary_to_density(rho, U, g.sites, n)
        if g.prob is not None:
            rho = (1.0 - g.prob) * rho + g.prob * applied
        else:
            rho = applied
        if noise is not None:
            dt = noise.duration_of(g)
            if dt > 0.0:
                for s in g.sites:
                    params = RelaxationParams(dt, noise.site_T1(s), noise.site_T2(s))
                    chan = infinite_temperature_thermal_channel(params)
                    rho = _apply_kraus_to_density(rho, chan.operators, s, n)
                    if g.kind == "DELAY" and noise.site_drift(s):
                        drift = _gate_matrix(Gate("RZ", (s,), (noise.site_drift(s) * dt,)))
                        rho = apply_unitary_to_density(rho, drift, (s,), n)
    return DensityMatrix(rho, (2,) * n, tuple(f"q{i}" for i in range(n)))


def partial_trace(rho: np.ndarray, keep: tuple[int, ...], n: int) -> np.ndarray:
    """Trace out all sites except ``keep`` (result ordered as ``keep``)."""
    work = rho.reshape([2] * (2 * n))
    m = n
    for s in sorted((s for s in range(n) if s not in keep), reverse=True):
        # descending order keeps lower site axes in place
        work = np.trace(work, axis1=s, axis2=s + m)
        m -= 1
    k = len(keep)
    rank = list(np.argsort(np.argsort(keep)))
    perm = rank + [k + r for r in rank]
    work = work.reshape([2] * (2 * k))
    return np.transpose(work, perm).reshape(2**k, 2**k)
