"""Gate-level circuit representation and its line-oriented text format.

Sites are qubit indices; site 0 is the leftmost (most significant) tensor
factor.  Probabilistic gates carry an insertion probability and are expanded
exactly by the backends, never sampled.

Text dump format (one item per line, '#' for comments):

    SITES <n>
    GATE <kind> <site[,site...]> [<param[,param...]>] [p=<prob>]
    MEASURE <site[,site...]>

UNITARY gates dump their dimension and a content hash instead of matrix
elements; dumps containing them can be compared but not re-parsed into a
runnable circuit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

KINDS_1Q = ("X", "H", "Z", "RX", "RZ", "U3", "DELAY")
KINDS_2Q = ("CNOT", "CRX")
PARAM_COUNTS = {"X": 0, "H": 0, "Z": 0, "RX": 1, "RZ": 1, "U3": 3, "DELAY": 1,
                "CNOT": 0, "CRX": 1}


@dataclass(frozen=True)
class Gate:
    """One circuit element; DELAY params hold the duration in ns."""

    kind: str
    sites: tuple[int, ...]
    params: tuple[float, ...] = ()
    prob: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "UNITARY":
            if self.matrix is None:
                raise ValueError("UNITARY gate requires a matrix")
            d = 2 ** len(self.sites)
            if self.matrix.shape != (d, d):
                raise ValueError("UNITARY matrix size does not match site count")
        elif self.kind in PARAM_COUNTS:
            if len(self.params) != PARAM_COUNTS[self.kind]:
                raise ValueError(f"{self.kind} expects {PARAM_COUNTS[self.kind]} params")
            n_sites = 2 if self.kind in KINDS_2Q else 1
            if len(self.sites) != n_sites:
                raise ValueError(f"{self.kind} expects {n_sites} site(s)")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.prob is not None and not 0.0 <= self.prob <= 1.0:
            raise ValueError("gate probability must be in [0, 1]")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("gate sites must be distinct")
        if not all(np.isfinite(self.params)):
            raise ValueError("gate parameters must be finite")

    @property
    def duration(self) -> float:
        return self.params[0] if self.kind == "DELAY" else 0.0


@dataclass
class Circuit:
    """Ordered gate list over a fixed number of qubit sites."""

    site_count: int
    gates: list[Gate] = field(default_factory=list)
    measured_sites: tuple[int, ...] = ()

    def add(self, kind: str, sites, params=(), prob=None, matrix=None) -> "Circuit":
        sites = (sites,) if isinstance(sites, int) else tuple(sites)
        params = (params,) if isinstance(params, (int, float)) else tuple(params)
        gate = Gate(kind, sites, params, prob, matrix)
        if any(s < 0 or s >= self.site_count for s in gate.sites):
            raise ValueError(f"gate sites {gate.sites} out of range for {self.site_count} sites")
        self.gates.append(gate)
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.site_count != self.site_count:
            raise ValueError("site counts differ")
        self.gates.extend(other.gates)
        return self

    @property
    def probabilistic_gates(self) -> list[int]:
        return [i for i, g in enumerate(self.gates) if g.prob is not None]

    def dump(self) -> str:
        lines = [f"SITES {self.site_count}"]
        for g in self.gates:
            parts = ["GATE", g.kind, ",".join(map(str, g.sites))]
            if g.kind == "UNITARY":
                digest = hashlib.sha256(
                    np.ascontiguousarray(np.round(g.matrix, 12)).tobytes()
                ).hexdigest()[:16]
                parts.append(f"dim={g.matrix.shape[0]},sha256={digest}")
            elif g.params:
                parts.append(",".join(f"{p:.12g}" for p in g.params))
            if g.prob is not None:
                parts.append(f"p={g.prob:.12g}")
            lines.append(" ".join(parts))
        if self.measured_sites:
            lines.append("MEASURE " + ",".join(map(str, self.measured_sites)))
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> "Circuit":
        circuit = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            if head == "SITES":
                circuit = Circuit(int(rest[0]))
            elif head == "GATE":
                if circuit is None:
                    raise ValueError("GATE before SITES")
                kind = rest[0]
                if kind == "UNITARY":
                    raise ValueError("UNITARY gates cannot be re-parsed from a dump")
                sites = tuple(int(s) for s in rest[1].split(","))
                params: tuple[float, ...] = ()
                prob = None
                for token in rest[2:]:
                    if token.startswith("p="):
                        prob = float(token[2:])
                    else:
                        params = tuple(float(x) for x in token.split(","))
                circuit.add(kind, sites, params, prob)
            elif head == "MEASURE":
                circuit.measured_sites = tuple(int(s) for s in rest[0].split(","))
            else:
                raise ValueError(f"unrecognized line: {raw!r}")
        if circuit is None:
            raise ValueError("no SITES line found")
        return circuit
