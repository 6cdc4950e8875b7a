"""Radical-pair Hamiltonian builders.

Several representations of the same physics:

* full tensor-product Hamiltonian on one site per spin-1/2 (brute-force
  oracle),
* degeneracy-reduced total-spin basis for one nuclear group,
* the 8-dimensional partitioned form for initial states |I, m=I>,
* its Pauli-string decomposition,
* fixed-I2 sector blocks for two nuclear groups.

Tensor factor order everywhere: anion electron (e2) first, nuclear register
in the middle, cation electron (e1) last.  Within a parent spin I the nuclear
states are ordered by descending m, and each |I,m> is immediately followed by
the two e1 sublevels (up, then down).  Matrix entries are angular frequencies
in rad/ns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import hyperfine_angular_frequency, zeeman_half_angular_frequency
from .spinalg import (
    HALF,
    HalfInt,
    cg_block_matrix,
    coupled_hfc_eigenvalues,
    multiplicity,
    spin_addition_counts,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = {"I": np.eye(2, dtype=complex), "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

FULL_ORACLE_MAX_NUCLEI = 10


@dataclass(frozen=True)
class NuclearGroup:
    """A group of magnetically equivalent nuclei sharing one HFC constant."""

    count: int
    hfc_mT: float

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("nucleus count must be >= 0")
        if not math.isfinite(self.hfc_mT):
            raise ValueError("hfc must be finite")


@dataclass(frozen=True)
class SpinSystemSpec:
    """Declarative description of a radical pair."""

    groups: tuple[NuclearGroup, ...]
    g1: float = 2.0028
    g2: float = 2.0028
    field_B: float = 0.0
    T1: float = math.inf
    T2: float = math.inf

    def __post_init__(self):
        if not 1 <= len(self.groups) <= 2:
            raise ValueError("only one- and two-group systems are supported")
        if math.isfinite(self.T1) and math.isfinite(self.T2) and self.T2 > 2 * self.T1:
            raise ValueError(f"T2={self.T2} exceeds 2*T1={2 * self.T1} (unphysical dephasing rate)")
        if self.T1 <= 0 or self.T2 <= 0:
            raise ValueError("relaxation times must be positive")

    @property
    def hyperfine_rad_ns(self) -> tuple[float, ...]:
        """Angular frequency of each group's HFC constant, rad/ns."""
        return tuple(hyperfine_angular_frequency(g.hfc_mT, self.g1) for g in self.groups)

    @property
    def b1(self) -> float:
        return zeeman_half_angular_frequency(self.field_B, self.g1)

    @property
    def b2(self) -> float:
        return zeeman_half_angular_frequency(self.field_B, self.g2)


class BlockHamiltonian:
    """Hermitian matrix over a labeled register with padding metadata.

    ``dims``/``labels`` describe the tensor factors (e.g. (2, 32, 2) with
    labels ("e2", "nuc", "e1")).  ``basis_labels`` annotates the nuclear
    register slots (``None`` marks padding) and ``degeneracy`` carries the
    omitted multiplicity of each slot.  The eigendecomposition is computed
    once and cached.
    """

    def __init__(self, matrix, dims, labels, basis_labels=None, padded_rows=0,
                 degeneracy=None):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError("matrix must be square")
        if int(np.prod(dims)) != matrix.shape[0]:
            raise ValueError("register dims do not match matrix size")
        herm = np.abs(matrix - matrix.conj().T).max()
        if herm > 1e-13 * max(1.0, np.abs(matrix).max()):
            raise ValueError(f"matrix is not Hermitian (max deviation {herm:.2e})")
        self.matrix = matrix
        self.dims = tuple(int(d) for d in dims)
        self.labels = tuple(labels)
        self.basis_labels = basis_labels
        self.padded_rows = padded_rows
        self.degeneracy = degeneracy
        self._eig: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors (cached)."""
        if self._eig is None:
            w, v = np.linalg.eigh(self.matrix)
            self._eig = (w, v)
        return self._eig

    def site(self, label: str) -> int:
        return self.labels.index(label)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _kron_chain(ops) -> np.ndarray:
    out = None
    for op in ops:
        out = op if out is None else np.kron(out, op)
    return out


def _collective_spin(n: int, axis: np.ndarray) -> np.ndarray:
    """sum_k (axis/2 on site k) over an n-fold spin-1/2 register."""
    dim = 2**n
    total = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        ops = [np.eye(2, dtype=complex)] * n
        ops[k] = axis / 2
        total += _kron_chain(ops)
    return total


def distinct_spins(n: int) -> list[HalfInt]:
    """Distinct total spins of n coupled spin-1/2s, descending."""
    return sorted(spin_addition_counts(n), reverse=True)


# ---------------------------------------------------------------------------
# Index tables for the one-group bases
# ---------------------------------------------------------------------------

def one_group_reduced_index(n: int, I: HalfInt, m: HalfInt) -> int:
    """Slot of |I,m> in the degeneracy-free nuclear ordering (Table-VII style)."""
    if abs(m.twice_value) > I.twice_value:
        raise ValueError(f"|m|={m} exceeds I={I}")
    idx = 0
    for J in distinct_spins(n):
        if J == I:
            return idx + (I.twice_value - m.twice_value) // 2
        idx += multiplicity(J)
    raise ValueError(f"I={I} is not a valid total spin for {n} nuclei")


def one_group_degenerate_index(n: int, I: HalfInt, m: HalfInt) -> int:
    """Slot of the first |I,m> copy in the degeneracy-repeated nuclear ordering."""
    if abs(m.twice_value) > I.twice_value:
        raise ValueError(f"|m|={m} exceeds I={I}")
    counts = spin_addition_counts(n)
    idx = 0
    for J in distinct_spins(n):
        if J == I:
            return idx + (I.twice_value - m.twice_value) // 2
        idx += counts[J] * multiplicity(J)
    raise ValueError(f"I={I} is not a valid total spin for {n} nuclei")


def index_bitstring(index: int, n_bits: int) -> str:
    return format(index, f"0{n_bits}b")


# ---------------------------------------------------------------------------
# Full tensor-product oracle (one group)
# ---------------------------------------------------------------------------

def build_full_one_group(spec: SpinSystemSpec) -> BlockHamiltonian:
    """Brute-force H on the full 2^(N+2) product space.

    H = a I_total.S1 - b1 Z_e1 - b2 Z_e2, the hyperfine term assembled
    directly from per-axis collective nuclear operators.  Oracle only; N is
    capped to keep the dense matrix tractable.
    """
    if len(spec.groups) != 1:
        raise ValueError("build_full_one_group requires a one-group spec")
    n = spec.groups[0].count
    if n > FULL_ORACLE_MAX_NUCLEI:
        raise ValueError(f"full oracle capped at {FULL_ORACLE_MAX_NUCLEI} nuclei, got {n}")
    a = spec.hyperfine_rad_ns[0]
    nuc_dim = 2**n
    eye_nuc = np.eye(nuc_dim, dtype=complex)
    eye2 = np.eye(2, dtype=complex)

    dim = 2 * nuc_dim * 2
    H = np.zeros((dim, dim), dtype=complex)
    for axis in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        J = _collective_spin(n, axis) if n else np.zeros((1, 1), dtype=complex)
        H += a * _kron_chain([eye2, J, axis / 2])
    H -= spec.b1 * _kron_chain([eye2, eye_nuc, SIGMA_Z])
    H -= spec.b2 * _kron_chain([SIGMA_Z, eye_nuc, eye2])

    labels = ("e2", "nuc", "e1")
    return BlockHamiltonian(H, (2, nuc_dim, 2), labels)


def full_nuclear_sector_vector(n: int, I: HalfInt, m: HalfInt) -> np.ndarray:
    """A representative |I,m> state of n spin-1/2 nuclei in the product basis.

    The (I,m) eigenspace of (I_total^2, I_z) is deg(I)-fold degenerate; the
    Hamiltonian acts identically on every copy, so any unit vector in the
    sector is a valid representative.  Sectors are separated by
    diagonalizing I_total^2 + eps * I_z with eps small enough not to mix
    distinct I.
    """
    if n < 1:
        raise ValueError("need at least one nucleus")
    Jz = _collective_spin(n, SIGMA_Z)
    J2 = sum(
        _collective_spin(n, ax) @ _collective_spin(n, ax) for ax in (SIGMA_X, SIGMA_Y, SIGMA_Z)
    )
    eps = 1e-3
    w, v = np.linalg.eigh(J2 + eps * Jz)
    target = I.as_float * (I.as_float + 1) + eps * m.as_float
    hits = np.nonzero(np.abs(w - target) < eps / 10)[0]
    if len(hits) == 0:
        raise ValueError(f"no ({I},{m}) sector found for {n} nuclei")
    vec = v[:, hits[0]].astype(complex)
    return vec


# ---------------------------------------------------------------------------
# Reduced (degeneracy-free) one-group Hamiltonian
# ---------------------------------------------------------------------------

def build_reduced_one_group(spec: SpinSystemSpec) -> BlockHamiltonian:
    """Degeneracy-free H over distinct |I,m> states, zero-padded to a power of 2.

    The (nuclear x e1) block is U Lambda U with U the block-diagonal stack of
    CG blocks (one per distinct I, descending); the anion Zeeman term is
    appended on the outer e2 factor.  Padded slots stay exactly zero,
    including the Zeeman terms.
    """
    if len(spec.groups) != 1:
        raise ValueError("build_reduced_one_group requires a one-group spec")
    n = spec.groups[0].count
    if n < 1:
        raise ValueError("need at least one nucleus")
    a = spec.hyperfine_rad_ns[0]

    spins = distinct_spins(n)
    slots = sum(multiplicity(I) for I in spins)
    nuc_dim = _next_pow2(slots)
    pair_real = 2 * slots
    pair_dim = 2 * nuc_dim

    counts = spin_addition_counts(n)
    U = np.zeros((pair_dim, pair_dim))
    lam = np.zeros(pair_dim)
    pos = 0
    basis_labels: list[tuple[HalfInt, HalfInt] | None] = []
    degeneracy: list[int] = []
    for I in spins:
        blk = cg_block_matrix(I)
        size = blk.shape[0]
        U[pos:pos + size, pos:pos + size] = blk
        lam[pos:pos + size] = coupled_hfc_eigenvalues(I)
        basis_labels.extend(
            (I, HalfInt(tm)) for tm in range(I.twice_value, -I.twice_value - 2, -2)
        )
        degeneracy.extend([counts[I]] * multiplicity(I))
        pos += size
    basis_labels.extend([None] * (nuc_dim - slots))
    degeneracy.extend([0] * (nuc_dim - slots))

    h_hfc = a * (U @ np.diag(lam) @ U)

    dim = 2 * pair_dim
    H = np.zeros((dim, dim), dtype=complex)
    H[:pair_dim, :pair_dim] = h_hfc
    H[pair_dim:, pair_dim:] = h_hfc
    # Zeeman terms, masked off the padded slots so padding stays exactly zero
    z1 = np.tile(np.array([-spec.b1, spec.b1]), nuc_dim)
    z1[pair_real:] = 0.0
    zeeman = np.concatenate([z1 - spec.b2 * np.ones(pair_dim), z1 + spec.b2 * np.ones(pair_dim)])
    zeeman[pair_real:pair_dim] = 0.0
    zeeman[pair_dim + pair_real:] = 0.0
    H += np.diag(zeeman.astype(complex))

    return BlockHamiltonian(
        H,
        (2, nuc_dim, 2),
        ("e2", "nuc", "e1"),
        basis_labels=basis_labels,
        padded_rows=2 * (pair_dim - pair_real),
        degeneracy=degeneracy,
    )


def build_secular_one_group(spec: SpinSystemSpec) -> BlockHamiltonian:
    """High-field-limit (secular) Hamiltonian in the reduced |I,m> basis.

    Keeps only the z-component of the hyperfine coupling, a Iz S1z, plus the
    Zeeman terms; diagonal in the reduced basis.  In this limit the singlet
    dynamics of |I,m> depends on |m| alone (the statement behind the
    high-field 25-to-5 state reduction).
    """
    if len(spec.groups) != 1:
        raise ValueError("build_secular_one_group requires a one-group spec")
    n = spec.groups[0].count
    a = spec.hyperfine_rad_ns[0]
    spins = distinct_spins(n)
    slots = sum(multiplicity(I) for I in spins)
    nuc_dim = _next_pow2(slots)
    pair_dim = 2 * nuc_dim

    diag = np.zeros(2 * pair_dim)
    basis_labels: list[tuple[HalfInt, HalfInt] | None] = []
    pos = 0
    for I in spins:
        for tm in range(I.twice_value, -I.twice_value - 2, -2):
            basis_labels.append((I, HalfInt(tm)))
            for e2 in (0, 1):
                for e1 in (0, 1):
                    idx = e2 * pair_dim + pos * 2 + e1
                    z1 = 1.0 if e1 == 0 else -1.0
                    z2 = 1.0 if e2 == 0 else -1.0
                    diag[idx] = (a * (tm / 2) * (z1 / 2)
                                 - spec.b1 * z1 - spec.b2 * z2)
            pos += 1
    basis_labels.extend([None] * (nuc_dim - slots))
    return BlockHamiltonian(np.diag(diag.astype(complex)), (2, nuc_dim, 2),
                            ("e2", "nuc", "e1"), basis_labels=basis_labels,
                            padded_rows=2 * (pair_dim - 2 * slots))


# ---------------------------------------------------------------------------
# Partitioned 8x8 Hamiltonian for |I, m=I> initial states
# ---------------------------------------------------------------------------

def partitioned_params(n: int, I: HalfInt) -> tuple[float, float, float, float]:
    """(x, y, lam1, lam2) of the partitioned form, lam in units of a.

    x = sqrt(1/(2I+1)), y = sqrt(2I/(2I+1)), lam1 = I/2, lam2 = -(I+1)/2.
    """
    if I not in distinct_spins(n):
        raise ValueError(f"I={I} is not a valid total spin for {n} nuclei")
    two_I = I.twice_value
    if two_I == 0:
        return 0.0, 0.0, 0.0, 0.0
    x = math.sqrt(1 / (two_I + 1))
    y = math.sqrt(two_I / (two_I + 1))
    return x, y, two_I / 4, -(two_I + 2) / 4


def build_partitioned(I: HalfInt, spec: SpinSystemSpec) -> BlockHamiltonian:
    """8x8 Hamiltonian for evolving |I, m=I> x |S>.

    Inner 4-block basis: (|I,I>, |I,I-1>) x (e1 up, down); the |I,I-1> down
    slot is the hyperfine padding slot but, as printed, still carries the
    Zeeman diagonals.  Outer factor is e2.
    """
    if len(spec.groups) != 1:
        raise ValueError("build_partitioned requires a one-group spec")
    n = spec.groups[0].count
    a = spec.hyperfine_rad_ns[0]
    x, y, lam1, lam2 = partitioned_params(n, I)

    cg = np.array([[1.0, 0.0, 0.0], [0.0, x, y], [0.0, y, -x]])
    if I.twice_value == 0:
        h3 = np.zeros((3, 3))
    else:
        h3 = cg @ np.diag([lam1, lam1, lam2]) @ cg
    h4 = np.zeros((4, 4), dtype=complex)
    h4[:3, :3] = a * h3
    h4 -= spec.b1 * np.kron(np.eye(2), SIGMA_Z)

    H = np.kron(np.eye(2, dtype=complex), h4) - spec.b2 * np.kron(SIGMA_Z, np.eye(4, dtype=complex))
    basis_labels = [(I, I), (I, I - HALF) if I.twice_value > 0 else None]
    return BlockHamiltonian(H, (2, 2, 2), ("e2", "nuc", "e1"), basis_labels=basis_labels)


def pauli_string_matrix(s: str) -> np.ndarray:
    return _kron_chain([PAULI[c] for c in s])


def pauli_decompose_partitioned(I: HalfInt, spec: SpinSystemSpec) -> list[tuple[float, str]]:
    """Seven-term Pauli decomposition of the partitioned Hamiltonian.

    Letters are ordered (e2, nuclear, e1); coefficients are rad/ns.  The sum
    of coefficient * string reproduces ``build_partitioned`` exactly.
    """
    if len(spec.groups) != 1:
        raise ValueError("pauli_decompose_partitioned requires a one-group spec")
    n = spec.groups[0].count
    a = spec.hyperfine_rad_ns[0]
    x, y, lam1, lam2 = partitioned_params(n, I)
    aniso = (lam1 - lam2) * (x * x - y * y)
    terms = [
        (a * (2 * lam1 + lam2) / 4, "III"),
        (a * (lam1 + aniso) / 4, "IZI"),
        (a * (lam1 - aniso) / 4 - spec.b1, "IIZ"),
        (-a * lam2 / 4, "IZZ"),
        (a * (lam1 - lam2) * x * y / 2, "IXX"),
        (a * (lam1 - lam2) * x * y / 2, "IYY"),
        (-spec.b2, "ZII"),
    ]
    return terms


# ---------------------------------------------------------------------------
# Two-group sector blocks
# ---------------------------------------------------------------------------

I1_STATES: tuple[tuple[HalfInt, HalfInt], ...] = (
    (HalfInt(2), HalfInt(2)),
    (HalfInt(2), HalfInt(0)),
    (HalfInt(2), HalfInt(-2)),
    (HalfInt(0), HalfInt(0)),
)


@dataclass
class TwoGroupSector:
    """One fixed-I2 block of a two-group system, with padding bookkeeping."""

    I2: HalfInt
    hamiltonian: BlockHamiltonian
    register_size: int      # padded nuclear register (power of 2)
    real_register: int      # populated nuclear slots: 4 * (2*I2 + 1)
    degeneracy: int         # multiplicity of I2 in the large group

    @property
    def pad_register(self) -> int:
        return self.register_size - self.real_register

    @property
    def register_qubits(self) -> int:
        return self.register_size.bit_length() - 1


def build_two_group_block(I2: HalfInt, spec: SpinSystemSpec) -> TwoGroupSector:
    """Sector Hamiltonian for fixed total spin I2 of the large nuclear group.

    Register slots run over (m2 descending) x (|1,1>,|1,0>,|1,-1>,|0,0>);
    the small group must contain exactly two nuclei.  The group-1 coupling is
    CG1/CG0 block-diagonal per m2; the group-2 coupling embeds CG_{I2} on the
    (m2, e1) pair with the group-1 label as spectator (index-offset
    embedding).  Slots are zero-padded to a power of 2 and the anion Zeeman
    term is appended, zero on padding.
    """
    if len(spec.groups) != 2:
        raise ValueError("build_two_group_block requires a two-group spec")
    n1, n2 = spec.groups[0].count, spec.groups[1].count
    if n1 != 2:
        raise ValueError("the small group must contain exactly 2 nuclei")
    counts2 = spin_addition_counts(n2)
    if I2 not in counts2:
        raise ValueError(f"I2={I2} is not a valid total spin for {n2} nuclei")
    w1, w2 = spec.hyperfine_rad_ns

    n_m2 = multiplicity(I2)
    real_reg = 4 * n_m2
    pair_real = 2 * real_reg

    # Group-1 coupling: CG1 (+) CG0 within each m2 block.
    blk1 = np.zeros((8, 8))
    blk1[:6, :6] = cg_block_matrix(HalfInt(2))
    blk1[6:, 6:] = cg_block_matrix(HalfInt(0))
    lam1_blk = np.concatenate(
        [coupled_hfc_eigenvalues(HalfInt(2)), coupled_hfc_eigenvalues(HalfInt(0))]
    )
    U1 = np.kron(np.eye(n_m2), blk1)
    lam1 = np.tile(lam1_blk, n_m2)

    # Group-2 coupling: CG_{I2} on the (m2, e1) pair, group-1 slot as spectator.
    cg2 = cg_block_matrix(I2)
    lam2_coupled = coupled_hfc_eigenvalues(I2)
    U2 = np.zeros((pair_real, pair_real))
    lam2 = np.zeros(pair_real)
    emb = lambda i: i + (i // 2) * 6  # (m2, e1) product index -> sector slot, spectator 0
    for xi, yi in zip(*np.nonzero(cg2)):
        for k in range(4):
            U2[emb(xi) + 2 * k, emb(yi) + 2 * k] = cg2[xi, yi]
    for yi in range(2 * multiplicity(I2)):
        for k in range(4):
            lam2[emb(yi) + 2 * k] = lam2_coupled[yi]

    h_prime = (w1 * (U1 @ np.diag(lam1) @ U1) + w2 * (U2 @ np.diag(lam2) @ U2)).astype(complex)
    h_prime -= spec.b1 * np.kron(np.eye(real_reg), SIGMA_Z)

    reg = _next_pow2(real_reg)
    pair_dim = 2 * reg
    dim = 2 * pair_dim
    H = np.zeros((dim, dim), dtype=complex)
    H[:pair_real, :pair_real] = h_prime
    H[pair_dim:pair_dim + pair_real, pair_dim:pair_dim + pair_real] = h_prime
    zee = np.zeros(dim)
    zee[:pair_real] = -spec.b2
    zee[pair_dim:pair_dim + pair_real] = spec.b2
    H += np.diag(zee.astype(complex))

    basis_labels: list[tuple | None] = []
    for tm2 in range(I2.twice_value, -I2.twice_value - 2, -2):
        for I1, m1 in I1_STATES:
            basis_labels.append((I2, HalfInt(tm2), I1, m1))
    basis_labels.extend([None] * (reg - real_reg))

    block = BlockHamiltonian(
        H,
        (2, reg, 2),
        ("e2", "nuc", "e1"),
        basis_labels=basis_labels,
        padded_rows=2 * (pair_dim - pair_real),
        degeneracy=[counts2[I2]] * real_reg + [0] * (reg - real_reg),
    )
    return TwoGroupSector(
        I2=I2,
        hamiltonian=block,
        register_size=reg,
        real_register=real_reg,
        degeneracy=counts2[I2],
    )


def build_full_two_group(spec: SpinSystemSpec) -> BlockHamiltonian:
    """Brute-force two-group H on the full product space (toy-size oracle)."""
    if len(spec.groups) != 2:
        raise ValueError("build_full_two_group requires a two-group spec")
    n1, n2 = spec.groups[0].count, spec.groups[1].count
    if n1 + n2 > FULL_ORACLE_MAX_NUCLEI:
        raise ValueError("two-group oracle capped at "
                         f"{FULL_ORACLE_MAX_NUCLEI} total nuclei, got {n1 + n2}")
    w1, w2 = spec.hyperfine_rad_ns
    d1, d2 = 2**n1, 2**n2
    eye1, eye2q, eyee = np.eye(d1, dtype=complex), np.eye(d2, dtype=complex), np.eye(2, dtype=complex)

    dim = 2 * d1 * d2 * 2
    H = np.zeros((dim, dim), dtype=complex)
    for axis in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        J1 = _collective_spin(n1, axis)
        J2 = _collective_spin(n2, axis)
        H += w1 * _kron_chain([eyee, J1, eye2q, axis / 2])
        H += w2 * _kron_chain([eyee, eye1, J2, axis / 2])
    H -= spec.b1 * _kron_chain([eyee, eye1, eye2q, SIGMA_Z])
    H -= spec.b2 * _kron_chain([SIGMA_Z, eye1, eye2q, eyee])
    return BlockHamiltonian(H, (2, d1, d2, 2), ("e2", "nuc1", "nuc2", "e1"))
