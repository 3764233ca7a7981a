"""Joint-readout state tomography and chi-matrix process tomography.

Pauli strings are ordered lexicographically over {I, X, Y, Z} with qubit 1
leftmost; the identity-including basis starts at ``I...I``.
"""
import csv
from dataclasses import dataclass
import itertools

import numpy as np

from .errors import (DimMismatch, IllConditioned, InvalidInput, RankDeficientPreps,
                     SingularDesign, Unsupported)
from .numkit import _pauli_stack, as_matrix, eig_hermitian, kron, pauli_labels
from .pulsectl import PI, Rotation, rotation_unitary

MAX_CONDITION = 1e6

GATES = {
    "Id": Rotation.identity(),
    "X9": Rotation.x(PI / 2),
    "Y9": Rotation.y(PI / 2),
    "Xp": Rotation.x(PI),
}

_TABLE_1Q = (("Id",), ("X9",), ("Y9",))
_TABLE_2Q = (
    ("Id", "Id"), ("Xp", "Id"), ("Id", "Xp"), ("X9", "Id"), ("X9", "X9"),
    ("X9", "Y9"), ("X9", "Xp"), ("Y9", "Id"), ("Y9", "X9"), ("Y9", "Y9"),
    ("Y9", "Xp"), ("Id", "X9"), ("Xp", "X9"), ("Id", "Y9"), ("Xp", "Y9"),
)
# All 64 products with qubit 1 varying slowest, dropping (Xp, Xp, Xp).
_TABLE_3Q = tuple(itertools.product(("Id", "X9", "Y9", "Xp"), repeat=3))[:-1]


def prerotation_table(n_qubits):
    """Tomography pre-rotations, one tuple of gate names per measurement."""
    tables = {1: _TABLE_1Q, 2: _TABLE_2Q, 3: _TABLE_3Q}
    if n_qubits not in tables:
        raise Unsupported(f"no tomography table for {n_qubits} qubits")
    return list(tables[n_qubits])


def row_label(row):
    return "-".join(row)


def z_strings(n_qubits):
    """Z-type Pauli strings (incl. identity) in lexicographic order."""
    return tuple("".join(s) for s in itertools.product("IZ", repeat=n_qubits))


def _parity_matrix(n_qubits):
    # Entry [b, s] is the eigenvalue of Z-string s on computational state b.
    d = 2 ** n_qubits
    return np.array([[(-1) ** bin(b & s).count("1") for s in range(d)] for b in range(d)], dtype=float)


@dataclass(frozen=True)
class MeasurementModel:
    """Joint readout ``V = offset + sum_s beta_s <P_s>`` over Z-type strings ``P_s``."""

    n_qubits: int
    beta: tuple
    offset: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float)
        if b.shape != (2 ** self.n_qubits,):
            raise DimMismatch(f"need {2 ** self.n_qubits} beta coefficients, got {b.size}")
        object.__setattr__(self, "beta", tuple(float(v) for v in b))

    @property
    def operator(self):
        """The measurement operator ``sum_s beta_s P_s`` (diagonal)."""
        diag = _parity_matrix(self.n_qubits) @ np.array(self.beta)
        return np.diag(diag).astype(complex)


def _prerotation_unitary(row):
    return kron(*(rotation_unitary(GATES[g]) for g in row))


def joint_measurement_voltage(rho, m: MeasurementModel, prerotations=None):
    """Ensemble-averaged voltage after the given pre-rotations."""
    rho = as_matrix(rho)
    d = 2 ** m.n_qubits
    if rho.shape != (d, d):
        raise DimMismatch(f"rho has shape {rho.shape}, model has {m.n_qubits} qubits")
    row = prerotations if prerotations is not None else ("Id",) * m.n_qubits
    if len(row) != m.n_qubits:
        raise DimMismatch("one pre-rotation per qubit required")
    u = _prerotation_unitary(row)
    return float(m.offset + np.real(np.trace(m.operator @ u @ rho @ u.conj().T)))


def beta_calibration(voltages, offset=0.0):
    """Recover beta from the voltages of the 2^n computational basis states."""
    v = np.asarray(voltages, dtype=float) - offset
    n = int(round(np.log2(v.size))) if v.size else 0
    if v.ndim != 1 or v.size < 2 or 2 ** n != v.size:
        raise SingularDesign(f"need 2^n basis-state voltages, got {v.size}")
    h = _parity_matrix(n)
    # h @ h = d I, so the inverse is h / d.
    return MeasurementModel(n, tuple(h @ v / v.size), offset)


def design_matrix(m: MeasurementModel, table=None):
    """Rows map the identity-first Pauli vector to table voltages (offset excluded)."""
    table = prerotation_table(m.n_qubits) if table is None else table
    d = 2 ** m.n_qubits
    ops = np.concatenate((np.eye(d, dtype=complex)[None], _pauli_stack(m.n_qubits)))
    meas = m.operator
    rows = []
    for row in table:
        u = _prerotation_unitary(row)
        heis = u.conj().T @ meas @ u
        # Coefficient of each Pauli string in U^dag M U.
        rows.append(np.real(np.einsum("ij,kji->k", heis, ops)) / d)
    return np.array(rows)


def simulate_voltages(rho, m: MeasurementModel, table=None, noise_sigma=0.0, rng=None):
    """Voltages for every pre-rotation row, with optional Gaussian noise."""
    table = prerotation_table(m.n_qubits) if table is None else table
    v = np.array([joint_measurement_voltage(rho, m, row) for row in table])
    if noise_sigma:
        rng = np.random.default_rng() if rng is None else rng
        v = v + rng.normal(scale=noise_sigma, size=v.shape)
    return v


@dataclass(frozen=True)
class StateEstimate:
    paulis: np.ndarray
    rho: np.ndarray
    min_eigenvalue: float
    condition: float


def reconstruct_state(voltages, m: MeasurementModel, table=None):
    """Linear inversion of table voltages to Pauli expectations and rho."""
    a = design_matrix(m, table)
    v = np.asarray(voltages, dtype=float)
    if v.shape != (a.shape[0],):
        raise DimMismatch(f"expected {a.shape[0]} voltages, got {v.size}")
    rhs = v - m.offset - a[:, 0]
    a = a[:, 1:]
    cond = float(np.linalg.cond(a))
    if not cond <= MAX_CONDITION:
        raise IllConditioned(f"design condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    paulis, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    d = 2 ** m.n_qubits
    rho = (np.eye(d) + np.einsum("k,kij->ij", paulis, _pauli_stack(m.n_qubits))) / d
    rho = 0.5 * (rho + rho.conj().T)
    return StateEstimate(paulis, rho, float(np.linalg.eigvalsh(rho)[0]), cond)


def fit_offset(voltages, m: MeasurementModel, table=None):
    """Voltage offset that minimizes the squared Pauli amplitudes.

    Population outside the computational space shifts every voltage by a
    constant; the offset returned here is the least-squares choice that makes
    the reconstructed Pauli vector as small as possible.
    """
    a = design_matrix(m, table)
    v = np.asarray(voltages, dtype=float)
    pinv = np.linalg.pinv(a[:, 1:])
    x0 = pinv @ (v - a[:, 0])
    x1 = pinv @ np.ones_like(v)
    # minimize |x0 - c x1|^2
    return float(x0 @ x1 / (x1 @ x1))


def physicality_project(rho):
    """Clip negative eigenvalues to zero and renormalize to unit trace."""
    rho = as_matrix(rho)
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    if w[0] >= 0:
        return rho / np.real(np.trace(rho))
    w = np.clip(w, 0, None)
    if w.sum() == 0:
        raise InvalidInput("no positive weight to renormalize")
    return (v * (w / w.sum())) @ v.conj().T


def pauli_basis(n_qubits):
    """Identity-first Pauli operator basis used for chi matrices."""
    d = 2 ** n_qubits
    return np.concatenate((np.eye(d, dtype=complex)[None], _pauli_stack(n_qubits)))


def pauli_display_order(n_qubits, order="lex"):
    """Pauli labels (incl. identity) in ``lex`` or ``thesis`` display order.

    ``thesis`` groups strings by weight (identity, single-qubit terms,
    pairs, ...), keeping lexicographic order within each group.
    """
    labels = list(pauli_labels(n_qubits, include_identity=True))
    if order == "lex":
        return labels
    if order == "thesis":
        return sorted(labels, key=lambda s: (len(s) - s.count("I"), labels.index(s)))
    raise InvalidInput(f"unknown order {order!r}")


def superoperator(preps, outputs):
    """Row-major superoperator S with vec(E(rho)) = S vec(rho)."""
    preps = [as_matrix(r) for r in preps]
    outputs = [as_matrix(r) for r in outputs]
    if len(preps) != len(outputs) or not preps:
        raise DimMismatch("need one output per input state")
    d = preps[0].shape[0]
    if any(r.shape != (d, d) for r in preps + outputs):
        raise DimMismatch("all states must share one dimension")
    p = np.column_stack([r.reshape(-1) for r in preps])
    o = np.column_stack([r.reshape(-1) for r in outputs])
    if np.linalg.matrix_rank(p, tol=1e-9) < d * d:
        raise RankDeficientPreps(f"input states span less than the {d * d}-dim operator space")
    return o @ np.linalg.pinv(p)


def process_tomography(preps, outputs):
    """Chi matrix in the Pauli basis, ``E(rho) = sum chi_mn E_m rho E_n^dag``.

    The linear map is first fixed on the span of the inputs, then expanded in
    the products ``E_m (.) E_n^dag``, which are orthogonal with norm d^2.
    """
    s = superoperator(preps, outputs)
    d = int(round(np.sqrt(s.shape[0])))
    n = int(round(np.log2(d)))
    e = pauli_basis(n)
    s4 = s.reshape(d, d, d, d)
    chi = np.einsum("mca,ndb,cdab->mn", e.conj(), e, s4, optimize=True) / d ** 2
    return 0.5 * (chi + chi.conj().T)


def chi_of_unitary(u):
    """Rank-one chi matrix ``v v^dag`` of a unitary, ``U = sum v_m E_m``."""
    u = as_matrix(u)
    d = u.shape[0]
    e = pauli_basis(int(round(np.log2(d))))
    v = np.einsum("mij,ji->m", e, u) / d
    return np.outer(v, v.conj())


def chi_of_channel(kraus_ops):
    """Chi matrix of a channel from its Kraus operators."""
    ops = [as_matrix(k) for k in kraus_ops]
    d = ops[0].shape[0]
    e = pauli_basis(int(round(np.log2(d))))
    chi = np.zeros((d * d, d * d), dtype=complex)
    for k in ops:
        v = np.einsum("mij,ji->m", e, k) / d
        chi += np.outer(v, v.conj())
    return chi


def apply_chi(chi, rho):
    """Apply the process ``chi`` to ``rho``."""
    rho = as_matrix(rho)
    e = pauli_basis(int(round(np.log2(rho.shape[0]))))
    return np.einsum("mn,mij,jk,nlk->il", chi, e, rho, e.conj(), optimize=True)


def standard_preps(n_qubits):
    """Product inputs drawn from {|0>, |1>, |+x>, |+y>} on each qubit."""
    single = [np.array([1, 0]), np.array([0, 1]),
              np.array([1, 1]) / np.sqrt(2), np.array([1, 1j]) / np.sqrt(2)]
    out = []
    for combo in itertools.product(single, repeat=n_qubits):
        psi = kron(*[c.reshape(-1, 1) for c in combo]).reshape(-1)
        out.append(np.outer(psi, psi.conj()))
    return out


def process_fidelity(a, b):
    """``Re tr(a b)`` for trace-normalized chi matrices."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimMismatch(f"chi shapes differ: {a.shape} vs {b.shape}")
    return float(np.real(np.trace(a @ b)))


def trace_preservation_error(chi):
    """Norm of ``sum chi_mn E_n^dag E_m - I``."""
    d = int(round(np.sqrt(chi.shape[0])))
    e = pauli_basis(int(round(np.log2(d))))
    total = np.einsum("mn,nji,mjk->ik", chi, e.conj(), e, optimize=True)
    return float(np.linalg.norm(total - np.eye(d)))


def read_voltage_csv(path):
    """Read ``label,voltage`` rows; returns (labels, voltages)."""
    labels, volts = [], []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            labels.append(rec["label"])
            volts.append(float(rec["voltage"]))
    return labels, np.array(volts)


def order_voltages(labels, voltages, n_qubits):
    """Arrange labelled voltages in table order, checking coverage."""
    lookup = dict(zip(labels, voltages))
    table = [row_label(r) for r in prerotation_table(n_qubits)]
    missing = [t for t in table if t not in lookup]
    if missing:
        raise DimMismatch(f"missing voltages for rows {missing[:3]}")
    return np.array([lookup[t] for t in table])
