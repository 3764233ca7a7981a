"""Dense complex linear algebra and quantum-state primitives.

All energies are linear frequencies (GHz) and times are in ns, so a
Hamiltonian ``H`` evolves as ``exp(-2j*pi*H*t)``.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools

import numpy as np

from .errors import DimMismatch, InvalidInput, InvalidProbability, NotHermitian

HERMITIAN_RTOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


def as_matrix(a):
    """Return ``a`` as a complex 2D array, rejecting NaN/inf entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidInput(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix contains NaN or inf")
    return m


def is_hermitian(h, rtol=HERMITIAN_RTOL):
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        return False
    scale = max(np.max(np.abs(h)), 1e-300)
    return np.max(np.abs(h - h.conj().T)) <= rtol * scale


def kron(*ops):
    """Tensor product of any number of matrices (or vectors)."""
    out = np.array([[1.0 + 0j]]) if np.ndim(ops[0]) == 2 else np.array([1.0 + 0j])
    for op in ops:
        out = np.kron(out, op)
    return out


def _fix_phase(vecs):
    # Make the first significant component of each column real and positive.
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            c = col[idx[0]]
            vecs[:, k] = col * (abs(c) / c)
    return vecs


def eig_hermitian(h, rtol=1e-10):
    """Eigen-decompose a Hermitian matrix.

    Returns
    -------
    evals : ndarray
        Ascending real eigenvalues.
    evecs : ndarray
        Orthonormal eigenvectors as columns, with a deterministic phase.
    """
    h = as_matrix(h)
    if not is_hermitian(h, rtol):
        raise NotHermitian("matrix fails the Hermitian symmetry check")
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return evals, _fix_phase(evecs)


def evolve_unitary(h, t):
    """Propagator ``exp(-2j*pi*H*t)`` for H in GHz and t in ns."""
    evals, evecs = eig_hermitian(h)
    phases = np.exp(-2j * np.pi * evals * t)
    return (evecs * phases) @ evecs.conj().T


def ket(index, dim):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def basis_state(bits):
    """Computational basis ket for a bit string such as ``"010"``."""
    return ket(int(bits, 2), 2 ** len(bits))


def dm(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def partial_trace(rho, dims, keep):
    """Reduced density matrix on the subsystems listed in ``keep``."""
    rho = as_matrix(rho)
    dims = list(dims)
    if int(np.prod(dims)) != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise DimMismatch(f"dims {dims} do not match matrix of size {rho.shape}")
    keep = sorted(set(keep))
    n = len(dims)
    trace_out = [k for k in range(n) if k not in keep]
    t = rho.reshape(dims + dims)
    # Trace the highest axes first so lower axis numbers stay valid.
    for k in sorted(trace_out, reverse=True):
        nk = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + nk)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def purity_entropy(rho):
    """Return ``(tr(rho^2), von Neumann entropy in bits)``."""
    rho = as_matrix(rho)
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    purity = float(np.real(np.trace(rho @ rho)))
    lam = lam[lam > 1e-12]
    entropy = float(-np.sum(lam * np.log2(lam)))
    return purity, max(entropy, 0.0)


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple
    kind: str = "custom"

    def apply(self, rho):
        rho = as_matrix(rho)
        return sum(m @ rho @ m.conj().T for m in self.operators)

    def completeness_error(self):
        d = self.operators[0].shape[0]
        s = sum(m.conj().T @ m for m in self.operators)
        return float(np.max(np.abs(s - np.eye(d))))


def make_channel(kind, p):
    """Single-qubit dephasing, amplitude-damping or depolarizing channel."""
    if not np.isfinite(p) or p < 0 or p > 1:
        raise InvalidProbability(f"p={p} is not a probability")
    if kind == "dephasing":
        ops = (np.sqrt(1 - p) * I2,
               np.sqrt(p) * np.diag([1, 0]).astype(complex),
               np.sqrt(p) * np.diag([0, 1]).astype(complex))
    elif kind == "amplitude_damping":
        ops = (np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
               np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex))
    elif kind == "depolarizing":
        ops = (np.sqrt(1 - p) * I2,) + tuple(np.sqrt(p / 3) * s for s in (SX, SY, SZ))
    else:
        raise InvalidInput(f"unknown channel kind {kind!r}")
    return KrausChannel(ops, kind)


def embed(op, target, n_qubits):
    """Lift a single-qubit operator onto qubit ``target`` of an n-qubit register."""
    mats = [I2] * n_qubits
    mats[target] = op
    return kron(*mats)


def apply_channel(channel, rho, target=0, n_qubits=1):
    ops = [embed(m, target, n_qubits) for m in channel.operators]
    return sum(m @ rho @ m.conj().T for m in ops)


@lru_cache(maxsize=None)
def pauli_labels(n_qubits, include_identity=False):
    """Lexicographic Pauli strings over {I,X,Y,Z}, identity first."""
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=n_qubits)]
    return tuple(labels if include_identity else labels[1:])


def pauli_operator(label):
    return kron(*(PAULI[c] for c in label))


@lru_cache(maxsize=None)
def _pauli_stack(n_qubits):
    return np.array([pauli_operator(s) for s in pauli_labels(n_qubits)])


def pauli_expectations(rho, n_qubits):
    """The 4^n - 1 non-identity Pauli expectations in lexicographic order."""
    rho = as_matrix(rho)
    if rho.shape != (2 ** n_qubits, 2 ** n_qubits):
        raise DimMismatch(f"rho has shape {rho.shape}, expected {n_qubits} qubits")
    ops = _pauli_stack(n_qubits)
    # tr(rho P) = sum_ij rho_ij P_ji
    return np.real(np.einsum("ij,kji->k", rho, ops))


def rho_from_paulis(values, n_qubits):
    """Inverse of :func:`pauli_expectations` (identity term fixed to 1)."""
    values = np.asarray(values, dtype=float)
    d = 2 ** n_qubits
    if values.size != d * d - 1:
        raise DimMismatch(f"expected {d * d - 1} Pauli values, got {values.size}")
    rho = np.eye(d, dtype=complex) + np.einsum("k,kij->ij", values, _pauli_stack(n_qubits))
    return rho / d


def random_density_matrix(dim, rng, rank=None):
    """Random physical density matrix (Ginibre construction)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_state(dim, rng):
    return normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def fidelity_to_pure(rho, psi):
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))
