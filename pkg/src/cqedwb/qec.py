"""Three-qubit repetition codes, Toffoli constructions, error sweeps and
entanglement witnesses.

Qubits are numbered 0, 1, 2 (Q1, Q2, Q3) with Q1 the most significant bit.
In the repetition codes Q2 carries the data and Q1, Q3 are ancillas.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .cqedspec import PhaseGateSpec
from .errors import DimMismatch, InvalidInput, InvalidProbability
from .numkit import (I2, KrausChannel, as_matrix, basis_state, dm, kron,
                     partial_trace, pauli_operator)
from .pulsectl import PI, Rotation, rotation_unitary
from .tomo import process_tomography, standard_preps

GATE_KINDS = ("rotation", "cnot", "cphase", "ccphase", "reset", "channel")
DATA_QUBIT = 1
PHI_GRID_POINTS = 360


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    ``param`` is a :class:`Rotation` for ``rotation``, ``"exact"`` or
    ``"compiled"`` for ``cnot`` (targets are control then target), a
    :class:`PhaseGateSpec` for ``cphase``/``ccphase`` and a
    :class:`KrausChannel` for ``channel``.
    """

    kind: str
    targets: tuple
    param: object = None


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)

    def add(self, kind, targets, param=None):
        targets = tuple(int(t) for t in targets)
        if kind not in GATE_KINDS:
            raise InvalidInput(f"unknown gate kind {kind!r}")
        if any(t < 0 or t >= self.n_qubits for t in targets) or len(set(targets)) != len(targets):
            raise InvalidInput(f"bad targets {targets} for {self.n_qubits} qubits")
        self.gates.append(Gate(kind, targets, param))
        return self

    def extend(self, other):
        self.gates.extend(other.gates)
        return self

    @property
    def is_unitary(self):
        return all(g.kind not in ("reset", "channel") for g in self.gates)

    # convenience builders
    def rot(self, q, r):
        return self.add("rotation", (q,), r)

    def cnot(self, control, target, mode="compiled"):
        return self.add("cnot", (control, target), mode)

    def cz(self, a, b):
        return self.add("cphase", (a, b), PhaseGateSpec(2, {"11": PI}))

    def ccz(self):
        return self.add("ccphase", (0, 1, 2), PhaseGateSpec(3, {"111": PI}))

    def ccnot(self, target=DATA_QUBIT):
        """Toffoli on ``target`` controlled by the other two, via ccPhase."""
        self.rot(target, Rotation.y(-PI / 2)).ccz()
        return self.rot(target, Rotation.y(PI / 2))


def expand_operator(op, targets, n_qubits):
    """Full 2^n operator acting as ``op`` on ``targets`` (in that order)."""
    rest = [q for q in range(n_qubits) if q not in targets]
    full = np.kron(as_matrix(op), np.eye(2 ** len(rest)))
    order = list(targets) + rest
    t = full.reshape((2,) * (2 * n_qubits))
    perm = np.argsort(order)
    t = t.transpose(list(perm) + [n_qubits + p for p in perm])
    return t.reshape(2 ** n_qubits, 2 ** n_qubits)


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_RESET = (np.array([[1, 0], [0, 0]], dtype=complex), np.array([[0, 1], [0, 0]], dtype=complex))


def _cnot_matrix(mode):
    if mode == "exact":
        return _CNOT
    if mode == "compiled":
        # R_y(pi/2)_t . CZ . R_y(-pi/2)_t, since R_y(pi/2) Z R_y(-pi/2) = X
        up = kron(I2, rotation_unitary(Rotation.y(PI / 2)))
        down = kron(I2, rotation_unitary(Rotation.y(-PI / 2)))
        return up @ np.diag([1, 1, 1, -1]).astype(complex) @ down
    raise InvalidInput(f"unknown cnot mode {mode!r}")


def gate_operators(g: Gate, n_qubits):
    """Kraus operators (a single unitary for coherent gates) on the register."""
    if g.kind == "rotation":
        local = [rotation_unitary(g.param)]
    elif g.kind == "cnot":
        local = [_cnot_matrix(g.param or "compiled")]
    elif g.kind in ("cphase", "ccphase"):
        if g.param.n_qubits != len(g.targets):
            raise DimMismatch("phase gate size does not match its targets")
        local = [g.param.unitary()]
    elif g.kind == "reset":
        local = list(_RESET)
    else:
        local = list(g.param.operators)
    return [expand_operator(m, g.targets, n_qubits) for m in local]


def circuit_unitary(c: Circuit):
    if not c.is_unitary:
        raise InvalidInput("circuit contains non-unitary elements")
    u = np.eye(2 ** c.n_qubits, dtype=complex)
    for g in c.gates:
        u = gate_operators(g, c.n_qubits)[0] @ u
    return u


def _as_rho(x):
    x = np.asarray(x, dtype=complex)
    return dm(x) if x.ndim == 1 else as_matrix(x)


def run_circuit(c: Circuit, rho):
    """Apply every gate in order to the density matrix ``rho``."""
    rho = _as_rho(rho)
    d = 2 ** c.n_qubits
    if rho.shape != (d, d):
        raise DimMismatch(f"input has shape {rho.shape}, circuit has {c.n_qubits} qubits")
    for g in c.gates:
        ops = gate_operators(g, c.n_qubits)
        rho = sum(k @ rho @ k.conj().T for k in ops)
    return rho


def ghz_syndromes(rho):
    """``(<Z1 Z2>, <Z2 Z3>)`` of a three-qubit state."""
    rho = _as_rho(rho)
    if rho.shape != (8, 8):
        raise DimMismatch("syndromes need a three-qubit state")
    return tuple(float(np.real(np.trace(rho @ pauli_operator(s)))) for s in ("ZZI", "IZZ"))


def encode_circuit(mode="compiled"):
    """Spread the data qubit Q2 onto ancillas Q1 and Q3."""
    return Circuit(3).cnot(DATA_QUBIT, 0, mode).cnot(DATA_QUBIT, 2, mode)


def repetition_code_circuit(kind="bit", error_gates=(), mode="measurement_free", cnot_mode="compiled"):
    """Encode, error slot, decode and Toffoli correction on Q2.

    ``error_gates`` is a sequence of :class:`Gate` placed in the error slot.
    The phase-flip code wraps the slot in ``R_y(pi/2)`` on all qubits and its
    inverse, converting phase flips into bit flips.
    """
    if kind not in ("bit", "phase"):
        raise InvalidInput(f"unknown code kind {kind!r}")
    if mode != "measurement_free":
        raise InvalidInput(f"unsupported mode {mode!r}")
    c = encode_circuit(cnot_mode)
    if kind == "phase":
        for q in range(3):
            c.rot(q, Rotation.y(PI / 2))
    for g in error_gates:
        c.add(g.kind, g.targets, g.param)
    if kind == "phase":
        for q in range(3):
            c.rot(q, Rotation.y(-PI / 2))
    c.extend(encode_circuit(cnot_mode))
    return c.ccnot(DATA_QUBIT)


def error_angle(p):
    """Rotation angle whose full-flip probability is ``p``: ``2 asin(sqrt p)``."""
    if not 0 <= p <= 1:
        raise InvalidProbability(f"p={p} is not a probability")
    return 2 * math.asin(math.sqrt(p))


def error_slot(kind, p, model="coherent", qubits=(0, 1, 2)):
    """Independent errors of strength ``p`` on each of ``qubits``.

    Coherent errors are rotations (x for the bit code, z for the phase code);
    the Kraus model applies the matching Pauli flip with probability p.
    """
    pauli = {"bit": "X", "phase": "Z"}[kind]
    if model == "coherent":
        theta = error_angle(p)
        rot = Rotation.x(theta) if pauli == "X" else Rotation.z(theta)
        return [Gate("rotation", (q,), rot) for q in qubits]
    if model == "kraus":
        if not 0 <= p <= 1:
            raise InvalidProbability(f"p={p} is not a probability")
        ch = KrausChannel((math.sqrt(1 - p) * I2, math.sqrt(p) * pauli_operator(pauli)), f"{kind}_flip")
        return [Gate("channel", (q,), ch) for q in qubits]
    raise InvalidInput(f"unknown error model {model!r}")


def data_process(c: Circuit):
    """Chi matrix of the single-qubit map the circuit induces on Q2."""
    anc = dm(basis_state("0"))
    preps = standard_preps(1)
    outs = []
    for r in preps:
        full = run_circuit(c, kron(anc, r, anc))
        outs.append(partial_trace(full, (2, 2, 2), [DATA_QUBIT]))
    return process_tomography(preps, outs)


def code_fidelity(kind, p, model="coherent", cnot_mode="compiled"):
    """Process fidelity to the identity of the corrected data qubit."""
    c = repetition_code_circuit(kind, error_slot(kind, p, model), cnot_mode=cnot_mode)
    return float(np.real(data_process(c)[0, 0]))


@dataclass(frozen=True)
class QecSweep:
    p: np.ndarray
    fidelity: np.ndarray
    coefficients: tuple  # c0, c1, c2, c3


def qec_fidelity_sweep(kind="phase", p_grid=None, model="coherent", cnot_mode="compiled"):
    """Fidelity over a p grid and its cubic fit ``c0 + c1 p + c2 p^2 + c3 p^3``."""
    p = np.linspace(0, 1, 41) if p_grid is None else np.asarray(p_grid, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise InvalidProbability("p grid must lie in [0, 1]")
    f = np.array([code_fidelity(kind, float(x), model, cnot_mode) for x in p])
    coef = np.polynomial.polynomial.polyfit(p, f, 3)
    return QecSweep(p, f, tuple(float(c) for c in coef))


def toffoli_matrix():
    """ccNOT with controls Q1, Q3 and target Q2 (swaps |101> and |111>)."""
    u = np.eye(8, dtype=complex)
    u[[5, 7]] = u[[7, 5]]
    return u


def _nc_toffoli(c, a, b, t, optimized):
    had = Rotation((1, 0, 1), PI)
    tg = lambda q: c.rot(q, Rotation.z(PI / 4))
    tdg = lambda q: c.rot(q, Rotation.z(-PI / 4))
    c.rot(t, had)
    c.cnot(b, t, "exact"); tdg(t)
    c.cnot(a, t, "exact"); tg(t)
    c.cnot(b, t, "exact"); tdg(t)
    c.cnot(a, t, "exact"); tg(t)
    c.rot(t, had)
    if not optimized:
        tg(b)
        c.cnot(a, b, "exact"); tg(a); tdg(b)
        c.cnot(a, b, "exact")
    return c


def toffoli_constructions():
    """Six-cNOT Toffoli, the four-cNOT variant and the ideal ccPhase.

    The four-cNOT circuit drops the gates acting only on the controls; it
    differs from the Toffoli by a phase on the controls' |11> subspace that
    is invisible to the target's reduced state.
    """
    full = _nc_toffoli(Circuit(3), 0, 2, DATA_QUBIT, optimized=False)
    opt = _nc_toffoli(Circuit(3), 0, 2, DATA_QUBIT, optimized=True)
    return full, opt, PhaseGateSpec(3, {"111": PI}).unitary()


def equal_up_to_phase(a, b):
    """Operator distance after aligning the global phase."""
    a, b = as_matrix(a), as_matrix(b)
    ov = np.trace(b.conj().T @ a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def ghz_phi_closed(phi):
    """``(|000> - i e^{i phi} |111>) / sqrt 2``."""
    psi = np.zeros(8, dtype=complex)
    psi[0] = 1 / math.sqrt(2)
    psi[7] = -1j * np.exp(1j * phi) / math.sqrt(2)
    return psi


def ghz_phi_circuit(phi):
    """Pi/2 rotation of Q2 about the in-plane axis at angle phi, then two
    compiled cNOTs onto Q1 and Q3."""
    c = Circuit(3).rot(DATA_QUBIT, Rotation((math.cos(phi), math.sin(phi), 0), PI / 2))
    return c.extend(encode_circuit("compiled"))


def ghz_phi_state(phi):
    """GHZ-family state built by circuit and checked against the closed form."""
    u = circuit_unitary(ghz_phi_circuit(phi))
    psi = u[:, 0]
    ref = ghz_phi_closed(phi)
    if np.linalg.norm(psi - ref) > 1e-9:
        raise AssertionError("GHZ circuit disagrees with the closed form")
    return psi


def _expect(rho, label):
    return float(np.real(np.trace(rho @ pauli_operator(label))))


@dataclass(frozen=True)
class WitnessReport:
    M_S1: float
    M_S2: float
    M_P1: float
    M_P2: float
    CHSH: float
    ghz_fidelity: float
    ghz_phi: float


def mermin_terms(rho):
    e = {s: _expect(rho, s) for s in ("XXX", "YYX", "YXY", "XYY", "YYY", "XXY", "XYX", "YXX")}
    s1 = e["XXX"] - e["YYX"] - e["YXY"] - e["XYY"]
    # Last term is XYY; YXX would be the symmetric counterpart.
    s2 = -e["YYY"] + e["XXY"] + e["XYX"] + e["XYY"]
    p1 = e["XXX"] * e["YYX"] * e["YXY"] * e["XYY"]
    p2 = e["YYY"] * e["XXY"] * e["XYX"] * e["YXX"]
    return s1, s2, p1, p2


def chsh(rho2):
    """``<XX> - <XZ> + <ZX> + <ZZ>`` of a two-qubit state."""
    rho2 = as_matrix(rho2)
    return _expect(rho2, "XX") - _expect(rho2, "XZ") + _expect(rho2, "ZX") + _expect(rho2, "ZZ")


def ghz_family_fidelity(rho, n_grid=PHI_GRID_POINTS):
    """Maximum of ``<GHZ_phi| rho |GHZ_phi>`` over phi; returns (F, phi)."""
    f = lambda phi: float(np.real(ghz_phi_closed(phi).conj() @ rho @ ghz_phi_closed(phi)))
    grid = np.linspace(0, 2 * PI, n_grid, endpoint=False)
    vals = np.array([f(x) for x in grid])
    k = int(np.argmax(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda x: -f(x), bounds=(grid[k] - step, grid[k] + step),
                          method="bounded", options={"xatol": 1e-12})
    if -res.fun >= vals[k]:
        return float(min(-res.fun, 1.0)), float(res.x % (2 * PI))
    return float(vals[k]), float(grid[k])


def witnesses(rho):
    """Mermin sums and products, CHSH and GHZ-family fidelity of a 3-qubit state.

    CHSH is the largest magnitude over the three reduced qubit pairs.
    """
    rho = _as_rho(rho)
    if rho.shape != (8, 8):
        raise DimMismatch("witnesses need a three-qubit state")
    s1, s2, p1, p2 = mermin_terms(rho)
    pairs = ([0, 1], [1, 2], [0, 2])
    ch = max((chsh(partial_trace(rho, (2, 2, 2), k)) for k in pairs), key=abs)
    fid, phi = ghz_family_fidelity(rho)
    return WitnessReport(s1, s2, p1, p2, ch, fid, phi)


def bell_chsh_optimal():
    """A two-qubit state reaching ``2 sqrt 2`` for the CHSH form above."""
    psi = (basis_state("00") + basis_state("11")) / math.sqrt(2)
    ry = rotation_unitary(Rotation.y(-PI / 4))
    return dm(kron(ry, I2) @ psi)

