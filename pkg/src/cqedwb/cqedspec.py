"""Composite qubit-cavity Hamiltonians, dispersive shifts, avoided-crossing
dynamics and phase-gate bookkeeping.

Tensor ordering is ``qubit_0 x qubit_1 x ... x cavity``. All energies are
linear frequencies in GHz and times are in ns.
"""
from dataclasses import dataclass, field, replace
import itertools
import math

import numpy as np
from scipy.integrate import trapezoid

from .errors import (DimTooLarge, Divergent, InvalidInput, LabelAmbiguous,
                     NotPhaseGate)
from .numkit import eig_hermitian, evolve_unitary
from .transmon import TransmonParams, cpb_hamiltonian, transmon_levels

MAX_DIM = 4096
DEFAULT_PHOTONS = 5


def wrap_phase(phi):
    """Map an angle onto (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class Qubit:
    """A multi-level qubit coupled to the cavity.

    ``levels_ghz[j]`` is the bare energy of level j (level 0 at 0 GHz) and
    ``couplings_ghz[j]`` couples level j to level j+1 through the cavity.
    """

    levels_ghz: tuple
    couplings_ghz: tuple

    def __post_init__(self):
        if len(self.levels_ghz) < 2:
            raise InvalidInput("a qubit needs at least two levels")
        if len(self.couplings_ghz) != len(self.levels_ghz) - 1:
            raise InvalidInput("need one coupling per adjacent level pair")
        if not all(np.isfinite(self.levels_ghz)) or not all(np.isfinite(self.couplings_ghz)):
            raise InvalidInput("qubit frequencies and couplings must be finite")
        if any(g < 0 for g in self.couplings_ghz):
            raise InvalidInput("couplings must be non-negative")

    @property
    def n_levels(self):
        return len(self.levels_ghz)

    @property
    def g(self):
        return self.couplings_ghz[0]

    @property
    def f01(self):
        return self.levels_ghz[1] - self.levels_ghz[0]

    @classmethod
    def two_level(cls, f01_ghz, g_ghz):
        return cls((0.0, float(f01_ghz)), (float(g_ghz),))

    @classmethod
    def anharmonic(cls, f01_ghz, alpha_ghz, g_ghz, n_levels=3):
        """Weakly anharmonic ladder with sqrt(j+1) coupling enhancement."""
        levels = tuple(j * f01_ghz + alpha_ghz * j * (j - 1) / 2 for j in range(n_levels))
        gs = tuple(g_ghz * math.sqrt(j + 1) for j in range(n_levels - 1))
        return cls(levels, gs)

    @classmethod
    def from_transmon(cls, p: TransmonParams, g_ghz, n_levels=3):
        """Levels and charge matrix elements from the charge-basis model.

        Couplings are scaled by ``<j|n|j+1> / <0|n|1>`` so that ``g_ghz``
        is the 0-1 coupling.
        """
        evals = transmon_levels(p, n_levels)
        _, vecs = eig_hermitian(cpb_hamiltonian(p))
        n_op = np.arange(-p.charge_cutoff, p.charge_cutoff + 1)
        elems = [abs(vecs[:, j].conj() @ (n_op * vecs[:, j + 1])) for j in range(n_levels - 1)]
        levels = tuple(float(e - evals[0]) for e in evals)
        gs = tuple(float(g_ghz * m / elems[0]) for m in elems)
        return cls(levels, gs)


@dataclass(frozen=True)
class SystemSpec:
    """Qubits coupled to a single cavity mode.

    ``n_photons`` is the number of Fock states kept for the cavity.
    """

    qubits: tuple
    cavity_ghz: float
    n_photons: int = DEFAULT_PHOTONS

    def __post_init__(self):
        if self.n_photons < 2:
            raise InvalidInput("cavity cutoff must be at least 2")
        if not np.isfinite(self.cavity_ghz):
            raise InvalidInput("cavity frequency must be finite")

    @property
    def dims(self):
        return [q.n_levels for q in self.qubits] + [self.n_photons]

    def with_qubit(self, index, qubit):
        qs = list(self.qubits)
        qs[index] = qubit
        return replace(self, qubits=tuple(qs))

    def scaled(self, lam):
        """Copy with every coupling multiplied by ``lam``."""
        qs = tuple(Qubit(q.levels_ghz, tuple(lam * g for g in q.couplings_ghz))
                   for q in self.qubits)
        return replace(self, qubits=qs)

    def hamiltonian(self, rwa=True):
        return build_jc_hamiltonian(self, rwa)


def _op_on(op, k, dims):
    out = np.array([[1.0 + 0j]])
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == k else np.eye(d))
    return out


def build_jc_hamiltonian(s: SystemSpec, rwa=True):
    """Qubits-plus-cavity Hamiltonian (GHz).

    With ``rwa=True`` only excitation-conserving terms are kept. Otherwise
    each ladder coupling multiplies ``(a + a^dagger)``.
    """
    dims = s.dims
    dim = int(np.prod(dims))
    if dim > MAX_DIM:
        raise DimTooLarge(f"Hilbert space dimension {dim} exceeds {MAX_DIM}")
    nc = s.n_photons
    cav = len(dims) - 1
    a = np.diag(np.sqrt(np.arange(1, nc)), 1).astype(complex)
    a_full = _op_on(a, cav, dims)
    h = s.cavity_ghz * (a_full.conj().T @ a_full)
    for k, q in enumerate(s.qubits):
        h = h + _op_on(np.diag(q.levels_ghz).astype(complex), k, dims)
        lower = np.zeros((q.n_levels, q.n_levels), dtype=complex)
        for j, g in enumerate(q.couplings_ghz):
            lower[j, j + 1] = g
        low_full = _op_on(lower, k, dims)
        if rwa:
            term = low_full @ a_full.conj().T
            h = h + term + term.conj().T
        else:
            x = low_full + low_full.conj().T
            h = h + x @ (a_full + a_full.conj().T)
    return h


def excitation_number(s: SystemSpec):
    """Total excitation-number operator (qubit level index plus photons)."""
    dims = s.dims
    n = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for k, d in enumerate(dims):
        n = n + _op_on(np.diag(np.arange(d)).astype(complex), k, dims)
    return n


def jc_ladder_energies(n, g, delta, omega_r=0.0):
    """Dressed energies ``(E_plus, E_minus)`` of the n-excitation doublet.

    ``E = n*omega_r +/- sqrt(4 g^2 n + delta^2)/2``. The bare doublet is
    centred ``delta/2`` above ``n*omega_r`` when ``delta = f_q - f_r``.
    """
    if n < 1:
        raise InvalidInput("excitation number must be at least 1")
    half = 0.5 * math.sqrt(4 * g * g * n + delta * delta)
    return n * omega_r + half, n * omega_r - half


def chi_dispersive(g, delta, ec):
    """Perturbative transmon dispersive shift (GHz).

    ``chi = -(g^2/delta) * ec / (delta - ec)`` with ``delta = f01 - f_r``.
    The sign follows the ``chi_exact`` convention, in which a two-level
    qubit gives ``+g^2/delta``.
    """
    if abs(delta) < 1e-15 or abs(delta - ec) < 1e-15:
        raise Divergent("dispersive shift diverges at delta = 0 or delta = EC")
    return -(g * g / delta) * ec / (delta - ec)


def _label_index(label, dims):
    return int(np.ravel_multi_index(tuple(label), dims))


def dressed_energies(s: SystemSpec, labels, steps=40, threshold=0.5):
    """Energies of dressed states continued adiabatically from bare labels.

    Couplings are ramped from zero in ``steps`` increments; at each step a
    tracked state follows the eigenvector of maximal overlap.
    """
    dims = s.dims
    if all(g == 0 for q in s.qubits for g in q.couplings_ghz):
        h = np.real(np.diag(s.hamiltonian()))
        return np.array([h[_label_index(lab, dims)] for lab in labels])
    vecs = [np.eye(int(np.prod(dims)))[_label_index(lab, dims)] for lab in labels]
    energies = [0.0] * len(labels)
    for lam in np.linspace(0, 1, steps + 1)[1:]:
        evals, evecs = eig_hermitian(s.scaled(lam).hamiltonian())
        for i, v in enumerate(vecs):
            ov = np.abs(evecs.conj().T @ v) ** 2
            k = int(np.argmax(ov))
            if ov[k] < threshold:
                raise LabelAmbiguous(f"state {labels[i]} overlap {ov[k]:.3f} < {threshold}")
            vecs[i] = evecs[:, k]
            energies[i] = evals[k]
    return np.array(energies)


def qubit_line_frequencies(s: SystemSpec, n_max, qubit=0, steps=40):
    """Qubit 0-1 transition frequency with n = 0..n_max photons present."""
    others = [0] * len(s.qubits)
    labels = []
    for n in range(n_max + 1):
        for lvl in (0, 1):
            lab = list(others)
            lab[qubit] = lvl
            labels.append(tuple(lab) + (n,))
    e = dressed_energies(s, labels, steps)
    return e[1::2] - e[0::2]


def chi_exact(s: SystemSpec, qubit=0, steps=40):
    """Dispersive shift from the full spectrum.

    ``chi = ((E(e,1) - E(e,0)) - (E(g,1) - E(g,0))) / 2`` with dressed
    states labelled by adiabatic continuation from zero coupling.
    """
    f = qubit_line_frequencies(s, 1, qubit, steps)
    return 0.5 * (f[1] - f[0])


def zz_xi(g1, g2, delta1, delta2, delta_a, delta_b):
    """Fourth-order qubit-qubit ZZ coupling for two three-level transmons.

    ``delta_i = f01_i - f_r``; ``delta_a = f01_1 - f12_2`` and
    ``delta_b = f01_2 - f12_1``, so that each ``delta`` pairs with the
    ``Delta`` of the same qubit. With this pairing ``xi = -zeta`` to fourth
    order, where ``zeta`` comes from full diagonalization.
    """
    for d in (delta1, delta2, delta_a, delta_b):
        if abs(d) < 1e-9:
            raise Divergent("ZZ coupling diverges at a resonance")
    return -2 * g1 ** 2 * g2 ** 2 * (1 / (delta_a * delta1 ** 2) + 1 / (delta_b * delta2 ** 2)
                                     + 1 / (delta1 * delta2 ** 2) + 1 / (delta2 * delta1 ** 2))


def zeta(s: SystemSpec, steps=40):
    """``E(11) + E(00) - E(10) - E(01)`` for the first two qubits, zero photons."""
    extra = [0] * (len(s.qubits) - 2)
    labs = [tuple([a, b] + extra + [0]) for a, b in ((1, 1), (0, 0), (1, 0), (0, 1))]
    e = dressed_energies(s, labs, steps)
    return e[0] + e[1] - e[2] - e[3]


@dataclass(frozen=True)
class CrossingModel:
    """Two-level avoided crossing ``[[0, g], [g, -delta]]`` (GHz)."""

    g_ghz: float
    delta_ghz: float

    def __post_init__(self):
        if not self.g_ghz > 0:
            raise InvalidInput("crossing coupling must be positive")

    def hamiltonian(self):
        return np.array([[0, self.g_ghz], [self.g_ghz, -self.delta_ghz]], dtype=complex)

    @property
    def t_rp(self):
        return 1.0 / math.hypot(2 * self.g_ghz, self.delta_ghz)


_V0 = np.array([0, 1], dtype=complex)


def crossing_return_probability(m: CrossingModel, t_ns):
    u = evolve_unitary(m.hamiltonian(), t_ns)
    return float(abs(_V0 @ u @ _V0) ** 2)


def crossing_conditional_phase(m: CrossingModel):
    """Conditional phase acquired after one full return, in radians."""
    return math.pi * (1 - m.delta_ghz / math.hypot(2 * m.g_ghz, m.delta_ghz))


def crossing_phase_numeric(m: CrossingModel, t_ns=None):
    """Conditional phase from the propagated 2x2 model, relative to the
    uncoupled evolution of the same state, mapped to [0, 2 pi)."""
    t = m.t_rp if t_ns is None else t_ns
    u = evolve_piecewise(m, [({}, t)])
    bare = evolve_piecewise(replace(m, g_ghz=1e-300), [({}, t)])
    return float(np.angle(_V0 @ u @ _V0) - np.angle(_V0 @ bare @ _V0)) % (2 * math.pi)


def evolve_piecewise(base, segments):
    """Ordered product of propagators for piecewise-constant parameters.

    ``segments`` is a list of ``(overrides, duration_ns)``; each overrides
    dict is applied to ``base`` with :func:`dataclasses.replace` and the
    resulting object's ``hamiltonian()`` is evolved. Negative durations
    run the segment backwards.
    """
    u = None
    for overrides, duration in segments:
        obj = replace(base, **overrides) if overrides else base
        step = evolve_unitary(obj.hamiltonian(), duration)
        u = step if u is None else step @ u
    if u is None:
        dim = base.hamiltonian().shape[0]
        return np.eye(dim, dtype=complex)
    return u


def chevron_map(s: SystemSpec, qubit_freqs, times, initial, target, qubit=0):
    """Population of ``target`` after starting in ``initial`` for a grid of
    sudden qubit-frequency steps (rows) and interaction times (columns)."""
    dims = s.dims
    i0 = _label_index(initial, dims)
    i1 = _label_index(target, dims)
    out = np.empty((len(qubit_freqs), len(times)))
    for r, f in enumerate(qubit_freqs):
        q = s.qubits[qubit]
        shift = f - q.f01
        levels = tuple(e + j * shift for j, e in enumerate(q.levels_ghz))
        h = s.with_qubit(qubit, Qubit(levels, q.couplings_ghz)).hamiltonian()
        evals, evecs = eig_hermitian(h)
        c0 = evecs.conj().T[:, i0]
        row = evecs[i1, :]
        for c, t in enumerate(times):
            amp = row @ (np.exp(-2j * np.pi * evals * t) * c0)
            out[r, c] = abs(amp) ** 2
    return out


def oscillation_frequency(trace, times, f_max):
    """Dominant oscillation frequency of a uniformly sampled trace."""
    y = np.asarray(trace) - np.mean(trace)
    t = np.asarray(times)
    freqs = np.linspace(f_max / 2000, f_max, 4000)
    power = np.abs(np.exp(-2j * np.pi * np.outer(freqs, t)) @ y)
    k = int(np.argmax(power))
    lo, hi = freqs[max(k - 1, 0)], freqs[min(k + 1, len(freqs) - 1)]
    fine = np.linspace(lo, hi, 400)
    power = np.abs(np.exp(-2j * np.pi * np.outer(fine, t)) @ y)
    return float(fine[np.argmax(power)])


@dataclass(frozen=True)
class PhaseGateSpec:
    """Diagonal phase gate parameters, keyed by excited-qubit bit string.

    For two qubits the keys are ``"10"``, ``"01"`` and ``"11"``; for three
    they are the seven non-zero bit strings. The phase applied to a basis
    state is the sum of the parameters of all its non-empty sub-strings.
    """

    n_qubits: int
    phases: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = _phase_keys(self.n_qubits)
        clean = {k: wrap_phase(float(self.phases.get(k, 0.0))) for k in keys}
        unknown = set(self.phases) - set(keys)
        if unknown:
            raise InvalidInput(f"unknown phase keys {sorted(unknown)}")
        object.__setattr__(self, "phases", clean)

    def __getitem__(self, key):
        return self.phases[key]

    def unitary(self):
        return phase_gate_unitary(self)


def _phase_keys(n):
    keys = ["".join(b) for b in itertools.product("01", repeat=n)][1:]
    return sorted(keys, key=lambda k: (k.count("1"), [-int(c) for c in k]))


def _submasks(bits):
    ones = [i for i, c in enumerate(bits) if c == "1"]
    for r in range(1, len(ones) + 1):
        for combo in itertools.combinations(ones, r):
            yield "".join("1" if i in combo else "0" for i in range(len(bits)))


def phase_gate_unitary(spec: PhaseGateSpec):
    n = spec.n_qubits
    diag = []
    for bits in ("".join(b) for b in itertools.product("01", repeat=n)):
        diag.append(sum(spec.phases[m] for m in _submasks(bits)))
    return np.diag(np.exp(1j * np.array(diag)))


def extract_phase_gate(u, n_qubits, tol=1e-6):
    """Read the phase-gate parameters of a diagonal unitary.

    The global phase is fixed by ``u[0, 0]``. Raises ``NotPhaseGate`` when
    the off-diagonal weight exceeds ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    d = 2 ** n_qubits
    if u.shape != (d, d):
        raise InvalidInput(f"expected a {d}x{d} matrix")
    leaked = float(np.sum(np.abs(u - np.diag(np.diag(u))) ** 2))
    if leaked > tol:
        raise NotPhaseGate(f"off-diagonal weight {leaked:.3g} exceeds {tol}", leaked)
    diag = np.diag(u)
    raw = {}
    for idx, bits in enumerate("".join(b) for b in itertools.product("01", repeat=n_qubits)):
        raw[bits] = float(np.angle(diag[idx] / diag[0]))
    phases = {}
    for key in _phase_keys(n_qubits):
        acc = raw[key] - sum(phases[m] for m in _submasks(key) if m != key)
        phases[key] = wrap_phase(acc)
    return PhaseGateSpec(n_qubits, phases)


def adiabatic_conditional_phase(trajectory, duration_ns, dt_ns=0.1, steps=40):
    """Conditional phase of an adiabatic flux trajectory.

    ``trajectory(t)`` returns the :class:`SystemSpec` at time ``t``. The
    phase is ``-2 pi * integral(zeta dt)`` by the trapezoid rule, matching
    the sign produced by :func:`extract_phase_gate` on ``exp(-2 pi i H t)``.
    """
    n = max(int(math.ceil(duration_ns / dt_ns)), 1)
    ts = np.linspace(0, duration_ns, n + 1)
    z = np.array([zeta(trajectory(t), steps) for t in ts])
    return -2 * math.pi * float(trapezoid(z, ts))
