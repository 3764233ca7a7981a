"""Single-qubit rotations, pulse-error models and the AllXY diagnostic."""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateBasis, InvalidInput
from .numkit import I2, SX, SY, SZ, evolve_unitary

PI = math.pi


@dataclass(frozen=True)
class Rotation:
    """Rotation by ``angle`` (rad) about the unit vector ``axis``."""

    axis: tuple
    angle: float

    def __post_init__(self):
        n = np.asarray(self.axis, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)) or not math.isfinite(self.angle):
            raise InvalidInput("rotation needs a finite 3-vector axis and angle")
        norm = float(np.linalg.norm(n))
        if norm == 0:
            raise InvalidInput("rotation axis must be non-zero")
        object.__setattr__(self, "axis", tuple(float(v) for v in n / norm))

    @classmethod
    def x(cls, angle):
        return cls((1.0, 0.0, 0.0), angle)

    @classmethod
    def y(cls, angle):
        return cls((0.0, 1.0, 0.0), angle)

    @classmethod
    def z(cls, angle):
        return cls((0.0, 0.0, 1.0), angle)

    @classmethod
    def identity(cls):
        return cls((1.0, 0.0, 0.0), 0.0)


_EXACT = {0.0: (1.0, 0.0), PI / 2: (math.sqrt(0.5), math.sqrt(0.5)), PI: (0.0, 1.0)}


def rotation_unitary(r: Rotation):
    """``cos(theta/2) I - i sin(theta/2) n.sigma``."""
    c, s = _EXACT.get(r.angle, (math.cos(r.angle / 2), math.sin(r.angle / 2)))
    nx, ny, nz = r.axis
    return c * I2 - 1j * s * (nx * SX + ny * SY + nz * SZ)


def rabi_trace(omega_ghz, times_ns):
    """Excited-state population under a resonant drive of Rabi rate ``omega``."""
    t = np.asarray(times_ns, dtype=float)
    return np.sin(PI * omega_ghz * t) ** 2


def rabi_trace_propagated(omega_ghz, times_ns):
    """Same as :func:`rabi_trace` by propagating ``(omega/2) sigma_x``."""
    h = 0.5 * omega_ghz * SX
    return np.array([abs(evolve_unitary(h, t)[1, 0]) ** 2 for t in times_ns])


@dataclass(frozen=True)
class PulseErrorModel:
    """Systematic pulse errors.

    Attributes
    ----------
    power_db : float
        Drive amplitude error; every angle is scaled by ``10**(dB/20)``.
    detuning_frac : float
        Detuning-time product. A pulse of nominal angle theta acquires a
        ``sigma_z`` component of relative weight ``detuning_frac*(pi/2)/theta``
        (equal-duration pulses), after which the axis is renormalized.
    skew_rad : float
        Non-orthogonality: the y axis is rotated towards -x by this angle.
    amp_imbalance : float
        Fractional excess of x-pulse amplitude over y-pulse amplitude.
    """

    power_db: float = 0.0
    detuning_frac: float = 0.0
    skew_rad: float = 0.0
    amp_imbalance: float = 0.0

    def __post_init__(self):
        vals = (self.power_db, self.detuning_frac, self.skew_rad, self.amp_imbalance)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInput("pulse errors must be finite")


def power_db_for_overrotation(eps):
    """Power error whose pi/2 pulse over-rotates by ``eps`` radians."""
    return 20 * math.log10(1 + 2 * eps / PI)


def apply_error(r: Rotation, e: PulseErrorModel):
    """Unitary of rotation ``r`` distorted by the error model ``e``."""
    axis = np.array(r.axis)
    theta = r.angle * 10 ** (e.power_db / 20)
    if abs(axis[2]) < 1 - 1e-12:
        # In-plane drive: imbalance and skew act on the x/y quadratures.
        ax, ay = axis[0], axis[1]
        ax_scaled = ax * (1 + e.amp_imbalance)
        vec = np.array([ax_scaled - ay * math.sin(e.skew_rad), ay * math.cos(e.skew_rad), 0.0])
        amp = float(np.linalg.norm(vec[:2])) / math.hypot(ax, ay)
        theta *= amp
        axis = vec / np.linalg.norm(vec) * math.hypot(ax, ay) + np.array([0, 0, axis[2]])
        if e.detuning_frac and r.angle != 0:
            axis = axis + np.array([0, 0, e.detuning_frac * (PI / 2) / r.angle])
    axis = axis / np.linalg.norm(axis)
    return rotation_unitary(Rotation(tuple(axis), theta))


PULSES = {
    "Id": Rotation.identity(),
    "Xp": Rotation.x(PI),
    "Yp": Rotation.y(PI),
    "X9": Rotation.x(PI / 2),
    "Y9": Rotation.y(PI / 2),
}

ALLXY_SEQUENCE = (
    ("Id", "Id"), ("Xp", "Xp"), ("Yp", "Yp"), ("Xp", "Yp"), ("Yp", "Xp"),
    ("X9", "Id"), ("Y9", "Id"), ("X9", "Y9"), ("Y9", "X9"), ("X9", "Yp"),
    ("Y9", "Xp"), ("Xp", "Y9"), ("Yp", "X9"), ("X9", "Xp"), ("Xp", "X9"),
    ("Y9", "Yp"), ("Yp", "Y9"), ("Xp", "Id"), ("Yp", "Id"), ("X9", "X9"),
    ("Y9", "Y9"),
)
ALLXY_IDEAL = (1,) * 5 + (0,) * 12 + (-1,) * 4
ALLXY_LABELS = tuple(f"{a},{b}" for a, b in ALLXY_SEQUENCE)

# Leading linear coefficients of <z> in the expansion parameter epsilon.
ALLXY_POWER_SLOPES = {
    "X9,Id": -1, "Y9,Id": -1, "X9,Yp": 1, "Y9,Xp": 1, "Xp,Y9": 1, "Yp,X9": 1,
    "X9,Xp": 3, "Xp,X9": 3, "Y9,Yp": 3, "Yp,Y9": 3,
}
ALLXY_DETUNING_SLOPES = {
    "X9,Y9": -2, "Y9,X9": 2, "X9,Yp": -1, "Y9,Xp": 1, "Xp,Y9": -1, "Yp,X9": 1,
}


@dataclass(frozen=True)
class AllXYResult:
    labels: tuple
    z: np.ndarray
    ideal: tuple = field(default=ALLXY_IDEAL)

    @property
    def deviation(self):
        return self.z - np.array(self.ideal, dtype=float)


def allxy_simulate(e: PulseErrorModel = PulseErrorModel()):
    """``<sigma_z>`` after each of the 21 AllXY pulse pairs applied to |0>."""
    cache = {k: apply_error(r, e) for k, r in PULSES.items()}
    ground = np.array([1, 0], dtype=complex)
    z = []
    for a, b in ALLXY_SEQUENCE:
        psi = cache[b] @ (cache[a] @ ground)
        z.append(float(abs(psi[0]) ** 2 - abs(psi[1]) ** 2))
    z = np.array(z)
    # Error-free sequences are exact integers; clean rounding residue.
    if e == PulseErrorModel():
        z = np.round(z).astype(float) + 0.0
    return AllXYResult(ALLXY_LABELS, z)


def allxy_slopes(kind, eps=1e-4):
    """Central finite-difference slopes d<z>/d(epsilon) for every sequence."""
    def model(x):
        if kind == "power":
            return PulseErrorModel(power_db=power_db_for_overrotation(x))
        if kind == "detuning":
            return PulseErrorModel(detuning_frac=x)
        raise InvalidInput(f"unknown error kind {kind!r}")

    up = allxy_simulate(model(eps)).z
    down = allxy_simulate(model(-eps)).z
    return dict(zip(ALLXY_LABELS, (up - down) / (2 * eps)))


def syndrome_vectors(eps=1e-4):
    """Unit deviation patterns for small power and detuning errors."""
    out = {}
    for kind in ("power", "detuning"):
        v = np.array(list(allxy_slopes(kind, eps).values()))
        out[kind] = v / np.linalg.norm(v)
    return out


@dataclass(frozen=True)
class SyndromeFit:
    coefficients: dict
    residual: float


def allxy_syndrome_fit(result: AllXYResult, basis=None):
    """Least-squares projection of the AllXY deviation onto error syndromes."""
    basis = syndrome_vectors() if basis is None else basis
    names = list(basis)
    a = np.column_stack([basis[k] for k in names])
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if abs(abs(a[:, i] @ a[:, j]) - 1) < 1e-6:
                raise DegenerateBasis(f"syndromes {names[i]} and {names[j]} are parallel")
    dev = result.deviation
    coef, *_ = np.linalg.lstsq(a, dev, rcond=None)
    resid = float(np.linalg.norm(dev - a @ coef))
    return SyndromeFit(dict(zip(names, map(float, coef))), resid)
