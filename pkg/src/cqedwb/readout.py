"""Dispersive readout response, SNR estimates and the semiclassical
Jaynes-Cummings bright-state equation."""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InvalidInput, NoConvergence
from .transmon import HBAR

K_B = 1.380649e-23  # J/K
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ReadoutParams:
    """Readout drive and cavity parameters.

    Frequencies are linear (GHz); ``eps_rf`` is a rate in sqrt(photons)/ns.
    """

    eps_rf: float = 0.0
    delta_rf_ghz: float = 0.0
    chi_ghz: float = 0.0
    kappa_in_ghz: float = 0.0
    kappa_out_ghz: float = 0.0
    t1_s: float = 1e-6
    n_bar: float = 1.0
    tn_K: float = 10.0
    omega_r_ghz: float = 8.0

    def __post_init__(self):
        if self.kappa_in_ghz < 0 or self.kappa_out_ghz < 0:
            raise InvalidInput("cavity decay rates must be non-negative")
        if not self.t1_s > 0:
            raise InvalidInput("t1 must be positive")
        if self.n_bar < 0:
            raise InvalidInput("mean photon number must be non-negative")

    @property
    def kappa_ghz(self):
        return self.kappa_in_ghz + self.kappa_out_ghz


def dispersive_alpha(p: ReadoutParams, qubit):
    """Steady-state cavity amplitude for qubit state ``qubit`` = +1 or -1.

    ``alpha = eps / (kappa/2 + i (delta_rf +/- chi))`` in angular units.
    """
    if qubit not in (1, -1):
        raise InvalidInput("qubit must be +1 or -1")
    denom = TWO_PI * (p.kappa_ghz / 2 + 1j * (p.delta_rf_ghz + qubit * p.chi_ghz))
    return p.eps_rf / denom


def distinguishability(p: ReadoutParams):
    """Overlap ``exp(-|alpha_+ - alpha_-|^2)`` of the two pointer states."""
    d = dispersive_alpha(p, 1) - dispersive_alpha(p, -1)
    return math.exp(-abs(d) ** 2)


def measurement_snr(p: ReadoutParams, angular=True):
    """Signal-to-noise ratio of a dispersive measurement over one T1.

    ``SNR = n hbar omega_r sin^2(theta) T1 kappa / (k_B T_N)`` with
    ``theta = atan(2 chi / kappa)``. With ``angular=False`` the cavity
    frequency and linewidth enter as linear frequencies.
    """
    scale = TWO_PI if angular else 1.0
    omega = scale * p.omega_r_ghz * 1e9
    kappa = scale * p.kappa_ghz * 1e9
    if p.kappa_ghz == 0:
        theta = math.pi / 2 if p.chi_ghz else 0.0
    else:
        theta = math.atan(2 * p.chi_ghz / p.kappa_ghz)
    return p.n_bar * HBAR * omega * math.sin(theta) ** 2 * p.t1_s * kappa / (K_B * p.tn_K)


@dataclass(frozen=True)
class BrightStateParams:
    """Semiclassical JC parameters (GHz); ``sigma_z`` is +1 or -1."""

    g_ghz: float
    delta_ghz: float
    kappa_ghz: float
    omega_r_ghz: float
    sigma_z: int = 1

    def __post_init__(self):
        if not self.g_ghz > 0:
            raise InvalidInput("g must be positive")
        if self.sigma_z not in (1, -1):
            raise InvalidInput("sigma_z must be +1 or -1")


def _chi_domain(b, a2):
    return 2 * b.g_ghz ** 2 * (a2 + b.sigma_z) + b.delta_ghz ** 2


def chi_of_amplitude(b: BrightStateParams, a2):
    """Amplitude-dependent dispersive pull ``sigma_z g^2 / sqrt(2 g^2 (A^2 + sigma_z) + delta^2)``."""
    arg = _chi_domain(b, a2)
    if arg <= 0:
        raise DomainError(f"chi(A) undefined at A^2={a2} (radicand {arg:.3g})")
    return b.sigma_z * b.g_ghz ** 2 / math.sqrt(arg)


def _rhs(b, xi, wd, a2):
    chi = chi_of_amplitude(b, a2)
    wr = b.omega_r_ghz
    return wr ** 2 * xi ** 2 / ((wd ** 2 - (wr - chi) ** 2) ** 2 + b.kappa_ghz ** 2 * wd ** 2)


@dataclass(frozen=True)
class BrightRoot:
    a2: float
    stable: bool


def bright_state_solve(b: BrightStateParams, xi, omega_d_ghz, a2_max=1e4,
                       n_scan=2000, tol=1e-10):
    """All steady-state photon numbers ``A^2`` in ``[0, a2_max]``.

    Roots of ``A^2 - F(A^2)`` are bracketed by a sign-change scan over
    log-spaced points and refined by bisection. When three roots exist the
    middle one is marked unstable. Raises ``NoConvergence`` when every
    root lies above ``a2_max``.
    """
    if xi < 0:
        raise InvalidInput("drive amplitude must be non-negative")
    grid = np.concatenate(([0.0], np.logspace(-6, math.log10(a2_max), n_scan)))
    xs, rs = [], []
    for a2 in grid:
        if _chi_domain(b, a2) <= 0:
            continue
        xs.append(a2)
        rs.append(a2 - _rhs(b, xi, omega_d_ghz, a2))
    roots = []
    if xs and rs[0] == 0.0:
        roots.append(xs[0])
    for k in range(len(xs) - 1):
        r0, r1 = rs[k], rs[k + 1]
        if r1 == 0.0:
            roots.append(xs[k + 1])
        elif r0 * r1 < 0:
            f = lambda a: a - _rhs(b, xi, omega_d_ghz, a)
            x = brentq(f, xs[k], xs[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            if abs(f(x)) > tol * max(1.0, x):
                raise NoConvergence(f"residual {f(x):.3g} at A^2={x:.6g}")
            roots.append(x)
    roots = sorted(set(roots))
    if not roots:
        raise NoConvergence(f"no steady state below A^2 = {a2_max:.3g}; raise a2_max")
    stable = [True] * len(roots)
    if len(roots) == 3:
        stable[1] = False
    return [BrightRoot(r, s) for r, s in zip(roots, stable)]
