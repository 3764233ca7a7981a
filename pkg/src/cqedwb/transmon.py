"""Cooper-pair-box / transmon spectra, flux tuning and flux-noise dephasing.

Energies are E/h in GHz. The charge-basis Hamiltonian is truncated to
charge states -N..N.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import InvalidInput, OutOfRegime, TruncationNotConverged
from .numkit import eig_hermitian

HBAR = 1.054571817e-34  # J s
H_PLANCK = 2 * math.pi * HBAR
PHI0 = 2.067833848e-15  # Wb

DEFAULT_CUTOFF = 15
MAX_CUTOFF = 200
CONVERGENCE_GHZ = 1e-6


@dataclass(frozen=True)
class TransmonParams:
    """Split-junction transmon parameters.

    Attributes
    ----------
    ej1_ghz, ej2_ghz : float
        Junction Josephson energies (GHz).
    ec_ghz : float
        Charging energy (GHz).
    ng : float
        Offset gate charge in Cooper pairs.
    flux_phi0 : float
        Loop flux in units of the flux quantum.
    charge_cutoff : int
        Charge states run from -N to N.
    """

    ej1_ghz: float
    ej2_ghz: float
    ec_ghz: float
    ng: float = 0.0
    flux_phi0: float = 0.0
    charge_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        vals = (self.ej1_ghz, self.ej2_ghz, self.ec_ghz, self.ng, self.flux_phi0)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInput("transmon parameters must be finite")
        if self.ec_ghz <= 0:
            raise InvalidInput("ec_ghz must be positive")
        if self.ej1_ghz + self.ej2_ghz <= 0:
            raise InvalidInput("total Josephson energy must be positive")
        if self.charge_cutoff < 10:
            raise InvalidInput("charge_cutoff must be at least 10")

    @classmethod
    def symmetric(cls, ej_ghz, ec_ghz, **kw):
        """Two identical junctions with total Josephson energy ``ej_ghz``."""
        return cls(ej_ghz / 2, ej_ghz / 2, ec_ghz, **kw)

    @property
    def ej_max(self):
        return self.ej1_ghz + self.ej2_ghz


@dataclass(frozen=True)
class FluxNoiseParams:
    a_phi0: float

    def __post_init__(self):
        if not self.a_phi0 > 0:
            raise InvalidInput("flux noise amplitude must be positive")


def ej_effective(p):
    """Effective Josephson energy magnitude and junction asymmetry ``d``."""
    d = (p.ej1_ghz - p.ej2_ghz) / p.ej_max
    x = math.pi * p.flux_phi0
    # |cos x| * sqrt(1 + d^2 tan^2 x) written without the tan singularity
    mag = p.ej_max * math.sqrt(math.cos(x) ** 2 + (d * math.sin(x)) ** 2)
    return mag, d


def cpb_hamiltonian(p, ej_ghz=None):
    """Charge-basis Hamiltonian of size 2N+1 (GHz)."""
    ej = ej_effective(p)[0] if ej_ghz is None else ej_ghz
    n = np.arange(-p.charge_cutoff, p.charge_cutoff + 1)
    h = np.diag(4 * p.ec_ghz * (n - p.ng) ** 2).astype(complex)
    off = -ej / 2 * np.ones(len(n) - 1)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h


def _raw_levels(p, n_levels):
    return eig_hermitian(cpb_hamiltonian(p))[0][:n_levels]


def transmon_levels(p, n_levels=4):
    """Lowest ``n_levels`` energies, escalating the cutoff until converged.

    The cutoff N is increased in steps of 5 until the levels move by less
    than 1e-6 GHz between N and N+5.
    """
    cur = p
    levels = _raw_levels(cur, n_levels)
    while cur.charge_cutoff + 5 <= MAX_CUTOFF:
        nxt = replace(cur, charge_cutoff=cur.charge_cutoff + 5)
        new = _raw_levels(nxt, n_levels)
        if np.max(np.abs(new - levels)) < CONVERGENCE_GHZ:
            return levels
        cur, levels = nxt, new
    raise TruncationNotConverged(f"levels not converged at N={cur.charge_cutoff}")


def transmon_f01_anharmonicity(p):
    """Return ``(f01, alpha)`` in GHz from exact diagonalization."""
    e = transmon_levels(p, 3)
    f01 = e[1] - e[0]
    return f01, (e[2] - e[1]) - f01


def f01_asymptotic(ej_ghz, ec_ghz):
    return math.sqrt(8 * ej_ghz * ec_ghz) - ec_ghz


def charge_dispersion_wkb(m, p):
    """Asymptotic charge dispersion of level ``m`` (GHz).

    Uses ``exp(-sqrt(8 EJ/EC))`` for the exponential factor. The sign
    alternates with ``m``.
    """
    ej = ej_effective(p)[0]
    ec = p.ec_ghz
    if ej / ec <= 10:
        raise OutOfRegime(f"EJ/EC = {ej / ec:.3g} is not in the transmon regime")
    return ((-1) ** m * ec * 2 ** (4 * m + 5) / math.factorial(m)
            * math.sqrt(2 / math.pi) * (ej / (2 * ec)) ** (m / 2 + 0.75)
            * math.exp(-math.sqrt(8 * ej / ec)))


def charge_dispersion_exact(m, p):
    """``E_m(ng=1/2) - E_m(ng=0)`` from diagonalization (GHz)."""
    e0 = transmon_levels(replace(p, ng=0.0), m + 1)[m]
    e5 = transmon_levels(replace(p, ng=0.5), m + 1)[m]
    return e5 - e0


def f01_vs_flux(p, flux_grid, min_ratio=10.0):
    """Transition frequency across a flux sweep.

    Returns a dict with the flux grid, the asymptotic formula, the exact
    diagonalization, and a boolean ``out_of_regime`` mask marking points
    where EJ_eff/EC < ``min_ratio`` and the asymptotic form does not apply.
    """
    flux = np.asarray(flux_grid, dtype=float)
    if not np.all(np.isfinite(flux)):
        raise InvalidInput("flux grid must be finite")
    approx = np.empty_like(flux)
    exact = np.empty_like(flux)
    flags = np.zeros(flux.shape, dtype=bool)
    for i, f in enumerate(flux):
        q = replace(p, flux_phi0=float(f))
        ej = ej_effective(q)[0]
        approx[i] = f01_asymptotic(ej, p.ec_ghz)
        flags[i] = ej / p.ec_ghz < min_ratio
        exact[i] = transmon_f01_anharmonicity(q)[0]
    return {"flux_phi0": flux, "f01_asymptotic": approx, "f01_exact": exact,
            "out_of_regime": flags}


def tphi_flux_noise(p, noise, phi_phi0):
    """Flux-noise dephasing time in seconds for a symmetric transmon.

    Away from integer flux the first-order sensitivity is used; exactly at
    an integer flux quantum the second-order expression applies.
    """
    if abs(p.ej1_ghz - p.ej2_ghz) > 1e-12 * p.ej_max:
        raise OutOfRegime("closed-form dephasing assumes symmetric junctions")
    a = noise.a_phi0
    frac = phi_phi0 - math.floor(phi_phi0)
    if abs(frac - 0.5) < 1e-6:
        raise OutOfRegime("flux within 1e-6 of half a flux quantum")
    ej = p.ej_max * 1e9 * H_PLANCK
    ec = p.ec_ghz * 1e9 * H_PLANCK
    x = math.pi * phi_phi0
    if frac == 0.0:
        return HBAR / (a ** 2 * math.pi ** 4 * math.sqrt(2 * ej * ec))
    # |dE01/dPhi| with Phi in units of the flux quantum
    slope = math.pi * math.sqrt(8 * ej * ec) * abs(math.sin(x)) / (2 * math.sqrt(abs(math.cos(x))))
    return HBAR / (a * slope)
