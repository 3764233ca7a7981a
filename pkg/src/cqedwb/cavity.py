"""Truncated-oscillator optics: coherent states, Kerr evolution, cat states,
Husimi Q functions and photon-number splitting.

Frequencies in GHz, times in ns; a Kerr constant K gives a revival time 1/K.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.special import gammaln

from .errors import InvalidInput, OutOfRegime, TruncationWarning
from .numkit import eig_hermitian

DEFAULT_NMAX = 40
DEFAULT_GRID_POINTS = 121
DEFAULT_EXTENT = 6.0


@dataclass(frozen=True)
class OscillatorSpec:
    n_max: int = DEFAULT_NMAX
    kerr_K_ghz: float = 0.0
    omega_ghz: float = 0.0

    def __post_init__(self):
        if self.n_max < 4:
            raise InvalidInput("truncation must keep at least 4 Fock states")

    @property
    def t_rev_ns(self):
        if self.kerr_K_ghz == 0:
            raise InvalidInput("no revival without a Kerr term")
        return 1.0 / abs(self.kerr_K_ghz)


def annihilation(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def _check_truncation(alpha, n):
    if abs(alpha) ** 2 > n / 4:
        warnings.warn(f"|alpha|^2={abs(alpha) ** 2:.3g} exceeds N/4 for N={n}", TruncationWarning,
                      stacklevel=3)


def displacement(alpha, n):
    """``exp(alpha a^dag - alpha* a)`` on n Fock states, by eigendecomposition."""
    _check_truncation(alpha, n)
    a = annihilation(n)
    # G = alpha a^dag - alpha* a is anti-Hermitian; iG is Hermitian.
    h = 1j * (alpha * a.conj().T - np.conj(alpha) * a)
    w, v = eig_hermitian(h)
    return (v * np.exp(-1j * w)) @ v.conj().T


def coherent_state(alpha, n):
    """Truncated coherent state renormalized on the n kept Fock states."""
    k = np.arange(n)
    if alpha == 0:
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1
        return psi
    logmag = k * math.log(abs(alpha)) - 0.5 * gammaln(k + 1)
    psi = np.exp(logmag - logmag.max() + 1j * k * np.angle(alpha))
    return psi / np.linalg.norm(psi)


def _coherent_rows(alphas, n):
    # Vectorized coherent_state for many amplitudes (one row each).
    k = np.arange(n)
    mag = np.abs(alphas)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = k * np.log(mag) - 0.5 * gammaln(k + 1)
    # 0 * log(0) is the vacuum amplitude
    logmag[:, 0] = 0.0
    logmag = logmag - logmag.max(axis=1, keepdims=True)
    rows = np.exp(logmag + 1j * k * np.angle(alphas)[:, None])
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def fock_state(k, n):
    psi = np.zeros(n, dtype=complex)
    psi[k] = 1
    return psi


def kerr_evolve(psi, K, t, frame="n2"):
    """Kerr evolution in the Fock basis.

    ``frame="n2"`` multiplies amplitude n by ``exp(i (K/2) n^2 2 pi t)``;
    ``frame="normal_ordered"`` uses ``n(n-1)`` in place of ``n^2``, which
    differs by a linear (rotating-frame) term.
    """
    psi = np.asarray(psi, dtype=complex)
    n = np.arange(psi.size, dtype=float)
    if frame == "n2":
        e = n ** 2
    elif frame == "normal_ordered":
        e = n * (n - 1)
    else:
        raise InvalidInput(f"unknown frame {frame!r}")
    return psi * np.exp(1j * math.pi * K * t * e)


def cat_state(q, beta, n=DEFAULT_NMAX):
    """Multi-component cat formed by Kerr evolution of |beta> for 1/(qK).

    ``(1/2q) sum_{p,k=0}^{2q-1} exp(i k (k-p) pi / q) |beta exp(i p pi / q)>``,
    normalized on the truncated space.
    """
    if q < 1 or int(q) != q:
        raise InvalidInput("q must be a positive integer")
    _check_truncation(beta, n)
    psi = np.zeros(n, dtype=complex)
    m = 2 * q
    for p in range(m):
        amp = sum(np.exp(1j * k * (k - p) * math.pi / q) for k in range(m)) / m
        if abs(amp) < 1e-14:
            continue
        psi += amp * coherent_state(beta * np.exp(1j * p * math.pi / q), n)
    return psi / np.linalg.norm(psi)


def kerr_rotation_angle(K, t, beta):
    """Short-time phase-space rotation ``2 pi K t (|beta|^2 + 1/2)`` (rad)."""
    x = K * t * (abs(beta) ** 2 + 0.5)
    if abs(x) >= 0.5:
        raise OutOfRegime(f"K t (|beta|^2 + 1/2) = {x:.3g} is not short-time")
    return 2 * math.pi * x


@dataclass(frozen=True)
class QGrid:
    alpha: np.ndarray
    values: np.ndarray

    @property
    def cell(self):
        re = np.unique(self.alpha.real)
        im = np.unique(self.alpha.imag)
        return (re[1] - re[0]) * (im[1] - im[0])

    @property
    def norm(self):
        return float(self.values.sum() * self.cell)

    def centroid(self):
        return complex(np.sum(self.alpha * self.values) / np.sum(self.values))


def q_function(state, extent=DEFAULT_EXTENT, points=DEFAULT_GRID_POINTS):
    """Husimi ``Q(alpha) = <alpha| rho |alpha> / pi`` on a square grid.

    ``state`` is a Fock-basis vector or density matrix; the grid spans
    ``[-extent, extent]`` in both quadratures.
    """
    st = np.asarray(state, dtype=complex)
    n = st.shape[0]
    xs = np.linspace(-extent, extent, points)
    alpha = xs[None, :] + 1j * xs[:, None]
    flat = alpha.reshape(-1)
    coh = _coherent_rows(flat, n)
    if st.ndim == 1:
        vals = np.abs(coh.conj() @ st) ** 2
    else:
        vals = np.real(np.einsum("gi,ij,gj->g", coh.conj(), st, coh))
    return QGrid(alpha, np.clip(vals, 0, None).reshape(alpha.shape) / math.pi)


def number_splitting_spectrum(chi, nbar, n_peaks=10):
    """Qubit-line peaks at ``n 2 chi`` with Poisson weights."""
    if nbar < 0:
        raise InvalidInput("mean photon number must be non-negative")
    out = []
    for k in range(n_peaks):
        w = 1.0 if (nbar == 0 and k == 0) else (
            0.0 if nbar == 0 else math.exp(-nbar + k * math.log(nbar) - math.lgamma(k + 1)))
        out.append((2 * chi * k, w))
    return out


def state_fidelity(a, b):
    """``|<a|b>|^2`` for normalized vectors."""
    return float(abs(np.vdot(a, b)) ** 2)
