"""Flux-bias-line design: Biot-Savart coupling of a current segment to a
rectangular loop, image-current screening between superconducting plates,
and qubit relaxation through the line's admittance.

All quantities are SI (m, A, F, H, ohm, rad/s).
"""
from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.integrate import dblquad

from .errors import (InfiniteLifetime, InvalidInput, OnWire, Divergent,
                     SingularNetwork)
from .transmon import PHI0

MU0 = 4e-7 * math.pi
SIGMA_FIT = 0.955 * math.pi ** 2 / 24
SUM_TOL = 1e-10
SUM_MIN_N = 50
SUM_FLOOR = 1e-6


@dataclass(frozen=True)
class FblGeometry:
    """Current segment of length L on the x axis and a W x H loop whose
    near edge is a distance D from the segment, optionally raised by an
    altitude A and shifted along the wire by an offset O.

    ``plate_gap_w_m`` is the spacing of the screening plates (None for no
    screening).
    """

    seg_len_L_m: float
    dist_D_m: float
    width_W_m: float
    height_H_m: float
    altitude_A_m: float = 0.0
    offset_O_m: float = 0.0
    current_I_A: float = 1e-3
    plate_gap_w_m: float = None

    def __post_init__(self):
        for name in ("seg_len_L_m", "dist_D_m", "width_W_m", "height_H_m"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if self.altitude_A_m < 0 or self.offset_O_m < 0:
            raise InvalidInput("altitude and offset must be non-negative")
        if not math.isfinite(self.current_I_A):
            raise InvalidInput("current must be finite")
        if self.plate_gap_w_m is not None and not self.plate_gap_w_m > 0:
            raise InvalidInput("plate gap must be positive")


def segment_field(g: FblGeometry, x_m, y_m):
    """Field of the finite segment at in-plane point (x, y), in tesla."""
    if abs(y_m) < 1e-12:
        raise OnWire("field point lies on the current segment")
    half = g.seg_len_L_m / 2
    a, b = half - x_m, half + x_m
    return (MU0 * g.current_I_A / (4 * math.pi * y_m)
            * (a / math.hypot(a, y_m) + b / math.hypot(b, y_m)))


def _antiderivative(u, y):
    # Even in u; integrates u / (y sqrt(u^2 + y^2)) over y, then over u.
    return u * math.asinh(u / y) - math.hypot(u, y)


def _flux_closed(L, D, W, H, current):
    u1, u2 = (L - W) / 2, (L + W) / 2
    f = _antiderivative
    total = f(u2, D) - f(u1, D) - f(u2, D + H) + f(u1, D + H)
    return MU0 * current / (2 * math.pi) * total


def flux_f(g: FblGeometry):
    """Flux (Wb) through a loop centred on the segment, closed form."""
    return _flux_closed(g.seg_len_L_m, g.dist_D_m, g.width_W_m, g.height_H_m, g.current_I_A)


def flux_quadrature(g: FblGeometry):
    """Flux by adaptive 2D quadrature of :func:`segment_field` (oracle)."""
    x0 = g.offset_O_m - g.width_W_m / 2
    x1 = g.offset_O_m + g.width_W_m / 2
    a = g.altitude_A_m
    if a == 0:
        val, _ = dblquad(lambda y, x: segment_field(g, x, y), x0, x1,
                         g.dist_D_m, g.dist_D_m + g.height_H_m, epsabs=0, epsrel=1e-10)
        return val

    def bz(y, x):
        rho = math.hypot(y, a)
        return segment_field(g, x, rho) * y / rho

    val, _ = dblquad(bz, x0, x1, g.dist_D_m, g.dist_D_m + g.height_H_m, epsabs=0, epsrel=1e-10)
    return val


def flux_g_altitude(g: FblGeometry):
    """Flux through a loop raised by altitude A above the segment's plane."""
    a = g.altitude_A_m
    d_eff = math.hypot(g.dist_D_m, a)
    h_eff = math.hypot(g.dist_D_m + g.height_H_m, a) - d_eff
    return _flux_closed(g.seg_len_L_m, d_eff, g.width_W_m, h_eff, g.current_I_A)


def flux_h_offset(g: FblGeometry):
    """Flux through a loop shifted by O along the segment direction."""
    W, O = g.width_W_m, g.offset_O_m

    def f(width):
        # Closed form is odd in the width, so negative widths are allowed.
        return _flux_closed(g.seg_len_L_m, g.dist_D_m, width, g.height_H_m, g.current_I_A)

    if W < 2 * O:
        return 0.5 * (f(W + 2 * O) + f(W - 2 * O))
    return 0.5 * (f(W + 2 * O) - f(2 * O - W))


def _image_sum(r, tol=SUM_TOL):
    # Alternating tail beyond |n| = N (both sides) is below 2 / ((N+1)^2 r^2 + 1).
    n_req = math.sqrt(max(2 / tol - 1, 0)) / r
    n_max = max(SUM_MIN_N, int(math.ceil(n_req)))
    n = np.arange(1, n_max + 1, dtype=float)
    terms = 1.0 / ((n * r) ** 2 + 1)
    # Pair consecutive terms so the summands are positive and small.
    if n_max % 2:
        terms = np.append(terms, 0.0)
    pairs = terms[1::2] - terms[0::2]
    # Half of the first omitted term (Euler correction) cancels the leading
    # truncation error of the alternating tail.
    nxt = n_max + 1
    half_tail = 0.5 * (-1) ** nxt / ((nxt * r) ** 2 + 1)
    return 1.0 + 2.0 * (math.fsum(pairs) + half_tail), n_max


def screening_G(d_m, w_m, method="sum"):
    """Attenuation of the segment's field at distance d between plates a
    gap w apart.

    ``method="sum"`` evaluates the alternating image sum with an adaptive
    cutoff; ``"fit"`` is the 1/cosh^2 fit; ``"closed"`` is the exact
    resummation ``(pi/r)/sinh(pi/r)`` with ``r = w/d``.

    The sum is accurate to ``SUM_TOL`` in absolute terms, so once G falls
    below ``SUM_FLOOR`` it carries no relative precision (it can even come
    out negative); there the exact resummation is returned instead.
    """
    if not (d_m > 0 and w_m > 0):
        raise InvalidInput("d and w must be positive")
    r = w_m / d_m
    if method == "sum":
        closed = screening_G(d_m, w_m, "closed")
        return closed if closed < SUM_FLOOR else _image_sum(r)[0]
    if method == "fit":
        return 1.0 / math.cosh(d_m / (2 * w_m * SIGMA_FIT)) ** 2
    if method == "closed":
        x = math.pi / r
        return x / math.sinh(x) if x < 700 else 2 * x * math.exp(-x)
    raise InvalidInput(f"unknown screening method {method!r}")


SCREENING_POINTS = ("centroid", "near_edge", "far_edge")


def screening_distance(g: FblGeometry, point="centroid"):
    if point == "centroid":
        return g.dist_D_m + g.height_H_m / 2
    if point == "near_edge":
        return g.dist_D_m
    if point == "far_edge":
        return g.dist_D_m + g.height_H_m
    raise InvalidInput(f"unknown screening point {point!r}")


def screening_factor(g: FblGeometry, point="centroid", method="sum"):
    if g.plate_gap_w_m is None:
        return 1.0
    return screening_G(screening_distance(g, point), g.plate_gap_w_m, method)


def screening_spread(g: FblGeometry, method="sum"):
    """Screening factor at the near edge, centroid and far edge of the loop.

    The spread is an error bar on the single-point approximation.
    """
    return {p: screening_factor(g, p, method) for p in SCREENING_POINTS}


def required_current(g: FblGeometry, target_phi0=1.0, point="centroid", method="sum"):
    """Current (A) that threads ``target_phi0`` flux quanta through the loop."""
    per_amp = flux_f(replace(g, current_I_A=1.0))
    eff = per_amp * screening_factor(g, point, method)
    if not eff > 0:
        raise InvalidInput("loop receives no flux from the segment")
    return target_phi0 * PHI0 / eff


@dataclass(frozen=True)
class FblCircuit:
    """Lumped flux-line circuit (SI units); filter elements default to zero."""

    cc_F: float
    csigma_F: float
    ls_H: float
    cg_F: float = 0.0
    cs_F: float = 0.0
    lf_H: float = 0.0
    z0_ohm: float = 50.0

    def __post_init__(self):
        vals = (self.cc_F, self.csigma_F, self.ls_H, self.cg_F, self.cs_F, self.lf_H)
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise InvalidInput("circuit elements must be finite and non-negative")
        if not self.z0_ohm > 0:
            raise InvalidInput("line impedance must be positive")


def _inv(z):
    if z == 0:
        raise SingularNetwork("zero impedance in series/parallel combination")
    out = 1 / z
    if abs(out) > 1e30:
        raise SingularNetwork("network element magnitude exceeds 1e30")
    return out


def _cap(omega, c):
    return _inv(1j * omega * c)


def _check(*vals):
    for v in vals:
        if not np.isfinite(v) or abs(v) > 1e30:
            raise SingularNetwork("network element magnitude exceeds 1e30")


def fbl_unfiltered_Y(c: FblCircuit, omega):
    """Real admittance (S) seen by the qubit: ``(common, differential)``."""
    if not omega > 0:
        raise InvalidInput("omega must be positive")
    zc = _cap(omega, c.cc_F)
    z_com = 0.5 * (c.z0_ohm + zc)
    z_dif = 2 * (_inv(1 / c.z0_ohm + _inv(1j * omega * c.ls_H / 2)) + zc)
    _check(z_com, z_dif)
    return float(np.real(_inv(z_com))), float(np.real(_inv(z_dif)))


def fbl_filtered_Y(c: FblCircuit, omega):
    """Real admittance (S) with the series-L / shunt-C filter in place."""
    if not omega > 0:
        raise InvalidInput("omega must be positive")
    w = omega
    zc = _cap(w, c.cc_F)
    z_com = 0.5 * (_inv(1 / c.z0_ohm + 1j * w * c.cg_F) + 1j * w * c.lf_H + zc)
    inner = _inv(1 / c.z0_ohm + 1j * w * (c.cg_F + 2 * c.cs_F)) + 1j * w * c.lf_H
    z_dif = 2 * _inv(_inv(inner) + _inv(1j * w * c.ls_H / 2)) + 2 * zc
    _check(z_com, z_dif, inner)
    return float(np.real(_inv(z_com))), float(np.real(_inv(z_dif)))


def t1_from_admittance(csigma_F, reY_S):
    """Relaxation time ``C_sigma / Re Y`` in seconds."""
    if reY_S < 1e-30:
        raise InfiniteLifetime(f"Re Y = {reY_S:.3g} S gives no relaxation")
    return csigma_F / reY_S


def purcell_single_mode(g, delta, kappa):
    """Single-mode Purcell decay rate ``(g/delta)^2 kappa`` (units of kappa).

    A single-mode estimate can differ substantially from a multi-mode
    transmission-line treatment far from the cavity.
    """
    if abs(delta) == 0:
        raise Divergent("Purcell rate diverges on resonance")
    return (g / delta) ** 2 * kappa


def ghz_to_omega(f_ghz):
    return 2 * math.pi * f_ghz * 1e9
