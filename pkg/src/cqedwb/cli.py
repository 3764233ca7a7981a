"""Batch command-line front end.

Every subcommand writes ``<prefix>.csv`` (header row, one record per sweep
point) and ``<prefix>.json`` (inputs, scalar outputs, warnings). Exit codes:
0 success, 1 computation error, 2 usage error.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import itertools
import json
import math
import os
import re
import sys
import warnings

import numpy as np

from . import __version__
from .errors import CqedError, InfiniteLifetime

JOBS_ENV = "CQEDWB_JOBS"


class UsageError(Exception):
    """Bad command line or config file (exit code 2)."""

    exit_code = 2


# ---------------------------------------------------------------- units

UNITS = {
    "freq": {"": 1.0, "GHz": 1.0, "MHz": 1e-3, "kHz": 1e-6, "Hz": 1e-9},
    "time": {"": 1.0, "ns": 1.0, "us": 1e3, "ms": 1e6, "s": 1e9},
    "length": {"": 1.0, "m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "current": {"": 1.0, "A": 1.0, "mA": 1e-3, "uA": 1e-6},
    "cap": {"": 1.0, "F": 1.0, "pF": 1e-12, "fF": 1e-15},
    "ind": {"": 1.0, "H": 1.0, "nH": 1e-9, "pH": 1e-12},
    "temp": {"": 1.0, "K": 1.0, "mK": 1e-3},
    "float": {"": 1.0},
}
_NUM = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")


def parse_quantity(text, kind, key="value"):
    """Number with an optional unit suffix, converted to the kind's base unit."""
    if isinstance(text, bool):
        raise UsageError(f"{key}: expected a number, got {text!r}")
    if isinstance(text, (int, float)):
        return float(text)
    m = _NUM.match(str(text))
    if not m:
        raise UsageError(f"{key}: cannot parse {text!r} as a number")
    table = UNITS[kind]
    if m.group(2) not in table:
        raise UsageError(f"{key}: unit {m.group(2)!r} not valid here (use {sorted(u for u in table if u)})")
    return float(m.group(1)) * table[m.group(2)]


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def values(self):
        if self.scale == "log":
            return list(np.geomspace(self.start, self.stop, self.points))
        return list(np.linspace(self.start, self.stop, self.points))


def parse_value(text, kind, key, sweepable):
    """Scalar or ``start:stop:points[:log]`` sweep."""
    if sweepable and isinstance(text, str) and ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise UsageError(f"{key}: sweep must be start:stop:points[:log]")
        scale = parts[3] if len(parts) == 4 else "linear"
        if scale not in ("linear", "log"):
            raise UsageError(f"{key}: sweep scale must be linear or log")
        try:
            n = int(parts[2])
        except ValueError:
            raise UsageError(f"{key}: sweep point count must be an integer") from None
        if n < 2:
            raise UsageError(f"{key}: a sweep needs at least 2 points")
        lo, hi = (parse_quantity(p, kind, key) for p in parts[:2])
        if scale == "log" and not (lo > 0 and hi > 0):
            raise UsageError(f"{key}: log sweeps need positive bounds")
        return Sweep(key, lo, hi, n, scale)
    return parse_quantity(text, kind, key)


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class Param:
    name: str
    kind: str = "float"  # unit kind, or int, bool, choice, str
    default: object = None
    help: str = ""
    sweep: bool = False
    choices: tuple = ()

    @property
    def dest(self):
        return self.name.replace("-", "_")


def _convert(p: Param, raw):
    key = p.name
    if raw is None:
        return None
    if p.kind == "bool":
        if isinstance(raw, bool):
            return raw
        if str(raw).lower() in ("true", "1", "yes"):
            return True
        if str(raw).lower() in ("false", "0", "no"):
            return False
        raise UsageError(f"{key}: expected a boolean, got {raw!r}")
    if p.kind == "int":
        try:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError
            return int(raw)
        except (TypeError, ValueError):
            raise UsageError(f"{key}: expected an integer, got {raw!r}") from None
    if p.kind == "choice":
        if raw not in p.choices:
            raise UsageError(f"{key}: {raw!r} is not one of {list(p.choices)}")
        return raw
    if p.kind == "str":
        return str(raw)
    return parse_value(raw, p.kind, key, p.sweep)


@dataclass
class RunConfig:
    command: str
    params: dict
    sweeps: list
    out_dir: str = "."
    prefix: str = ""
    jobs: int = 1
    order: str = "lex"

    def point_params(self):
        """Parameter dicts for every sweep point, first axis slowest."""
        if not self.sweeps:
            return [dict(self.params)]
        axes = [s.values() for s in self.sweeps]
        out = []
        for combo in itertools.product(*axes):
            d = dict(self.params)
            d.update({s.name: float(v) for s, v in zip(self.sweeps, combo)})
            out.append(d)
        return out

    def echo(self):
        d = {}
        for k, v in self.params.items():
            d[k] = v
        for s in self.sweeps:
            d[s.name] = {"start": s.start, "stop": s.stop, "points": s.points, "scale": s.scale}
        return d


# ---------------------------------------------------------------- CSV / JSON

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _parse_cell(s):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(path):
    """Inverse of :func:`write_csv`: returns (header, rows) with typed cells."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[_parse_cell(c) for c in row] for row in r]
    return header, rows


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    return v


def write_json(path, obj):
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n")


def schema_path():
    return os.path.join(os.path.dirname(__file__), "schema", "summary.schema.json")


# ---------------------------------------------------------------- commands

@dataclass
class Result:
    header: list
    rows: list
    outputs: dict = field(default_factory=dict)


def _pmap(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _finite_or_inf(fn, *a):
    try:
        return fn(*a)
    except InfiniteLifetime:
        warnings.warn("zero real admittance: lifetime is unbounded")
        return math.inf


# Each point function takes one parameter dict and returns a list of rows;
# they are module level so worker processes can import them.

def _pt_transmon_spectrum(p):
    from .transmon import TransmonParams, transmon_levels
    tp = TransmonParams(p["ej"] / 2 * (1 + p["asym"]), p["ej"] / 2 * (1 - p["asym"]), p["ec"],
                        ng=p["ng"], flux_phi0=p["flux"])
    e = transmon_levels(tp, p["levels"])
    return [[p["ng"], p["flux"]] + list(e - e[0]) + [e[1] - e[0], (e[2] - e[1]) - (e[1] - e[0])]]


def _cmd_transmon_spectrum(cfg):
    pts = cfg.point_params()
    rows = sum(_pmap(_pt_transmon_spectrum, pts, cfg.jobs), [])
    n = cfg.params["levels"]
    header = ["ng", "flux_phi0"] + [f"E{k}_ghz" for k in range(n)] + ["f01_ghz", "anharmonicity_ghz"]
    return Result(header, rows, {"f01_ghz": rows[0][-2], "anharmonicity_ghz": rows[0][-1]})


def _pt_flux_tune(p):
    from .transmon import TransmonParams, f01_vs_flux
    tp = TransmonParams(p["ej"] / 2 * (1 + p["asym"]), p["ej"] / 2 * (1 - p["asym"]), p["ec"])
    r = f01_vs_flux(tp, [p["flux"]])
    return [[p["flux"], float(r["f01_asymptotic"][0]), float(r["f01_exact"][0]),
             bool(r["out_of_regime"][0])]]


def _cmd_flux_tune(cfg):
    rows = sum(_pmap(_pt_flux_tune, cfg.point_params(), cfg.jobs), [])
    n_bad = sum(r[3] for r in rows)
    if n_bad:
        warnings.warn(f"{n_bad} points have EJ_eff/EC < 10; asymptotic form unreliable there")
    return Result(["flux_phi0", "f01_asymptotic_ghz", "f01_exact_ghz", "out_of_regime"], rows,
                  {"max_f01_ghz": max(r[2] for r in rows)})


def _pt_tphi(p):
    from .transmon import FluxNoiseParams, TransmonParams, tphi_flux_noise
    tp = TransmonParams.symmetric(p["ej"], p["ec"])
    return [[p["flux"], tphi_flux_noise(tp, FluxNoiseParams(p["noise"]), p["flux"])]]


def _cmd_tphi(cfg):
    rows = sum(_pmap(_pt_tphi, cfg.point_params(), cfg.jobs), [])
    return Result(["flux_phi0", "tphi_s"], rows, {"tphi_s": rows[0][1]})


def _qubit(p, f01_key="fq"):
    from .cqedspec import Qubit
    if p["levels"] == 2:
        return Qubit.two_level(p[f01_key], p["g"])
    return Qubit.anharmonic(p[f01_key], p["alpha"], p["g"], p["levels"])


def _pt_jc(p):
    from .cqedspec import SystemSpec
    from .numkit import eig_hermitian
    s = SystemSpec((_qubit(p),), p["fr"], p["photons"])
    e = eig_hermitian(s.hamiltonian(rwa=not p["no_rwa"]))[0][:p["eigs"]]
    return [[p["fq"]] + list(e)]


def _cmd_jc_spectrum(cfg):
    rows = sum(_pmap(_pt_jc, cfg.point_params(), cfg.jobs), [])
    header = ["fq_ghz"] + [f"E{k}_ghz" for k in range(cfg.params["eigs"])]
    return Result(header, rows, {"ground_energy_ghz": rows[0][1]})


def _pt_chi(p):
    from .cqedspec import Qubit, SystemSpec, chi_dispersive, chi_exact
    q = Qubit.anharmonic(p["fq"], -p["ec"], p["g"], p["levels"])
    s = SystemSpec((q,), p["fr"], p["photons"])
    delta = p["fq"] - p["fr"]
    return [[p["fq"], delta, chi_dispersive(p["g"], delta, p["ec"]), chi_exact(s)]]


def _cmd_chi(cfg):
    rows = sum(_pmap(_pt_chi, cfg.point_params(), cfg.jobs), [])
    return Result(["fq_ghz", "delta_ghz", "chi_perturbative_ghz", "chi_exact_ghz"], rows,
                  {"chi_perturbative_ghz": rows[0][2], "chi_exact_ghz": rows[0][3]})


def _pt_zz(p):
    from .cqedspec import Qubit, SystemSpec, zeta, zz_xi
    q1 = Qubit.anharmonic(p["f1"], p["alpha1"], p["g1"], p["levels"])
    q2 = Qubit.anharmonic(p["f2"], p["alpha2"], p["g2"], p["levels"])
    s = SystemSpec((q1, q2), p["fr"], p["photons"])
    d1, d2 = p["f1"] - p["fr"], p["f2"] - p["fr"]
    xi = zz_xi(p["g1"], p["g2"], d1, d2, p["f1"] - (p["f2"] + p["alpha2"]),
               p["f2"] - (p["f1"] + p["alpha1"]))
    return [[p["f2"], zeta(s), xi]]


def _cmd_zz(cfg):
    rows = sum(_pmap(_pt_zz, cfg.point_params(), cfg.jobs), [])
    return Result(["f2_ghz", "zeta_exact_ghz", "xi_perturbative_ghz"], rows,
                  {"zeta_exact_ghz": rows[0][1], "xi_perturbative_ghz": rows[0][2]})


def _pt_crossing(p):
    from .cqedspec import CrossingModel, crossing_conditional_phase, crossing_phase_numeric
    m = CrossingModel(p["g"], p["delta"])
    return [[p["delta"], m.t_rp, crossing_conditional_phase(m), crossing_phase_numeric(m)]]


def _cmd_crossing(cfg):
    rows = sum(_pmap(_pt_crossing, cfg.point_params(), cfg.jobs), [])
    return Result(["delta_ghz", "t_rp_ns", "phase_formula_rad", "phase_numeric_rad"], rows,
                  {"max_phase_mismatch_rad": max(abs(r[2] - r[3]) for r in rows)})


def _pt_flux_coupling(p):
    from .fluxdesign import (FblGeometry, flux_f, flux_g_altitude, flux_h_offset,
                             required_current, screening_spread)
    from .transmon import PHI0
    g = FblGeometry(p["L"], p["D"], p["W"], p["H"], p["A"], p["O"], p["I"],
                    p["w"] if p["w"] else None)
    if p["O"]:
        phi = flux_h_offset(g)
    elif p["A"]:
        phi = flux_g_altitude(g)
    else:
        phi = flux_f(g)
    spread = screening_spread(g)
    row = [p["L"], p["D"], phi, phi / PHI0]
    row += [spread[k] for k in ("near_edge", "centroid", "far_edge")]
    row.append(required_current(g, point=p["point"]) if not (p["A"] or p["O"]) else math.nan)
    return [row]


def _cmd_flux_coupling(cfg):
    rows = sum(_pmap(_pt_flux_coupling, cfg.point_params(), cfg.jobs), [])
    header = ["L_m", "D_m", "flux_Wb", "flux_phi0", "G_near_edge", "G_centroid", "G_far_edge",
              "current_per_phi0_A"]
    return Result(header, rows, {"flux_phi0": rows[0][3], "current_per_phi0_A": rows[0][7]})


def _pt_screening(p):
    from .fluxdesign import screening_G
    r = p["ratio"]
    exact = screening_G(r, 1.0, "sum")
    fit = screening_G(r, 1.0, "fit")
    return [[r, exact, fit, screening_G(r, 1.0, "closed"), (fit - exact) / exact]]


def _cmd_screening(cfg):
    rows = sum(_pmap(_pt_screening, cfg.point_params(), cfg.jobs), [])
    return Result(["d_over_w", "G_sum", "G_fit", "G_closed", "fit_rel_error"], rows,
                  {"max_abs_fit_rel_error": max(abs(r[4]) for r in rows)})


def _pt_fbl(p):
    from .fluxdesign import (FblCircuit, fbl_filtered_Y, fbl_unfiltered_Y, ghz_to_omega,
                             t1_from_admittance)
    c = FblCircuit(p["cc"], p["csigma"], p["ls"], p["cg"], p["cs"], p["lf"], p["z0"])
    fn = fbl_filtered_Y if p["filtered"] else fbl_unfiltered_Y
    y_com, y_dif = fn(c, ghz_to_omega(p["freq"]))
    return [[p["freq"], y_com, y_dif, _finite_or_inf(t1_from_admittance, p["csigma"], y_com),
             _finite_or_inf(t1_from_admittance, p["csigma"], y_dif)]]


def _cmd_fbl_t1(cfg):
    rows = sum(_pmap(_pt_fbl, cfg.point_params(), cfg.jobs), [])
    return Result(["freq_ghz", "reY_common_S", "reY_differential_S", "t1_common_s",
                   "t1_differential_s"], rows,
                  {"t1_common_s": rows[0][3], "t1_differential_s": rows[0][4]})


def _cmd_allxy(cfg):
    from .pulsectl import PulseErrorModel, allxy_simulate, allxy_syndrome_fit
    p = cfg.params
    e = PulseErrorModel(p["power_db"], p["detuning"], p["skew"], p["imbalance"])
    r = allxy_simulate(e)
    rows = [[lab, ideal, z] for lab, ideal, z in zip(r.labels, r.ideal, r.z)]
    fit = allxy_syndrome_fit(r)
    out = {f"syndrome_{k}": v for k, v in fit.coefficients.items()}
    out["syndrome_residual"] = fit.residual
    return Result(["sequence", "ideal_z", "z"], rows, out)


def _tomo_state(name, n, rng):
    from .numkit import basis_state, dm, random_density_matrix
    d = 2 ** n
    if name == "ground":
        return dm(basis_state("0" * n))
    if name == "ghz":
        return dm((basis_state("0" * n) + basis_state("1" * n)) / math.sqrt(2))
    if name == "bell23":
        if n != 3:
            raise UsageError("state bell23 needs 3 qubits")
        from .numkit import kron
        bell = (basis_state("00") + basis_state("11")) / math.sqrt(2)
        return dm(kron(basis_state("0").reshape(-1, 1), bell.reshape(-1, 1)).ravel())
    return random_density_matrix(d, rng)


def _pauli_rows(values, n, order):
    from .numkit import pauli_labels
    from .tomo import pauli_display_order
    lookup = dict(zip(pauli_labels(n, include_identity=True), [1.0] + list(values)))
    return [[lab, lookup[lab]] for lab in pauli_display_order(n, order)]


def _cmd_tomo_reconstruct(cfg):
    from .numkit import purity_entropy
    from .tomo import (MeasurementModel, order_voltages, read_voltage_csv, reconstruct_state,
                       simulate_voltages)
    p = cfg.params
    n = p["qubits"]
    rng = np.random.default_rng(p["seed"])
    if p["beta"]:
        beta = [parse_quantity(x, "float", "beta") for x in p["beta"].split(",")]
    else:
        beta = list(rng.normal(size=2 ** n))
    m = MeasurementModel(n, tuple(beta))
    if p["input"]:
        labels, volts = read_voltage_csv(p["input"])
        volts = order_voltages(labels, volts, n)
    else:
        rho = _tomo_state(p["state"], n, rng)
        volts = simulate_voltages(rho, m, noise_sigma=p["noise"], rng=rng)
    est = reconstruct_state(volts, m)
    purity, entropy = purity_entropy(est.rho)
    return Result(["pauli", "expectation"], _pauli_rows(est.paulis, n, cfg.order),
                  {"min_eigenvalue": est.min_eigenvalue, "condition": est.condition,
                   "purity": purity})


def _gate_unitary(name, n):
    from .numkit import kron, I2
    from .pulsectl import PI, Rotation, rotation_unitary
    from .qec import toffoli_matrix
    single = {
        "identity": I2,
        "x": rotation_unitary(Rotation.x(PI)),
        "x90": rotation_unitary(Rotation.x(PI / 2)),
        "hadamard": rotation_unitary(Rotation((1, 0, 1), PI)),
    }
    if name in single:
        return kron(*([single[name]] * n))
    if name == "cphase" and n == 2:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "cnot" and n == 2:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if name == "toffoli" and n == 3:
        return toffoli_matrix()
    raise UsageError(f"gate {name!r} is not available on {n} qubits")


def _cmd_process_tomo(cfg):
    from .numkit import KrausChannel, make_channel, embed, pauli_labels
    from .tomo import chi_of_unitary, process_fidelity, process_tomography, standard_preps
    p = cfg.params
    n = p["qubits"]
    u = _gate_unitary(p["gate"], n)
    preps = standard_preps(n)
    outs = []
    ch = make_channel("depolarizing", p["depolarize"])
    for r in preps:
        o = u @ r @ u.conj().T
        for q in range(n):
            ops = [embed(k, q, n) for k in ch.operators]
            o = KrausChannel(tuple(ops)).apply(o)
        outs.append(o)
    chi = process_tomography(preps, outs)
    ideal = chi_of_unitary(u)
    labels = pauli_labels(n, include_identity=True)
    from .tomo import pauli_display_order
    order = pauli_display_order(n, cfg.order)
    idx = {lab: i for i, lab in enumerate(labels)}
    rows = [[a, b, chi[idx[a], idx[b]].real, chi[idx[a], idx[b]].imag]
            for a in order for b in order]
    return Result(["row", "col", "chi_re", "chi_im"], rows,
                  {"fidelity": process_fidelity(chi, ideal), "trace": float(np.trace(chi).real)})


def _cmd_qec_sweep(cfg):
    from .qec import qec_fidelity_sweep
    p = cfg.params
    grid = np.linspace(0, p["pmax"], p["points"])
    s = qec_fidelity_sweep(p["kind"], grid, p["model"])
    rows = [[a, b] for a, b in zip(s.p, s.fidelity)]
    return Result(["p", "fidelity"], rows, {f"c{k}": c for k, c in enumerate(s.coefficients)})


def _pt_witness(p):
    from .qec import ghz_phi_state, witnesses
    w = witnesses(ghz_phi_state(p["phi"]))
    return [[p["phi"], w.M_S1, w.M_S2, w.M_P1, w.M_P2, w.CHSH, w.ghz_fidelity]]


def _cmd_witnesses(cfg):
    rows = sum(_pmap(_pt_witness, cfg.point_params(), cfg.jobs), [])
    worst = min(max(abs(r[1]), abs(r[2])) for r in rows)
    return Result(["phi_rad", "M_S1", "M_S2", "M_P1", "M_P2", "CHSH", "ghz_fidelity"], rows,
                  {"min_max_mermin_sum": worst})


def _cmd_kerr_q(cfg):
    from .cavity import coherent_state, kerr_evolve, q_function
    p = cfg.params
    if p["kerr"] == 0:
        raise UsageError("kerr must be non-zero")
    t = p["time"] if p["time"] is not None else p["fraction"] / p["kerr"]
    psi = kerr_evolve(coherent_state(p["beta"], p["nmax"]), p["kerr"], t, p["frame"])
    g = q_function(psi, p["extent"], p["points"])
    rows = [[a.real, a.imag, v] for a, v in zip(g.alpha.ravel(), g.values.ravel())]
    return Result(["alpha_re", "alpha_im", "Q"], rows,
                  {"time_ns": t, "norm": g.norm, "peak": float(g.values.max()),
                   "centroid_angle_rad": float(np.angle(g.centroid()))})


def _pt_readout(p):
    from .readout import ReadoutParams, distinguishability, measurement_snr
    rp = ReadoutParams(p["eps"], p["delta_rf"], p["chi"], p["kappa_in"], p["kappa_out"],
                       p["t1"] * 1e-9, p["nbar"], p["tn"], p["fr"])
    return [[p["tn"], measurement_snr(rp, angular=not p["linear"]), distinguishability(rp)]]


def _cmd_readout_snr(cfg):
    rows = sum(_pmap(_pt_readout, cfg.point_params(), cfg.jobs), [])
    return Result(["tn_K", "snr", "pointer_overlap"], rows, {"snr": rows[0][1]})


def _pt_bright(p):
    from .readout import BrightStateParams, bright_state_solve
    b = BrightStateParams(p["g"], p["delta"], p["kappa"], p["fr"], p["sigma_z"])
    roots = bright_state_solve(b, p["xi"], p["fd"], a2_max=p["a2_max"])
    vals = [r.a2 for r in roots] + [math.nan] * (3 - len(roots))
    unstable = [r.a2 for r in roots if not r.stable]
    return [[p["xi"], len(roots)] + vals[:3] + [unstable[0] if unstable else math.nan]]


def _cmd_bright_state(cfg):
    rows = sum(_pmap(_pt_bright, cfg.point_params(), cfg.jobs), [])
    return Result(["xi", "n_roots", "a2_0", "a2_1", "a2_2", "a2_unstable"], rows,
                  {"max_roots": max(r[1] for r in rows)})


# name -> (handler, params, help)
_F = "freq"
COMMANDS = {
    "transmon-spectrum": (_cmd_transmon_spectrum, [
        Param("ej", _F, 30.0, "total Josephson energy", True),
        Param("ec", _F, 0.35, "charging energy", True),
        Param("asym", "float", 0.0, "junction asymmetry d"),
        Param("ng", "float", 0.0, "offset charge", True),
        Param("flux", "float", 0.0, "flux in flux quanta", True),
        Param("levels", "int", 4, "number of levels reported (>= 3)"),
    ], "charge-basis transmon levels"),
    "flux-tune": (_cmd_flux_tune, [
        Param("ej", _F, 30.0, "maximum total Josephson energy"),
        Param("ec", _F, 0.35, "charging energy"),
        Param("asym", "float", 0.0, "junction asymmetry d"),
        Param("flux", "float", "0:0.5:51", "flux in flux quanta", True),
    ], "f01 against flux, asymptotic and exact"),
    "tphi": (_cmd_tphi, [
        Param("ej", _F, 30.0, "maximum total Josephson energy"),
        Param("ec", _F, 0.35, "charging energy"),
        Param("noise", "float", 1e-5, "1/f flux-noise amplitude (flux quanta)"),
        Param("flux", "float", 0.25, "bias flux in flux quanta", True),
    ], "flux-noise dephasing time"),
    "jc-spectrum": (_cmd_jc_spectrum, [
        Param("fr", _F, 8.0, "cavity frequency"),
        Param("fq", _F, 6.0, "qubit frequency", True),
        Param("g", _F, 0.1, "coupling"),
        Param("alpha", _F, -0.3, "anharmonicity (levels > 2)"),
        Param("levels", "int", 2, "qubit levels"),
        Param("photons", "int", 6, "cavity Fock states"),
        Param("eigs", "int", 6, "eigenvalues reported"),
        Param("no-rwa", "bool", False, "keep counter-rotating terms"),
    ], "Jaynes-Cummings eigenvalues"),
    "chi": (_cmd_chi, [
        Param("fr", _F, 5.257, "cavity frequency"),
        Param("fq", _F, 6.257, "qubit frequency", True),
        Param("g", _F, 0.05, "coupling"),
        Param("ec", _F, 0.3, "charging energy (anharmonicity -EC)"),
        Param("levels", "int", 4, "qubit levels"),
        Param("photons", "int", 6, "cavity Fock states"),
    ], "dispersive shift, perturbative and exact"),
    "zz": (_cmd_zz, [
        Param("fr", _F, 8.0, "cavity frequency"),
        Param("f1", _F, 5.5, "qubit 1 frequency"),
        Param("f2", _F, 5.35, "qubit 2 frequency", True),
        Param("alpha1", _F, -0.3, "qubit 1 anharmonicity"),
        Param("alpha2", _F, -0.3, "qubit 2 anharmonicity"),
        Param("g1", _F, 0.05, "qubit 1 coupling"),
        Param("g2", _F, 0.05, "qubit 2 coupling"),
        Param("levels", "int", 3, "levels per qubit"),
        Param("photons", "int", 4, "cavity Fock states"),
    ], "qubit-qubit ZZ coupling"),
    "crossing": (_cmd_crossing, [
        Param("g", _F, 0.05, "avoided-crossing coupling"),
        Param("delta", _F, 0.1, "detuning", True),
    ], "sudden conditional phase of the crossing toy model"),
    "flux-coupling": (_cmd_flux_coupling, [
        Param("L", "length", 500e-6, "segment length", True),
        Param("D", "length", 400e-6, "loop distance", True),
        Param("W", "length", 100e-6, "loop width"),
        Param("H", "length", 100e-6, "loop height"),
        Param("A", "length", 0.0, "loop altitude"),
        Param("O", "length", 0.0, "loop offset along the segment"),
        Param("I", "current", 1e-3, "current"),
        Param("w", "length", 0.0, "screening plate gap (0 for none)"),
        Param("point", "choice", "centroid", "screening evaluation point",
              choices=("centroid", "near_edge", "far_edge")),
    ], "Biot-Savart flux from a bias-line segment"),
    "screening": (_cmd_screening, [
        Param("ratio", "float", "0.1:10:41:log", "d/w", True),
    ], "image-current screening factor"),
    "fbl-t1": (_cmd_fbl_t1, [
        Param("filtered", "bool", False, "include the L/C filter"),
        Param("cc", "cap", 0.25e-15, "line-qubit coupling capacitance"),
        Param("csigma", "cap", 40e-15, "qubit total capacitance"),
        Param("ls", "ind", 0.5e-9, "short inductance"),
        Param("cg", "cap", 0.0, "filter shunt capacitance"),
        Param("cs", "cap", 0.0, "filter differential capacitance"),
        Param("lf", "ind", 0.0, "filter series inductance"),
        Param("z0", "float", 50.0, "line impedance (ohm)"),
        Param("freq", _F, 9.0, "qubit frequency", True),
    ], "qubit T1 through the flux-bias line"),
    "allxy": (_cmd_allxy, [
        Param("power-db", "float", 0.0, "amplitude error (dB)"),
        Param("detuning", "float", 0.0, "detuning-time product epsilon"),
        Param("skew", "float", 0.0, "x/y axis skew (rad)"),
        Param("imbalance", "float", 0.0, "fractional x/y amplitude imbalance"),
    ], "AllXY pulse-error diagnostic"),
    "tomo-reconstruct": (_cmd_tomo_reconstruct, [
        Param("qubits", "int", 3, "number of qubits (1-3)"),
        Param("state", "choice", "ghz", "simulated state", choices=("ground", "ghz", "bell23", "random")),
        Param("input", "str", "", "CSV of label,voltage rows (overrides --state)"),
        Param("beta", "str", "", "comma-separated beta coefficients (default random)"),
        Param("noise", "float", 0.0, "voltage noise sigma"),
        Param("seed", "int", 0, "random seed"),
    ], "joint-readout state tomography"),
    "process-tomo": (_cmd_process_tomo, [
        Param("qubits", "int", 2, "number of qubits (1-3)"),
        Param("gate", "choice", "cphase", "ideal gate",
              choices=("identity", "x", "x90", "hadamard", "cphase", "cnot", "toffoli")),
        Param("depolarize", "float", 0.0, "per-qubit depolarizing probability"),
    ], "chi-matrix process tomography"),
    "qec-sweep": (_cmd_qec_sweep, [
        Param("kind", "choice", "phase", "code", choices=("bit", "phase")),
        Param("model", "choice", "coherent", "error model", choices=("coherent", "kraus")),
        Param("pmax", "float", 1.0, "largest error probability"),
        Param("points", "int", 41, "grid points"),
    ], "repetition-code fidelity polynomial"),
    "witnesses": (_cmd_witnesses, [
        Param("phi", "float", "0:6.283185307179586:73", "GHZ family angle (rad)", True),
    ], "entanglement witnesses over the GHZ family"),
    "kerr-q": (_cmd_kerr_q, [
        Param("beta", "float", 1.5, "coherent amplitude (real)"),
        Param("kerr", _F, 0.001, "Kerr constant K"),
        Param("time", "time", None, "evolution time"),
        Param("fraction", "float", 0.5, "time as a fraction of 1/K when --time is absent"),
        Param("frame", "choice", "n2", "Kerr frame", choices=("n2", "normal_ordered")),
        Param("nmax", "int", 40, "Fock truncation"),
        Param("extent", "float", 6.0, "grid half-width"),
        Param("points", "int", 121, "grid points per axis"),
    ], "Husimi Q function after Kerr evolution"),
    "readout-snr": (_cmd_readout_snr, [
        Param("eps", "float", 0.0, "drive rate"),
        Param("delta-rf", _F, 0.0, "drive detuning"),
        Param("chi", _F, 0.01, "dispersive shift"),
        Param("kappa-in", _F, 0.0025, "input coupling rate"),
        Param("kappa-out", _F, 0.0025, "output coupling rate"),
        Param("t1", "time", 3000.0, "integration window (qubit T1)"),
        Param("nbar", "float", 10.0, "mean photon number"),
        Param("tn", "temp", 10.0, "amplifier noise temperature", True),
        Param("fr", _F, 8.0, "cavity frequency"),
        Param("linear", "bool", False, "use linear rather than angular frequencies"),
    ], "dispersive measurement SNR"),
    "bright-state": (_cmd_bright_state, [
        Param("g", _F, 0.1, "coupling"),
        Param("delta", _F, 1.0, "qubit-cavity detuning"),
        Param("kappa", _F, 0.0005, "cavity linewidth"),
        Param("fr", _F, 7.0, "cavity frequency"),
        Param("fd", _F, 6.999, "drive frequency"),
        Param("sigma-z", "int", 1, "qubit state (+1 or -1)"),
        Param("xi", "float", "0.01:0.1:10", "drive amplitude", True),
        Param("a2-max", "float", 1e8, "largest photon number searched"),
    ], "semiclassical bright-state photon number"),
}


# ---------------------------------------------------------------- parsing

class _Once(argparse.Action):
    """Store a flag, rejecting a second occurrence with a different value."""

    def __call__(self, parser, ns, values, option_string=None):
        seen = ns.__dict__.setdefault("_seen", {})
        if self.dest in seen and seen[self.dest] != values:
            raise UsageError(f"{option_string}: given twice with different values")
        seen[self.dest] = values
        setattr(ns, self.dest, values)


class _OnceTrue(_Once):
    def __init__(self, *a, **kw):
        kw["nargs"] = 0
        super().__init__(*a, **kw)

    def __call__(self, parser, ns, values, option_string=None):
        super().__call__(parser, ns, True, option_string)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    ap = _Parser(prog="cqedwb", description="Circuit-QED workbench calculators.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    for name, (_, params, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        for p in params:
            flag = "--" + p.name
            hint = f"{p.help} (default {p.default})"
            if p.kind == "bool":
                sp.add_argument(flag, dest=p.dest, action=_OnceTrue, default=None, help=p.help)
            else:
                sp.add_argument(flag, dest=p.dest, action=_Once, default=None, help=hint)
        sp.add_argument("--config", action=_Once, default=None, help="JSON file of flag values")
        sp.add_argument("--out", dest="out_dir", action=_Once, default=None, help="output directory")
        sp.add_argument("--prefix", action=_Once, default=None, help="output file stem")
        sp.add_argument("--jobs", action=_Once, default=None,
                        help=f"worker processes for sweeps (default ${JOBS_ENV} or 1)")
        sp.add_argument("--order", action=_Once, default=None,
                        help="Pauli display order: lex or thesis")
    return ap


_GENERAL = ("out", "prefix", "jobs", "order")


def _load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: invalid JSON in {path}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError("config: top level must be a JSON object")
    return {k.lstrip("-"): v for k, v in data.items()}


def parse_config(argv, environ=None):
    """Parse argv (and an optional ``--config`` file) into a :class:`RunConfig`.

    Flags override config-file values, which override defaults.
    """
    environ = os.environ if environ is None else environ
    ns = build_parser().parse_args(argv)
    if not ns.command:
        raise UsageError("a subcommand is required")
    _, params, _ = COMMANDS[ns.command]
    by_name = {p.name: p for p in params}
    file_vals = _load_config(ns.config) if ns.config else {}
    for key in file_vals:
        if key not in by_name and key not in _GENERAL:
            raise UsageError(f"config: unknown key {key!r} for {ns.command}")

    values, sweeps = {}, []
    for p in params:
        raw = getattr(ns, p.dest)
        if raw is None:
            raw = file_vals.get(p.name, p.default)
        v = _convert(p, raw)
        if isinstance(v, Sweep):
            sweeps.append(Sweep(p.dest, v.start, v.stop, v.points, v.scale))
        else:
            values[p.dest] = v

    def general(key, attr, default):
        v = getattr(ns, attr)
        return file_vals.get(key, default) if v is None else v

    jobs_raw = general("jobs", "jobs", environ.get(JOBS_ENV, "1"))
    try:
        jobs = int(jobs_raw)
    except (TypeError, ValueError):
        raise UsageError(f"jobs: expected an integer, got {jobs_raw!r}") from None
    if jobs < 1:
        raise UsageError("jobs: must be at least 1")
    order = general("order", "order", "lex")
    if order not in ("lex", "thesis"):
        raise UsageError(f"order: {order!r} is not lex or thesis")
    return RunConfig(ns.command, values, sweeps, general("out", "out_dir", "."),
                     general("prefix", "prefix", "") or ns.command, jobs, order)


def run(cfg: RunConfig):
    """Execute a parsed config, writing CSV and JSON; returns the exit code."""
    handler = COMMANDS[cfg.command][0]
    os.makedirs(cfg.out_dir, exist_ok=True)
    csv_path = os.path.join(cfg.out_dir, cfg.prefix + ".csv")
    json_path = os.path.join(cfg.out_dir, cfg.prefix + ".json")
    summary = {"command": cfg.command, "version": __version__, "inputs": cfg.echo(),
               "outputs": {}, "warnings": [], "csv": None, "status": "ok"}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            res = handler(cfg)
        except CqedError as exc:
            summary["status"] = "error"
            summary["error"] = {"name": exc.name, "message": str(exc)}
            res = None
    summary["warnings"] = sorted({str(w.message) for w in caught})
    code = 0
    if res is None:
        code = 1
    else:
        write_csv(csv_path, res.header, res.rows)
        summary["csv"] = os.path.basename(csv_path)
        summary["outputs"] = res.outputs
        summary["rows"] = len(res.rows)
    write_json(json_path, summary)
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"cqedwb: usage error: {exc}", file=sys.stderr)
        return UsageError.exit_code
    code = run(cfg)
    if code:
        with open(os.path.join(cfg.out_dir, cfg.prefix + ".json")) as fh:
            err = json.load(fh)["error"]
        print(f"cqedwb: {err['name']}: {err['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
