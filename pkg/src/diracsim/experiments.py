"""Experiment pipelines: dispatch, deterministic outputs, manifests.

Every run writes its artifacts plus a manifest.json listing each file
with a sha256 content hash and the summary scalars.  Reruns of the same
config produce bit-identical bytes: nothing time- or path-dependent is
ever written.
"""

import hashlib
import json
import os

import numpy as np

from . import bag as bagmod
from . import dirac, ions, klein, landau, wigner
from .config import ExperimentConfig
from .dumps import dump_field, read_grid_dump, write_grid_dump
from .grids import gaussian_spinor_field, make_grid
from .splitting import EvolutionMonitor

__all__ = ["run_experiment", "emit_plot_data", "Manifest"]


class Manifest:
    def __init__(self, kind, out_dir, files, summary, config_params):
        self.kind = kind
        self.out_dir = out_dir
        self.files = files  # [(relpath, sha256), ...]
        self.summary = summary
        self.config_params = config_params
        self.path = os.path.join(out_dir, "manifest.json")

    def to_json(self):
        payload = {
            "experiment": self.kind,
            "config": self.config_params,
            "files": [{"path": p, "sha256": h} for p, h in self.files],
            "summary": self.summary,
        }
        return json.dumps(payload, sort_keys=True, indent=1)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def _monitor_summary(monitor):
    return {
        "norm_drift": monitor.norm_drift(),
        "max_boundary_leak": monitor.max_leak,
    }


def run_experiment(cfg, out_dir):
    """Run a validated config, write artifacts, return the manifest."""
    if not isinstance(cfg, ExperimentConfig):
        raise TypeError("run_experiment takes a parsed ExperimentConfig")
    os.makedirs(out_dir, exist_ok=True)
    runner = _RUNNERS[cfg.kind]
    files, summary = runner(cfg, out_dir)
    entries = [(name, _sha256(os.path.join(out_dir, name))) for name in sorted(files)]
    manifest = Manifest(cfg.kind, out_dir, entries, summary, cfg.params)
    with open(manifest.path, "w") as fh:
        fh.write(manifest.to_json())
    return manifest


# ---------------------------------------------------------------------------


def _run_zitterbewegung(cfg, out):
    p = cfg.params
    params = dirac.SimParams(p["c"], p["m"], dirac.MASS_AXIS_Y)
    grid = make_grid(p["n_points"], p["x_min"], p["x_max"])
    psi0 = gaussian_spinor_field(grid, p["x0"], p["sigma_x"], p["p0"], (1.0, 0.0))
    times = np.linspace(0.0, p["t_final"], p["n_samples"])
    trace, norms = dirac.mean_position_trace(psi0, params, times)
    summary = {
        "zb_frequency_formula": dirac.zb_frequency_estimate(p["p0"], params),
    }
    if p["m"] > 0:
        summary["zb_amplitude_formula"] = dirac.zb_amplitude_estimate(p["p0"], params)
    omega, amp = dirac.measure_zb_from_trace(trace, times)
    summary["zb_frequency_measured"] = omega
    summary["zb_amplitude_measured"] = amp
    summary["norm_drift"] = float(np.max(np.abs(norms - norms[0])))
    _write_csv(
        os.path.join(out, "trace.csv"),
        ["t", "mean_x", "norm"],
        zip(times.tolist(), trace.tolist(), norms.tolist()),
    )
    return ["trace.csv"], summary


def _run_klein1d(cfg, out):
    p = cfg.params
    kp = klein.KleinParams(dirac.SimParams(p["c"], p["m"]), p["alpha"])
    grid = make_grid(p["n_points"], p["x_min"], p["x_max"])
    psi0 = klein.klein_packet(grid, kp, p["x0"], p["sigma_x"], p["p0"])
    monitor = EvolutionMonitor()
    files = []
    if p.get("snapshots"):
        fields = klein.evolve_klein_1p1_series(
            psi0, kp, p["dt"], p["snapshots"], monitor=monitor
        )
        for t, f in zip(p["snapshots"], fields):
            name = f"density_t{t:g}.dump"
            write_grid_dump(
                os.path.join(out, name), f.density(), [(grid.x_min, grid.x_max)]
            )
            files.append(name)
        final = fields[-1] if p["snapshots"][-1] == p["t_final"] else None
    else:
        final = None
    if final is None:
        final = klein.evolve_klein_1p1(psi0, kp, p["dt"], p["t_final"], monitor=monitor)
    split = klein.transmission_split_point(psi0, kp, p["sigma_x"])
    t_meas = klein.measure_transmission(final, split)
    em = klein.effective_mass(0.0, kp.base)
    summary = {
        "T_measured": t_meas,
        "T_formula": klein.transmission_formula(em, kp),
        "x_split": split,
        "energy_drift": monitor.energy_drift(),
        **_monitor_summary(monitor),
    }
    name = "final_field.dump"
    dump_field(final, os.path.join(out, name))
    files.append(name)
    return files, summary


def _run_klein2d(cfg, out):
    p = cfg.params
    kp = klein.KleinParams(dirac.SimParams(p["c"], p["m"]), p["alpha"])
    grid = make_grid(p["n_points"], p["x_min"], p["x_max"])
    if p["n_slices"] > 1:
        py = np.linspace(p["py_min"], p["py_max"], p["n_slices"])
    else:
        py = np.array([0.5 * (p["py_min"] + p["py_max"])])
    slices0 = klein.make_klein_slices(
        grid, kp, py, p["x0"], p["sigma_x"], p["p0"], weights=p["sigma_py"]
    )
    per_slice = p["slice_normalization"] == "per_slice"
    files = []
    times = list(p["t_snapshots"])
    current, t_now = slices0, 0.0
    final = slices0
    for t in times:
        current = klein.evolve_klein_2p1_decomposed(current, kp, p["dt"], t - t_now)
        t_now = t
        name = f"slices_t{t:g}.dump"
        write_grid_dump(
            os.path.join(out, name),
            current.slice_densities(normalize_slices=per_slice),
            [(py[0], py[-1]), (grid.x_min, grid.x_max)],
        )
        files.append(name)
        if p["emit_xy"]:
            f2d = klein.reconstruct_position_space(current)
            name = f"xy_t{t:g}.dump"
            write_grid_dump(
                os.path.join(out, name),
                f2d.density(),
                [(grid.x_min, grid.x_max), (f2d.ygrid.x_min, f2d.ygrid.x_max)],
            )
            files.append(name)
        final = current

    py_arr, t_meas, t_form = klein.measure_slice_transmissions(
        slices0, final, kp, p["sigma_x"]
    )
    _write_csv(
        os.path.join(out, "transmission_sweep.csv"),
        ["p_y", "T_measured", "T_formula"],
        zip(py_arr.tolist(), t_meas.tolist(), t_form.tolist()),
    )
    files.append("transmission_sweep.csv")

    # transverse-momentum distributions conditioned on the outcome
    weights = slices0.slice_norms() ** 2
    trans = weights * t_meas
    refl = weights * (1.0 - t_meas)
    for arr in (trans, refl):
        s = arr.sum()
        if s > 0:
            arr /= s
    _write_csv(
        os.path.join(out, "py_conditional.csv"),
        ["p_y", "p_transmitted", "p_reflected"],
        zip(py_arr.tolist(), trans.tolist(), refl.tolist()),
    )
    files.append("py_conditional.csv")

    summary = {
        "global_norm_final": final.global_norm(),
        "T_center_slice": float(t_meas[np.argmin(np.abs(py_arr))]),
    }
    return files, summary


def _run_landau(cfg, out):
    p = cfg.params
    params = landau.JCParams(p["c"], p["m"], p["n_max"])
    windows = (p["half_width"],) if p["half_width"] else (2.5, 3.6, 5.0)
    files = []
    summary = {}
    report_lines = []
    for n in p["levels"]:
        n = int(n)
        rep, ps, w, hw = wigner.level_winding(
            params, n, p["sign"], p["n_phase"], windows
        )
        summary[f"coverings_level_{n}"] = rep.coverings
        summary[f"signed_level_{n}"] = rep.signed
        report_lines.append(_winding_line(f"level={n} window={hw:g}", rep))

        name = f"wigner_level{n}.dump"
        write_grid_dump(
            os.path.join(out, name),
            w.values.reshape(w.values.shape[:2] + (4,)),
            [(w.x[0], w.x[-1]), (w.p[0], w.p[-1])],
        )
        files.append(name)
        name = f"pseudospin_level{n}.dump"
        write_grid_dump(
            os.path.join(out, name),
            np.stack([ps.azimuth, ps.zcomp, ps.magnitude], axis=-1),
            [(ps.x[0], ps.x[-1]), (ps.p[0], ps.p[-1])],
        )
        files.append(name)

        for gt in p["gamma_t"]:
            rep_d = wigner.winding_number(wigner.dephasing_map(ps, float(gt)))
            summary[f"coverings_level_{n}_dephased_{gt:g}"] = rep_d.coverings
            report_lines.append(_winding_line(f"level={n} gamma_t={gt:g}", rep_d))
        if p.get("p_damp") is not None and n >= 1:
            grid, _ = wigner.phase_space_window(p["n_phase"], hw)
            state = landau.SpinOscillatorState.pure(
                landau.landau_eigenstate_fock(n, p["sign"], params), params
            )
            damped = landau.amplitude_damping(state, p["p_damp"])
            wd = wigner.wigner_from_density(damped, grid).crop_centered(p["n_phase"])
            rep_a = wigner.winding_number(wigner.pseudospin_field(wd))
            summary[f"coverings_level_{n}_damped"] = rep_a.coverings
            report_lines.append(_winding_line(f"level={n} p_damp={p['p_damp']:g}", rep_a))

    with open(os.path.join(out, "winding_report.txt"), "w") as fh:
        fh.write("\n".join(report_lines) + "\n")
    files.append("winding_report.txt")
    return files, summary


def _winding_line(label, rep):
    return (
        f"{label} signed={rep.signed!r} coverings={rep.coverings!r} "
        f"excluded_solid_angle={rep.excluded_solid_angle!r} quality={rep.quality!r}"
    )


def _run_bag(cfg, out):
    p = cfg.params
    base = dirac.SimParams(p["c"], p["m"])
    bp = bagmod.BagParams(base, p["V0"], p["P_cm"], p.get("flat_radius"))
    grid = make_grid(p["n_points"], p["x_min"], p["x_max"])
    n_snap = int(round(p["t_final"] / p["snapshot_dt"])) + 1
    times = [i * p["snapshot_dt"] for i in range(n_snap)]
    files = []
    summary = {}
    labels = "abcdefgh"
    for i, (pr0, pi) in enumerate(zip(p["case_p_r0"], p["case_pi"])):
        label = labels[i] if i < len(labels) else str(i)
        psi0 = bagmod.prepare_initial(p["x0"], p["sigma"], float(pr0), int(pi), grid)
        monitor = EvolutionMonitor()
        fields = bagmod.evolve_bag_series(
            psi0, bp, p["dt"], times, monitor=monitor
        )
        x, rows = bagmod.density_trace(fields)
        name = f"heatmap_{label}.dump"
        write_grid_dump(
            os.path.join(out, name),
            rows,
            [(times[0], times[-1]), (grid.x_min, grid.x_max)],
        )
        files.append(name)
        name = f"heatmap_{label}.csv"
        with open(os.path.join(out, name), "w") as fh:
            fh.write("t,x_r,density\n")
            for t, row in zip(times, rows):
                for xv, dv in zip(x.tolist(), row.tolist()):
                    fh.write(f"{t!r},{xv!r},{dv!r}\n")
        files.append(name)
        name = f"pi_series_{label}.csv"
        _write_csv(
            os.path.join(out, name),
            ["t", "pi_expectation"],
            [(t, bagmod.pi_expectation(f)) for t, f in zip(times, fields)],
        )
        files.append(name)
        summary[f"case_{label}"] = {
            "p_r0": float(pr0),
            "pi": int(pi),
            "tunneled_fraction_final": bagmod.klein_tunneling_fraction(fields[-1], bp),
            "energy_drift": monitor.energy_drift(),
            **_monitor_summary(monitor),
        }
    summary["x_star"] = bagmod.tunneling_radius(bp) if p["V0"] > 0 else None
    return files, summary


def _run_ion_map(cfg, out):
    p = cfg.params
    files = []
    if p["direction"] == "to_sim":
        ip = ions.IonParams(
            eta=p["eta"],
            Delta=p["Delta"],
            Omega_tilde=p["Omega_tilde"],
            Omega=p["Omega"],
            Omega_0=p.get("Omega_0"),
            Omega_3=p.get("Omega_3"),
            Delta_3=p.get("Delta_3"),
            hbar=p["hbar"],
        )
        sim = ions.sim_from_ion(ip)
        report = ions.validity_check(ip, p["n_max_phonons"])
        rows = [("c", sim.c), ("m", sim.m), ("mc2", sim.mc2)]
        summary = {
            "c": sim.c,
            "m": sim.m,
            "mc2": sim.mc2,
            "lamb_dicke_ok": report.lamb_dicke_ok,
            "dispersive_ok": report.dispersive_ok,
        }
    else:
        target = dirac.SimParams(p["target_c"], p["target_mc2"] / p["target_c"] ** 2)
        fixed = {"eta": p["eta"], "Delta": p["Delta"], "hbar": p["hbar"]}
        if p.get("Delta_3") is not None:
            fixed["Delta_3"] = p["Delta_3"]
        ip = ions.ion_from_sim(
            target,
            fixed,
            alpha=p.get("target_alpha"),
            V0=p.get("target_V0"),
            omega_tilde_max=p.get("omega_tilde_max"),
        )
        back = ions.sim_from_ion(ip)
        report = ions.validity_check(ip, p["n_max_phonons"])
        rows = [
            ("Omega_tilde", ip.Omega_tilde),
            ("Omega", ip.Omega),
            ("Omega_0", ip.Omega_0 if ip.Omega_0 is not None else float("nan")),
            ("Omega_3", ip.Omega_3 if ip.Omega_3 is not None else float("nan")),
            ("round_trip_c", back.c),
            ("round_trip_mc2", back.mc2),
        ]
        summary = {
            "Omega_tilde": ip.Omega_tilde,
            "Omega": ip.Omega,
            "round_trip_c_error": abs(back.c - target.c),
            "round_trip_mc2_error": abs(back.mc2 - target.mc2),
            "lamb_dicke_ok": report.lamb_dicke_ok,
            "dispersive_ok": report.dispersive_ok,
        }
    _write_csv(os.path.join(out, "parameters.csv"), ["name", "value"], rows)
    files.append("parameters.csv")
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(str(report) + "\n")
    files.append("report.txt")
    return files, summary


_RUNNERS = {
    "zitterbewegung": _run_zitterbewegung,
    "klein1d": _run_klein1d,
    "klein2d": _run_klein2d,
    "landau": _run_landau,
    "bag": _run_bag,
    "ion-map": _run_ion_map,
}


# ---------------------------------------------------------------------------


def emit_plot_data(out_dir, target_dir=None):
    """Convert a run's dumps into gnuplot-style whitespace matrices.

    Complex fields are written as |psi|^2; a README describes every
    emitted file and its columns.
    """
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if target_dir is None:
        target_dir = os.path.join(out_dir, "plotdata")
    os.makedirs(target_dir, exist_ok=True)
    readme = [
        "Plot data emitted from " + manifest["experiment"] + " run.",
        "Matrices are whitespace-separated, row index = first axis;",
        "a header comment gives each axis range.",
        "",
    ]
    written = []
    for entry in manifest["files"]:
        name = entry["path"]
        if not name.endswith(".dump"):
            continue
        payload, axes = read_grid_dump(os.path.join(out_dir, name))
        stem = os.path.splitext(name)[0]
        if np.iscomplexobj(payload):
            matrix = np.sum(np.abs(payload) ** 2, axis=-1)
            kind = "density |psi|^2"
        elif payload.ndim == len(axes):
            matrix = payload
            kind = "values"
        else:
            # component-resolved real dump: one matrix per component
            for comp in range(payload.shape[-1]):
                cname = f"{stem}_c{comp}.dat"
                _write_matrix(
                    os.path.join(target_dir, cname), payload[..., comp], axes
                )
                readme.append(f"{cname}: component {comp} of {name}")
                written.append(cname)
            continue
        dat = stem + ".dat"
        _write_matrix(os.path.join(target_dir, dat), matrix, axes)
        readme.append(f"{dat}: {kind} from {name}")
        written.append(dat)
    with open(os.path.join(target_dir, "README.txt"), "w") as fh:
        fh.write("\n".join(readme) + "\n")
    return written


def _write_matrix(path, matrix, axes):
    matrix = np.atleast_2d(matrix)
    with open(path, "w") as fh:
        for i, (lo, hi) in enumerate(axes):
            fh.write(f"# axis{i}: {lo!r} .. {hi!r}\n")
        for row in matrix:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
