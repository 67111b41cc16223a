"""Named experiments: configuration resolution, sweeps and CSV/JSON output.

Every run writes its data files plus ``<experiment>_config.json``, a sidecar
holding the fully resolved configuration (rates in rad/s) which can be fed
back through ``--config`` to reproduce the run byte for byte.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import dynamics, optomech, resonator, sensing
from .optomech import OptomechParams
from .resonator import ResonatorParams

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    pass


def _paper(quality_factor: float) -> dict[str, float]:
    omega_m = TWO_PI * 8.7e6
    return {
        "omega_m": omega_m,
        "gamma_m": omega_m / quality_factor,
        "mass": 3.6e-15,
        "g": -TWO_PI * 245.0,
        "gamma_c": TWO_PI * 5e9,
        "Omega": 0.0,
    }


PRESETS: dict[str, dict[str, float]] = {
    # dimensionless units, omega_m sets the frequency scale
    "desk": {"omega_m": 1.0, "gamma_m": 0.01, "mass": 1.0, "g": -0.01, "gamma_c": 50.0, "Omega": 0.0},
    "paper": _paper(1e4),
    "paper_mass": _paper(7e5),
}

PARAM_KEYS = ("omega_m", "gamma_m", "mass", "g", "gamma_c", "Omega")
HZ_KEYS = ("omega_m", "gamma_m", "g", "gamma_c", "Omega")

_GRID = {"grid_start": 0.0, "grid_stop": 1.0, "grid_count": 101, "grid_scale": "linear"}

OPTIONS: dict[str, dict[str, Any]] = {
    "fig1": {"Q0": 1.0, "P0": 0.0, "step": None, "t_end": None, "stride": 10,
             **_GRID, "grid_stop": 4.0, "grid_count": 401},
    "fig2": {**_GRID, "grid_stop": 2.0, "grid_count": 401, "include_eps": True},
    "fig3": {**_GRID, "grid_stop": 3.0, "grid_count": 301, "approach_decades": 8,
             "fd_rel_step": 1e-6, "delta_start": -1e-3, "delta_stop": 1e-3, "delta_count": 201},
    "mass-sense": {"m_p": 1e-27},
    "eigen": {},
    "simulate": {"system": "resonator", "Q0": 1.0, "P0": 0.0, "alpha0_re": 0.0, "alpha0_im": 0.0,
                 "step": None, "t_end": None, "stride": 1, "Omega_ratio": None},
}

DEFAULT_PRESET = {"mass-sense": "paper_mass"}


@dataclass
class ExperimentConfig:
    experiment: str
    preset: str
    params: dict[str, float]
    options: dict[str, Any]
    out: Path = field(default_factory=lambda: Path("."))

    @property
    def resonator(self) -> ResonatorParams:
        p = self.params
        return ResonatorParams(p["omega_m"], p["gamma_m"], p["mass"])

    @property
    def optomech(self) -> OptomechParams:
        p = self.params
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", optomech.SidebandWarning)
            return OptomechParams(self.resonator, p["g"], p["gamma_c"], p["Omega"])

    def to_dict(self) -> dict[str, Any]:
        return {"experiment": self.experiment, "preset": self.preset, **self.params, **self.options}


def parse_override(text: str) -> tuple[str, Any]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def load_config_file(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    # sidecars nest the resolved config
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def _as_number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    return value


def _coerce_option(key: str, default: Any, value: Any) -> Any:
    if value is None:
        return None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    return _as_number(key, value)


def resolve_config(experiment: str, overrides: Iterable[tuple[str, Any]], out: Path | str = ".",
                   preset: str | None = None) -> ExperimentConfig:
    """Preset, then overrides in order; ``*_hz`` keys are multiplied by 2 pi."""
    if experiment not in OPTIONS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    overrides = list(overrides)
    for key, value in overrides:
        if key == "preset":
            preset = value
    preset = preset or DEFAULT_PRESET.get(experiment, "desk")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    params = dict(PRESETS[preset])
    defaults = OPTIONS[experiment]
    options = dict(defaults)
    quality_factor = None
    gamma_set = False
    for key, value in overrides:
        if key in ("preset", "experiment"):
            if key == "experiment" and value != experiment:
                raise ConfigError(f"config is for experiment {value!r}, not {experiment!r}")
            continue
        if key.endswith("_hz") and key[:-3] in HZ_KEYS:
            params[key[:-3]] = TWO_PI * _as_number(key, value)
            gamma_set |= key[:-3] == "gamma_m"
        elif key in PARAM_KEYS:
            params[key] = _as_number(key, value)
            gamma_set |= key == "gamma_m"
        elif key == "Q_m":
            quality_factor = _as_number(key, value)
        elif key in defaults:
            options[key] = _coerce_option(key, defaults[key], value)
        else:
            raise ConfigError(f"unknown key {key!r} for experiment {experiment!r}")
    if quality_factor is not None:
        if gamma_set:
            raise ConfigError("give either gamma_m or Q_m, not both")
        if quality_factor <= 0:
            raise ConfigError("Q_m must be > 0")
        params["gamma_m"] = params["omega_m"] / quality_factor
    cfg = ExperimentConfig(experiment, preset, params, options, Path(out))
    try:
        cfg.optomech
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


# --- output -----------------------------------------------------------------

def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def write_sidecar(cfg: ExperimentConfig, outputs: Sequence[Path], derived: dict[str, Any] | None = None) -> Path:
    data = {"config": cfg.to_dict(), "outputs": [p.name for p in outputs], "derived": derived or {}}
    return write_json(cfg.out / f"{cfg.experiment.replace('-', '_')}_config.json", data)


def grid(opts: dict[str, Any], prefix: str = "grid") -> np.ndarray:
    start, stop = opts[f"{prefix}_start"], opts[f"{prefix}_stop"]
    count = int(opts[f"{prefix}_count"])
    scale = opts.get(f"{prefix}_scale", "linear")
    if count < 2:
        raise ConfigError(f"{prefix}_count must be >= 2")
    if scale == "linear":
        return np.linspace(start, stop, count)
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("log grids need positive bounds")
        return np.geomspace(start, stop, count)
    raise ConfigError(f"{prefix}_scale must be 'linear' or 'log', got {scale!r}")


def _eigen_columns(sol: resonator.EigenSolution) -> list[float]:
    lp, lm = sol.lambda_plus, sol.lambda_minus
    return [lp.real, lm.real, lp.imag, lm.imag]


# --- experiments ------------------------------------------------------------

FIG1_STATES = (("under", 0.5), ("critical", 2.0), ("over", 4.0))


def run_fig1(cfg: ExperimentConfig) -> list[Path]:
    opts = cfg.options
    w = cfg.params["omega_m"]
    step = opts["step"] or 1e-3 / w
    t_end = opts["t_end"] or 20.0 / w
    outputs = []
    for name, ratio in FIG1_STATES:
        params = ResonatorParams(w, ratio * w, cfg.params["mass"])
        traj = dynamics.simulate_resonator(params, opts["Q0"], opts["P0"],
                                           dynamics.IntegratorConfig(step, t_end, opts["stride"]))
        outputs.append(write_csv(cfg.out / f"fig1_trajectory_{name}.csv", ["t", "Q", "P"],
                                 zip(traj.t, traj.Q, traj.P)))
    rows = []
    for ratio in grid(opts):
        sol = resonator.solve_frequency(w, ratio * w)
        rows.append([ratio, *_eigen_columns(sol), sol.phase.label])
    outputs.append(write_csv(
        cfg.out / "fig1_eigen_sweep.csv",
        ["ratio", "re_lambda_plus", "re_lambda_minus", "im_lambda_plus", "im_lambda_minus", "phase"],
        rows))
    write_sidecar(cfg, outputs, {"step": step, "t_end": t_end,
                                 "trajectory_ratios": [r for _, r in FIG1_STATES]})
    return outputs


def _drive_grid(cfg: ExperimentConfig, extra: Sequence[float] = ()) -> tuple[float, np.ndarray]:
    omega_c = optomech.critical_drive(cfg.optomech)
    drives = grid(cfg.options) * omega_c
    if len(extra):
        drives = np.unique(np.concatenate([drives, np.asarray(extra, dtype=float)]))
    return omega_c, drives


def run_fig2(cfg: ExperimentConfig) -> list[Path]:
    base = cfg.optomech
    if base.g >= 0:
        raise ConfigError("fig2 needs g < 0")
    omega_c, ep1, ep2 = optomech.ep_drives(base)
    _, drives = _drive_grid(cfg, (ep1, omega_c, ep2) if cfg.options["include_eps"] else ())
    steady_rows, eigen_rows = [], []
    for drive in drives:
        p = base.with_drive(float(drive))
        x = drive / omega_c
        sol = optomech.steady_states(p)
        for label, br in zip(("origin", "plus", "minus"), sol.branches):
            steady_rows.append([drive, x, label, br.Q_s, br.P_s, br.alpha_s.real, br.alpha_s.imag, br.stable])
        stable = optomech.eigenvalues_vs_drive(p)
        eigen_rows.append([drive, x, "stable", *_eigen_columns(stable), stable.phase.label, False])
        if sol.regime is optomech.Regime.SUPER_CRITICAL:
            origin = optomech.origin_eigenvalues(p)
            eigen_rows.append([drive, x, "origin", *_eigen_columns(origin), "unstable", True])
    outputs = [
        write_csv(cfg.out / "fig2_steady_states.csv",
                  ["Omega", "Omega_over_Omega_c", "branch", "Q_s", "P_s", "alpha_re", "alpha_im", "stable"],
                  steady_rows),
        write_csv(cfg.out / "fig2_eigenvalues.csv",
                  ["Omega", "Omega_over_Omega_c", "branch", "re_lambda_plus", "re_lambda_minus",
                   "im_lambda_plus", "im_lambda_minus", "phase", "dashed"],
                  eigen_rows),
    ]
    write_sidecar(cfg, outputs, {"Omega_c": omega_c, "Omega_EP1": ep1, "Omega_EP2": ep2})
    return outputs


def run_fig3(cfg: ExperimentConfig) -> list[Path]:
    base = cfg.optomech
    opts = cfg.options
    omega_c, ep1, ep2 = optomech.ep_drives(base)
    approach = []
    for k in range(2, int(opts["approach_decades"]) + 1):
        approach += [ep1 - 10.0**-k * omega_c, ep2 + 10.0**-k * omega_c]
    _, drives = _drive_grid(cfg, approach)
    sens_rows = []
    for drive in drives:
        p = base.with_drive(float(drive))
        fd_plus, fd_minus = sensing.finite_difference_sensitivity(p, opts["fd_rel_step"])
        try:
            s = sensing.sensitivity_analytic(p)
            a_plus, a_minus, regime = s.plus, s.minus, s.regime
        except sensing.EPDivergenceError:
            a_plus, a_minus, regime = math.inf, -math.inf, "EP"
        if a_plus == 0 and fd_plus == 0:
            rel = 0.0
        elif math.isinf(a_plus):
            rel = math.nan
        else:
            rel = abs(fd_plus - a_plus) / abs(a_plus)
        sens_rows.append([drive, drive / omega_c, regime, a_plus, a_minus, abs(a_plus), fd_plus, fd_minus, rel])
    outputs = [write_csv(
        cfg.out / "fig3_sensitivity.csv",
        ["Omega", "Omega_over_Omega_c", "regime", "analytic_plus", "analytic_minus", "abs_analytic",
         "fd_plus", "fd_minus", "rel_diff"],
        sens_rows)]
    gam = base.gamma_m
    deltas = grid(opts, "delta") * gam
    for which, drive in (("EP1", ep1), ("EP2", ep2)):
        p = base.with_drive(drive)
        rows = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sensing.AsymptoticRangeWarning)
            for delta in deltas:
                near = sensing.splitting_near_EP(p, float(delta), which)
                exact = sensing.splitting_exact(p, float(delta))
                rows.append([delta, delta / gam, near.omega_plus, near.omega_minus,
                             exact.omega_plus, exact.omega_minus])
        outputs.append(write_csv(
            cfg.out / f"fig3_splitting_{which}.csv",
            ["delta", "delta_over_gamma", "near_plus", "near_minus", "exact_plus", "exact_minus"],
            rows))
    write_sidecar(cfg, outputs, {"Omega_c": omega_c, "Omega_EP1": ep1, "Omega_EP2": ep2})
    return outputs


def mass_report(cfg: ExperimentConfig) -> dict[str, Any]:
    base = cfg.optomech
    r = base.resonator
    eps = optomech.locate_EPs(base)
    p = base.with_drive(eps.Omega_EP2)
    m_p = cfg.options["m_p"]
    if m_p < 0:
        raise ConfigError("m_p must be >= 0")
    split = sensing.mass_splitting(p, m_p)
    min_mass = sensing.minimum_resolvable_mass(r)
    return {
        "omega_m": r.omega_m,
        "gamma_m": r.gamma_m,
        "Q_m": r.quality_factor,
        "mass_kg": r.mass,
        "g": base.g,
        "gamma_c": base.gamma_c,
        "Omega_c": eps.Omega_c,
        "Omega_EP1": eps.Omega_EP1,
        "Omega_EP2": eps.Omega_EP2,
        "Omega_EP2_printed": eps.Omega_EP2_printed,
        "Omega_EP2_over_2pi_hz": eps.Omega_EP2 / TWO_PI,
        "min_resolvable_mass_kg": min_mass,
        "min_resolvable_mass_g": min_mass * 1e3,
        "m_p_kg": m_p,
        "delta": sensing.MassPerturbation.from_mass(r, m_p).delta,
        "omega_plus": split.omega_plus,
        "omega_minus": split.omega_minus,
        "splitting_over_gamma": split.width / r.gamma_m,
        "resolvable": split.resolvable,
    }


def run_mass_sense(cfg: ExperimentConfig) -> list[Path]:
    report = mass_report(cfg)
    outputs = [write_json(cfg.out / "mass_sense_report.json", report)]
    write_sidecar(cfg, outputs)
    return outputs


def eigen_report(cfg: ExperimentConfig) -> dict[str, Any]:
    params = cfg.resonator
    H = resonator.build_hamiltonian(params)
    analytic = resonator.eigen_analytic(params)
    numeric = resonator.eigen_numeric(H, reference=analytic)
    pt = resonator.pt_eigenstate_test(analytic)

    def pack(sol):
        return {
            "lambda_plus": [sol.lambda_plus.real, sol.lambda_plus.imag],
            "lambda_minus": [sol.lambda_minus.real, sol.lambda_minus.imag],
            "ratio_plus": [sol.ratio_plus.real, sol.ratio_plus.imag],
            "ratio_minus": [sol.ratio_minus.real, sol.ratio_minus.imag],
            "phase": sol.phase.label,
            "defective": sol.defective,
        }

    return {
        "omega_m": params.omega_m,
        "gamma_m": params.gamma_m,
        "hamiltonian": [[[z.real, z.imag] for z in row] for row in H.entries],
        "anti_pt_residual": resonator.check_anti_pt(H),
        "analytic": pack(analytic),
        "numeric": pack(numeric),
        "pt_eigenstates": {"plus": pt.plus, "minus": pt.minus, "degenerate": pt.degenerate},
    }


def run_eigen(cfg: ExperimentConfig) -> list[Path]:
    outputs = [write_json(cfg.out / "eigen_report.json", eigen_report(cfg))]
    write_sidecar(cfg, outputs)
    return outputs


def run_simulate(cfg: ExperimentConfig) -> list[Path]:
    opts = cfg.options
    p = cfg.optomech
    system = opts["system"]
    if opts["Omega_ratio"] is not None:
        p = p.with_drive(opts["Omega_ratio"] * optomech.critical_drive(p))
        cfg.params["Omega"] = p.Omega
        opts["Omega_ratio"] = None
    if system == "resonator":
        rate = max(p.omega_m, p.gamma_m)
    elif system in ("optomech", "adiabatic"):
        rate = dynamics.optomech_max_rate(p)
    else:
        raise ConfigError(f"system must be resonator, optomech or adiabatic, got {system!r}")
    step = opts["step"] or 0.05 / rate
    t_end = opts["t_end"] or 20.0 / p.omega_m
    ic = dynamics.IntegratorConfig(step, t_end, opts["stride"])
    opts["step"], opts["t_end"] = step, t_end
    if system == "resonator":
        traj = dynamics.simulate_resonator(p.resonator, opts["Q0"], opts["P0"], ic)
    elif system == "optomech":
        traj = dynamics.simulate_optomech(p, opts["Q0"], opts["P0"],
                                          complex(opts["alpha0_re"], opts["alpha0_im"]), ic)
    else:
        traj = dynamics.simulate_adiabatic(p, opts["Q0"], opts["P0"], ic)
    outputs = [write_csv(cfg.out / "simulate_trajectory.csv", ["t", "Q", "P", "alpha_re", "alpha_im"],
                         zip(traj.t, traj.Q, traj.P, traj.alpha_re, traj.alpha_im))]
    write_sidecar(cfg, outputs)
    return outputs


RUNNERS = {
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "mass-sense": run_mass_sense,
    "eigen": run_eigen,
    "simulate": run_simulate,
}


def run(cfg: ExperimentConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[cfg.experiment](cfg)
