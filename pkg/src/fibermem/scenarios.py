"""Named experiment scenarios: each renders one CSV plus summary scalars.

A scenario is a parameter-free recipe over the shared configuration;
overrides come in as dotted key=value pairs.  Output files carry the
scenario id, the seed, and a digest of the fully resolved configuration
in comment lines, followed by unit-suffixed column headers and rows
printed with %.12g.  Identical scenario, configuration and seed give a
byte-identical file; randomness enters only through the seeded photon
counting attached to storage runs.  Sweeps are pure per-point maps
evaluated in input order, so they could be farmed out to workers
without changing the output.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import DEFAULTS, config_digest, render_config, set_key
from .counting import (
    CountingModel,
    analytic_snr,
    simulate_counting,
    snr_standard_error,
)
from .decoherence import (
    DecoherenceParams,
    MagneticScenario,
    half_larmor_period,
    motional_dephasing_time,
    revival_envelope,
    zeeman_dephasing_time,
)
from .eit import (
    ControlField,
    LambdaScheme,
    ProbePulse,
    PropagationGrid,
    eit_spectrum,
    group_delay,
    propagate_pulse,
    rabi_from_power,
    storage_ramp_envelope,
)
from .ensemble import (
    AbsorptionModel,
    lorentzian_transmission,
    saturation_transmission,
)
from .fitkit import FitProblem, fit
from .waveguide import surface_intensity_scan

MHZ = 2.0 * math.pi * 1e6  # detunings quoted as frequencies


class UnknownScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    """One run request: id, config overrides, seed, output file."""

    scenario_id: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: Optional[str] = None


@dataclass(frozen=True)
class ScenarioEntry:
    """Catalog row: what the scenario produces and which keys it reads."""

    scenario_id: str
    description: str
    headline: Optional[str]
    parameter_docs: tuple


def _doc(*keys) -> tuple:
    missing = [k for k, _ in keys if k not in DEFAULTS]
    if missing:
        raise KeyError("parameter docs reference unknown keys %s" % missing)
    return tuple(keys)


def _scheme(cfg) -> LambdaScheme:
    return LambdaScheme(
        gamma_ge_rad_per_s=cfg["scheme.gamma_MHz"] * MHZ,
        gamma_gs_rad_per_s=cfg["scheme.gamma_gs_rad_per_s"],
        wavelength_m=cfg["scheme.wavelength_nm"] * 1e-9,
        hyperfine_splitting_Hz=cfg["scheme.splitting_GHz"] * 1e9,
    )


def _rabi(cfg, power_W: float) -> float:
    return rabi_from_power(
        power_W,
        waist_m=cfg["control.waist_um"] * 1e-6,
        calibration=cfg["calibration.rabi_calibration"],
        gamma_rad_per_s=cfg["scheme.gamma_MHz"] * MHZ,
    )


def _absorption(cfg) -> AbsorptionModel:
    return AbsorptionModel(
        alpha0_L=cfg["absorption.alpha0_L"],
        p_sat_W=cfg["absorption.p_sat_nW"] * 1e-9,
        k_exp=cfg["absorption.k_exp"],
        gamma_rad_per_s=cfg["scheme.gamma_MHz"] * MHZ,
        od=cfg["spectroscopy.od"],
    )


def _decoherence(cfg) -> DecoherenceParams:
    return DecoherenceParams(
        temperature_K=cfg["decoherence.temperature_uK"] * 1e-6,
        fiber_radius_m=cfg["fiber.radius_nm"] * 1e-9,
        wavelength_m=cfg["fiber.wavelength_nm"] * 1e-9,
        control_angle_rad=math.radians(cfg["control.angle_deg"]),
        zeeman_broadening_Hz=cfg["decoherence.zeeman_kHz"] * 1e3,
    )


def _run_fig1b(cfg, seed):
    """Saturation of the transmitted power, with a self-fit check."""
    model = _absorption(cfg)
    p_nW = np.geomspace(
        cfg["absorption.power_min_nW"],
        cfg["absorption.power_max_nW"],
        cfg["absorption.points"],
    )
    trans = saturation_transmission(p_nW * 1e-9, model)
    res = fit(FitProblem("saturation", list(zip(p_nW * 1e-9, trans))))
    summary = {
        "alpha0_L_fit": res.parameter("alpha0_L"),
        "p_sat_fit_nW": res.parameter("p_sat_W") * 1e9,
        "k_exp_fit": res.parameter("k_exp"),
        "fit_converged": res.converged,
        "transmission_floor": float(trans.min()),
    }
    return [("power_nW", p_nW), ("transmission", trans)], summary


def _run_fig1c(cfg, seed):
    """Resonant absorption line, with the optical depth fit back out."""
    model = _absorption(cfg)
    span = cfg["spectroscopy.span_MHz"]
    delta_MHz = np.linspace(-span, span, cfg["spectroscopy.points"])
    trans = lorentzian_transmission(delta_MHz * MHZ, model)
    res = fit(FitProblem("lorentzian_od", list(zip(delta_MHz * MHZ, trans))))
    summary = {
        "od_fit": res.parameter("od"),
        "od_err": res.uncertainty("od"),
        "gamma_fit_MHz": res.parameter("gamma_rad_per_s") / MHZ,
        "fit_converged": res.converged,
        "min_transmission": float(trans.min()),
    }
    return [("detuning_MHz", delta_MHz), ("transmission", trans)], summary


def _power_list(cfg) -> list:
    out = []
    for tok in str(cfg["spectroscopy.powers_mW"]).split(","):
        tok = tok.strip()
        if tok:
            out.append(float(tok))
    if not out:
        raise ValueError("spectroscopy.powers_mW lists no powers")
    return out


def _run_fig2(cfg, seed):
    """Transparency window spectra at several control powers."""
    scheme = _scheme(cfg)
    od = cfg["spectroscopy.od"]
    span = cfg["spectroscopy.span_MHz"]
    delta_MHz = np.linspace(-span, span, cfg["spectroscopy.points"])
    cols = [("detuning_MHz", delta_MHz)]
    summary = {}
    for p_mW in _power_list(cfg):
        omega = _rabi(cfg, p_mW * 1e-3)
        trans = eit_spectrum(od, scheme, omega, delta_MHz * MHZ)
        tag = ("%g" % p_mW).replace(".", "p")
        cols.append(("transmission_%smW" % tag, trans))
        summary["transparency_%smW" % tag] = float(
            eit_spectrum(od, scheme, omega, 0.0)
        )
        summary["rabi_%smW_MHz" % tag] = omega / MHZ
    return cols, summary


def _run_fig3a(cfg, seed):
    """Slow-light delay and slowdown factor against control power."""
    scheme = _scheme(cfg)
    od = cfg["slowlight.od"]
    length_m = cfg["medium.length_mm"] * 1e-3
    p_mW = np.linspace(
        cfg["slowlight.power_min_mW"],
        cfg["slowlight.power_max_mW"],
        cfg["slowlight.points"],
    )
    delay_ns = np.empty_like(p_mW)
    slowdown = np.empty_like(p_mW)
    transparency = np.empty_like(p_mW)
    for i, p in enumerate(p_mW):
        g = group_delay(od, scheme, _rabi(cfg, p * 1e-3), length_m)
        delay_ns[i] = g.delay_s * 1e9
        slowdown[i] = g.slowdown
        transparency[i] = g.transparency
    anchor_p = cfg["calibration.anchor_delay_power_mW"]
    anchor = group_delay(od, scheme, _rabi(cfg, anchor_p * 1e-3), length_m)
    summary = {
        "delay_at_anchor_ns": anchor.delay_s * 1e9,
        "slowdown_at_anchor": anchor.slowdown,
        "anchor_power_mW": anchor_p,
        "max_delay_ns": float(delay_ns.max()),
    }
    cols = [
        ("control_power_mW", p_mW),
        ("delay_ns", delay_ns),
        ("slowdown", slowdown),
        ("transparency", transparency),
    ]
    return cols, summary


def _storage_inputs(cfg, dark_ns: Optional[float] = None):
    scheme = _scheme(cfg)
    probe = ProbePulse(
        mean_photon_number=cfg["probe.photons"],
        fwhm_s=cfg["probe.fwhm_ns"] * 1e-9,
        shape=cfg["probe.shape"],
        detuning_rad_per_s=cfg["probe.detuning_MHz"] * MHZ,
        peak_time_s=cfg["probe.peak_ns"] * 1e-9,
    )
    t_off = cfg["storage.switch_off_ns"] * 1e-9
    dark = (dark_ns if dark_ns is not None else cfg["storage.dark_ns"]) * 1e-9
    control = ControlField(
        power_W=cfg["control.power_mW"] * 1e-3,
        waist_m=cfg["control.waist_um"] * 1e-6,
        angle_rad=math.radians(cfg["control.angle_deg"]),
        rabi_rad_per_s=_rabi(cfg, cfg["control.power_mW"] * 1e-3),
        envelope=storage_ramp_envelope(
            t_off, t_off + dark, cfg["storage.ramp_ns"] * 1e-9
        ),
    )
    grid = PropagationGrid(
        t_start_s=0.0,
        t_stop_s=cfg["storage.t_stop_ns"] * 1e-9,
        dt_s=cfg["storage.dt_ns"] * 1e-9,
        n_z=cfg["storage.n_z"],
    )
    return probe, control, grid, scheme


def _run_storage(cfg, seed, with_target: bool):
    """Full storage and retrieval run plus a counting estimate."""
    probe, control, grid, scheme = _storage_inputs(cfg)
    result = propagate_pulse(probe, control, cfg["storage.od"], scheme, grid)
    counting = CountingModel(
        mean_photons_in=cfg["probe.photons"],
        efficiency=min(result.retrieval_efficiency, 1.0),
        background_per_window=cfg["counting.background"],
        n_shots=cfg["counting.shots"],
        window_s=cfg["counting.window_ns"] * 1e-9,
    )
    counted = simulate_counting(counting, seed)
    summary = {
        "retrieval_efficiency": result.retrieval_efficiency,
        "leak_fraction": result.leak_fraction,
        "transmission": result.transmission,
        "readout_start_ns": (
            result.readout_start_s * 1e9
            if result.readout_start_s is not None
            else float("nan")
        ),
        "snr_simulated": counted.snr,
        "snr_analytic": analytic_snr(counting),
        "snr_std_error": snr_standard_error(counting),
        "run_fingerprint": result.fingerprint,
    }
    if with_target:
        summary["target_efficiency"] = 0.10
    cols = [
        ("time_ns", result.t_grid_s * 1e9),
        ("input_flux_per_s", result.input_intensity),
        ("output_flux_per_s", result.output_intensity),
        ("control_rabi_rad_per_s", result.control_rabi),
    ]
    return cols, summary


def _run_fig3b(cfg, seed):
    return _run_storage(cfg, seed, with_target=True)


def _run_custom(cfg, seed):
    return _run_storage(cfg, seed, with_target=False)


def _run_fig3c(cfg, seed):
    """Retrieval efficiency against the dark storage interval."""
    darks = np.arange(
        cfg["storage.dark_min_ns"],
        cfg["storage.dark_max_ns"] + 0.5 * cfg["storage.dark_step_ns"],
        cfg["storage.dark_step_ns"],
    )
    if darks.size == 0:
        raise ValueError("empty dark-time sweep")
    eff = np.empty_like(darks)
    od = cfg["storage.od"]
    for i, d in enumerate(darks):
        probe, control, grid, scheme = _storage_inputs(cfg, dark_ns=float(d))
        res = propagate_pulse(probe, control, od, scheme, grid)
        eff[i] = res.retrieval_efficiency
    gamma_gs = cfg["scheme.gamma_gs_rad_per_s"]
    summary = {
        "efficiency_at_shortest": float(eff[0]),
        "efficiency_at_longest": float(eff[-1]),
        "shortest_dark_ns": float(darks[0]),
        "longest_dark_ns": float(darks[-1]),
        # spin-wave amplitude decays at gamma_gs, intensity at twice that
        "expected_decay_ratio": math.exp(
            -2.0 * gamma_gs * (darks[-1] - darks[0]) * 1e-9
        ),
        "observed_decay_ratio": float(eff[-1] / eff[0]) if eff[0] > 0 else 0.0,
    }
    return [("storage_time_ns", darks), ("efficiency", eff)], summary


def _run_fig4a(cfg, seed):
    """Field-free memory decay, with the lifetime fit back out."""
    params = _decoherence(cfg)
    t_us = np.linspace(0.0, cfg["decoherence.t_max_us"], cfg["decoherence.points"])
    curve = revival_envelope(t_us * 1e-6, MagneticScenario(b_field_T=0.0), params)
    res = fit(FitProblem("decay_lifetime", list(zip(t_us * 1e-6, curve))))
    tau2 = motional_dephasing_time(
        params.wavelength_m, params.control_angle_rad, params.velocity_m_s
    )
    summary = {
        "tau_transit_us": params.effective_tau_T_s * 1e6,
        "tau_motional_us": tau2 * 1e6,
        "tau_zeeman_us": zeeman_dephasing_time(params.zeeman_broadening_Hz) * 1e6,
        "tau_dephasing_us": params.effective_tau_D_s * 1e6,
        "fitted_tau_D_us": res.parameter("tau_D_s") * 1e6,
        "fitted_tau_T_us": res.parameter("tau_T_s") * 1e6,
        "fit_converged": res.converged,
    }
    return [("time_us", t_us), ("relative_efficiency", curve)], summary


def _revival_peaks(t_us, comb, t_half_us) -> list:
    """Local maxima of the interference comb, parabola-refined."""
    peaks = []
    for i in range(1, t_us.size - 1):
        if not (comb[i] >= comb[i - 1] and comb[i] > comb[i + 1]):
            continue
        if comb[i] < 0.5 or t_us[i] < 0.25 * t_half_us:
            continue
        denom = comb[i - 1] - 2.0 * comb[i] + comb[i + 1]
        shift = 0.0
        if denom < 0.0:
            shift = 0.5 * (comb[i - 1] - comb[i + 1]) / denom
        dt = t_us[1] - t_us[0]
        peaks.append(float(t_us[i] + shift * dt))
    return peaks


def _run_magnetic(cfg, b_field_G: float):
    params = _decoherence(cfg)
    scenario = MagneticScenario(b_field_T=b_field_G * 1e-4)
    t_us = np.linspace(0.0, cfg["decoherence.t_max_us"], cfg["decoherence.points"])
    curve = revival_envelope(t_us * 1e-6, scenario, params)
    free = revival_envelope(t_us * 1e-6, MagneticScenario(b_field_T=0.0), params)
    with np.errstate(invalid="ignore", divide="ignore"):
        comb = np.where(free > 0.0, curve / free, 0.0)
    t_half_us = half_larmor_period(b_field_G * 1e-4) * 1e6
    peaks = _revival_peaks(t_us, comb, t_half_us)
    summary = {
        "b_field_G": b_field_G,
        "half_larmor_period_us": t_half_us,
        "revival_times_us": tuple(peaks),
        "first_revival_us": peaks[0] if peaks else float("nan"),
        "n_revivals": len(peaks),
    }
    cols = [
        ("time_us", t_us),
        ("relative_efficiency", curve),
        ("field_free_decay", free),
    ]
    return cols, summary


def _run_fig4b(cfg, seed):
    return _run_magnetic(cfg, cfg["magnetic.b_field_G"])


def _run_fig4c(cfg, seed):
    return _run_magnetic(cfg, cfg["magnetic.b_field_alt_G"])


def _run_mode_scan(cfg, seed):
    """Surface intensity against fiber diameter at one watt guided."""
    d_nm = np.arange(
        cfg["scan.diameter_min_nm"],
        cfg["scan.diameter_max_nm"] + 0.5 * cfg["scan.diameter_step_nm"],
        cfg["scan.diameter_step_nm"],
    )
    scan = surface_intensity_scan(
        cfg["fiber.wavelength_nm"] * 1e-9,
        d_nm * 1e-9,
        power_w=1.0,
        core_index=cfg["fiber.core_index"],
    )
    i_max = int(np.argmax(scan.surface_intensity_w_m2))
    summary = {
        "argmax_diameter_nm": scan.argmax_diameter_m * 1e9,
        "max_surface_intensity_W_m2": float(scan.surface_intensity_w_m2[i_max]),
        "n_eff_at_argmax": float(scan.n_eff[i_max]),
        "evanescent_fraction_at_argmax": float(scan.evanescent_fractions[i_max]),
        "n_guided": int(scan.diameters_m.size),
    }
    cols = [
        ("diameter_nm", scan.diameters_m * 1e9),
        ("n_eff", scan.n_eff),
        ("evanescent_fraction", scan.evanescent_fractions),
        ("surface_intensity_W_m2_per_W", scan.surface_intensity_w_m2),
    ]
    return cols, summary


_SPECTRO_DOCS = _doc(
    ("spectroscopy.od", "resonant optical depth, dimensionless"),
    ("spectroscopy.span_MHz", "half width of the detuning grid, MHz"),
    ("spectroscopy.points", "number of detuning samples"),
    ("scheme.gamma_MHz", "excited-state linewidth as a frequency, MHz"),
)

_STORAGE_DOCS = _doc(
    ("storage.od", "resonant optical depth, dimensionless"),
    ("control.power_mW", "control beam power, mW"),
    ("control.waist_um", "control beam 1/e^2 waist, micrometers"),
    ("probe.photons", "mean photon number per probe pulse, dimensionless"),
    ("probe.fwhm_ns", "probe intensity FWHM, ns"),
    ("probe.peak_ns", "probe peak arrival time, ns"),
    ("probe.detuning_MHz", "probe detuning from line center, MHz"),
    ("storage.switch_off_ns", "control switch-off time, ns"),
    ("storage.dark_ns", "dark interval before reopening the control, ns"),
    ("storage.ramp_ns", "control ramp duration, ns"),
    ("storage.t_stop_ns", "end of the simulated span, ns"),
    ("storage.dt_ns", "time step, ns"),
    ("storage.n_z", "number of medium slices, dimensionless"),
    ("counting.background", "mean background counts per window, dimensionless"),
    ("counting.shots", "number of repeated shots"),
    ("counting.window_ns", "counting window, ns"),
)

_DECOHERENCE_DOCS = _doc(
    ("decoherence.temperature_uK", "atom temperature, microkelvin"),
    ("decoherence.zeeman_kHz", "residual Zeeman broadening, kHz"),
    ("decoherence.t_max_us", "end of the storage-time axis, microseconds"),
    ("decoherence.points", "number of time samples"),
    ("fiber.radius_nm", "fiber radius setting the transit length, nm"),
    ("control.angle_deg", "beam angle entering the motional phase, degrees"),
)

_REGISTRY: dict = {}


def _register(entry: ScenarioEntry, runner: Callable) -> None:
    _REGISTRY[entry.scenario_id] = (entry, runner)


_register(
    ScenarioEntry(
        "fig1b",
        "transmission versus probe power through the saturable ensemble,"
        " self-fitted with the saturation model",
        None,
        _doc(
            ("absorption.alpha0_L", "weak-probe optical depth, dimensionless"),
            ("absorption.p_sat_nW", "saturation power, nW"),
            ("absorption.k_exp", "saturation exponent, dimensionless"),
            ("absorption.power_min_nW", "lowest probe power, nW"),
            ("absorption.power_max_nW", "highest probe power, nW"),
            ("absorption.points", "number of power samples"),
        ),
    ),
    _run_fig1b,
)
_register(
    ScenarioEntry(
        "fig1c",
        "resonant absorption line versus detuning, self-fitted to recover"
        " the optical depth",
        "fitted od returns the configured value, 3.00 by default",
        _SPECTRO_DOCS,
    ),
    _run_fig1c,
)
_register(
    ScenarioEntry(
        "fig2",
        "transparency window spectra at several control powers",
        None,
        _SPECTRO_DOCS
        + _doc(
            ("spectroscopy.powers_mW", "comma list of control powers, mW"),
            ("control.waist_um", "control beam 1/e^2 waist, micrometers"),
        ),
    ),
    _run_fig2,
)
_register(
    ScenarioEntry(
        "fig3a",
        "slow-light group delay and slowdown factor versus control power",
        "60 ns delay at the 0.5 mW anchor power",
        _doc(
            ("slowlight.od", "resonant optical depth, dimensionless"),
            ("slowlight.power_min_mW", "lowest control power, mW"),
            ("slowlight.power_max_mW", "highest control power, mW"),
            ("slowlight.points", "number of power samples"),
            ("medium.length_mm", "medium length for the slowdown factor, mm"),
        ),
    ),
    _run_fig3a,
)
_register(
    ScenarioEntry(
        "fig3b",
        "pulse storage and retrieval at the reference operating point,"
        " with photon-counting statistics for the retrieved field",
        "retrieval efficiency at the reference point; target 0.10",
        _STORAGE_DOCS,
    ),
    _run_fig3b,
)
_register(
    ScenarioEntry(
        "fig3c",
        "retrieval efficiency versus the dark storage interval",
        None,
        _STORAGE_DOCS
        + _doc(
            ("storage.dark_min_ns", "shortest dark interval, ns"),
            ("storage.dark_max_ns", "longest dark interval, ns"),
            ("storage.dark_step_ns", "dark interval step, ns"),
        ),
    ),
    _run_fig3c,
)
_register(
    ScenarioEntry(
        "fig4a",
        "field-free memory decay versus storage time, self-fitted to"
        " recover the dephasing and transit lifetimes",
        None,
        _DECOHERENCE_DOCS,
    ),
    _run_fig4a,
)
_register(
    ScenarioEntry(
        "fig4b",
        "memory decay with Larmor collapses and revivals at the reference"
        " longitudinal field",
        "revivals at multiples of the half Larmor period, 3.57 us at 0.4 G",
        _DECOHERENCE_DOCS + _doc(("magnetic.b_field_G", "longitudinal field, Gauss")),
    ),
    _run_fig4b,
)
_register(
    ScenarioEntry(
        "fig4c",
        "memory decay with Larmor revivals at the alternate field",
        "first revival near 2.38 us at 0.6 G",
        _DECOHERENCE_DOCS
        + _doc(("magnetic.b_field_alt_G", "alternate longitudinal field, Gauss")),
    ),
    _run_fig4c,
)
_register(
    ScenarioEntry(
        "mode_scan",
        "fundamental-mode surface intensity versus fiber diameter",
        "surface intensity peaks near 400 nm diameter",
        _doc(
            ("fiber.wavelength_nm", "vacuum wavelength, nm"),
            ("fiber.core_index", "core refractive index, dimensionless"),
            ("scan.diameter_min_nm", "smallest diameter, nm"),
            ("scan.diameter_max_nm", "largest diameter, nm"),
            ("scan.diameter_step_nm", "diameter step, nm"),
        ),
    ),
    _run_mode_scan,
)
_register(
    ScenarioEntry(
        "custom",
        "free-form storage run; combine with --set overrides to explore"
        " operating points away from the reference",
        None,
        _STORAGE_DOCS,
    ),
    _run_custom,
)


def list_scenarios() -> tuple:
    """Catalog entries in stable registration order."""
    return tuple(entry for entry, _ in _REGISTRY.values())


def _format_cell(v) -> str:
    return "%.12g" % float(v)


def _write_csv(path: str, scenario: Scenario, cfg: dict, columns) -> int:
    names = [name for name, _ in columns]
    arrays = [np.asarray(arr, dtype=float) for _, arr in columns]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise ValueError("column length mismatch")
    lines = [
        "# scenario: %s" % scenario.scenario_id,
        "# seed: %d" % scenario.seed,
        "# config sha256: %s" % config_digest(cfg),
    ]
    for cfg_line in render_config(cfg).splitlines():
        lines.append("# %s" % cfg_line)
    lines.append(",".join(names))
    for i in range(n):
        lines.append(",".join(_format_cell(a[i]) for a in arrays))
    text = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return n


def run_scenario(scenario: Scenario, config: Optional[dict] = None) -> dict:
    """Resolve the configuration, run, write the CSV, return the summary.

    The returned dict carries the output path, the config digest, the
    scenario's headline scalars and the fully resolved configuration.
    The file write is atomic: a temporary file in the target directory
    is renamed over the destination.
    """
    if scenario.scenario_id not in _REGISTRY:
        raise UnknownScenarioError(
            "unknown scenario %r; known: %s"
            % (scenario.scenario_id, ", ".join(_REGISTRY))
        )
    entry, runner = _REGISTRY[scenario.scenario_id]
    cfg = dict(config) if config is not None else dict(DEFAULTS)
    for key, value in scenario.parameters.items():
        set_key(cfg, key, value)
    columns, summary = runner(cfg, scenario.seed)
    path = scenario.output_path or "%s.csv" % scenario.scenario_id
    n_rows = _write_csv(path, scenario, cfg, columns)
    return {
        "scenario_id": scenario.scenario_id,
        "description": entry.description,
        "output_path": path,
        "n_rows": n_rows,
        "seed": scenario.seed,
        "config_digest": config_digest(cfg),
        "summary": summary,
        "resolved_config": cfg,
    }
