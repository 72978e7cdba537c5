"""Lifetime and revival models for the stored excitation.

Three closed-form mechanisms limit the memory: transit of thermal atoms
through the evanescent field (tau_T), motional dephasing of the imprinted
spin-wave grating (tau_2), and inhomogeneous Zeeman dephasing (tau_3).
The latter two combine in quadrature into tau_D, and the retrieval
efficiency relative to zero delay decays as

    eta_rel(t) = exp[-(t/tau_D)^2 / (1+(t/tau_T)^2)] / (1+(t/tau_T)^2)^2

With a magnetic field along the fiber the stored coherences accumulate
phases at even multiples of the Larmor frequency (ground clock pairs
|F=4,m> and |F=3,m> carry opposite-sign Lande factors, so each pair
advances at 2 m nu_L).  Their interference collapses and revives the
efficiency at multiples of the half Larmor period, independent of how
the m levels are populated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CS_GF_GROUND, CS_MASS_KG, H_PLANCK, K_BOLTZMANN, MU_BOHR

# default ladder: phase integers 2m for clock-pair coherences, m = -3..3
_DEFAULT_LADDER = tuple((2 * m, 1.0 / 7.0) for m in range(-3, 4))


def thermal_velocity(temperature_K: float, mass_kg: float = CS_MASS_KG) -> float:
    """One-dimensional thermal speed sqrt(kT/m)."""
    if temperature_K < 0.0:
        raise ValueError("temperature_K must be nonnegative")
    if mass_kg <= 0.0:
        raise ValueError("mass_kg must be positive")
    return math.sqrt(K_BOLTZMANN * temperature_K / mass_kg)


def transit_time(radius_m: float, velocity_m_s: float) -> float:
    """Evanescent-field dwell time tau_1 = 2 r / v."""
    if radius_m <= 0.0 or velocity_m_s <= 0.0:
        raise ValueError("radius and velocity must be positive")
    return 2.0 * radius_m / velocity_m_s


def motional_dephasing_time(
    wavelength_m: float, angle_rad: float, velocity_m_s: float
) -> float:
    """Spin-wave grating washout time tau_2 = 1 / ((4 pi/lambda) sin(a/2) v).

    The grating pitch is set by the probe/control wavevector mismatch
    2 k sin(a/2).  A zero angle means copropagating beams and no grating,
    returned as an infinite-lifetime sentinel.
    """
    if not 0.0 <= angle_rad < math.pi:
        raise ValueError("angle_rad must lie in [0, pi)")
    if velocity_m_s <= 0.0:
        raise ValueError("velocity must be positive")
    if angle_rad == 0.0:
        return math.inf
    dk = (4.0 * math.pi / wavelength_m) * math.sin(0.5 * angle_rad)
    return 1.0 / (dk * velocity_m_s)


def zeeman_dephasing_time(broadening_Hz: float) -> float:
    """Inhomogeneous Zeeman dephasing time tau_3 = 1 / broadening.

    Plain reciprocal convention, so 100 kHz of spread maps to 10 us.
    Zero broadening returns an infinite-lifetime sentinel.
    """
    if broadening_Hz < 0.0:
        raise ValueError("broadening_Hz must be nonnegative")
    if broadening_Hz == 0.0:
        return math.inf
    return 1.0 / broadening_Hz


def combined_dephasing(tau2_s: float, tau3_s: float) -> float:
    """Quadrature combination 1/tau_D^2 = 1/tau_2^2 + 1/tau_3^2."""
    if tau2_s <= 0.0 or tau3_s <= 0.0:
        raise ValueError("times must be positive")
    if math.isinf(tau2_s) and math.isinf(tau3_s):
        return math.inf
    inv2 = 0.0 if math.isinf(tau2_s) else tau2_s**-2
    inv3 = 0.0 if math.isinf(tau3_s) else tau3_s**-2
    return (inv2 + inv3) ** -0.5


def efficiency_decay(t_s, tau_D_s: float, tau_T_s: float) -> np.ndarray:
    """Relative retrieval efficiency after a storage time t.

    exp[-(t/tau_D)^2/(1+(t/tau_T)^2)] / (1+(t/tau_T)^2)^2, equal to 1 at
    t=0 and strictly decreasing.  Infinite sentinels disable the
    corresponding mechanism.
    """
    t = np.asarray(t_s, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t_s must be nonnegative")
    if tau_D_s <= 0.0 or tau_T_s <= 0.0:
        raise ValueError("time constants must be positive")
    xt2 = np.zeros_like(t) if math.isinf(tau_T_s) else (t / tau_T_s) ** 2
    xd2 = np.zeros_like(t) if math.isinf(tau_D_s) else (t / tau_D_s) ** 2
    out = np.exp(-xd2 / (1.0 + xt2)) / (1.0 + xt2) ** 2
    if np.isscalar(t_s) or out.ndim == 0:
        return float(out)
    return out


def half_larmor_period(b_field_T: float, g_f: float = CS_GF_GROUND) -> float:
    """Half of the Larmor precession period, 1/(2 g_F mu_B B / h)."""
    if b_field_T <= 0.0:
        raise ValueError("b_field_T must be positive")
    if g_f <= 0.0:
        raise ValueError("g_f must be positive")
    return 1.0 / (2.0 * g_f * MU_BOHR * b_field_T / H_PLANCK)


@dataclass(frozen=True)
class DecoherenceParams:
    """Physical inputs of the lifetime model.

    tau_T_s and tau_D_s may be supplied directly (fit results); left as
    None they are derived from the physical fields.
    """

    temperature_K: float = 200e-6
    atom_mass_kg: float = CS_MASS_KG
    fiber_radius_m: float = 200e-9
    wavelength_m: float = 852e-9
    control_angle_rad: float = math.radians(13.0)
    zeeman_broadening_Hz: float = 1e5
    tau_T_s: float | None = None
    tau_D_s: float | None = None

    def __post_init__(self):
        for name in (
            "temperature_K", "atom_mass_kg", "fiber_radius_m", "wavelength_m",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.control_angle_rad < math.pi:
            raise ValueError("control_angle_rad must lie in [0, pi)")
        if self.zeeman_broadening_Hz < 0.0:
            raise ValueError("zeeman_broadening_Hz must be nonnegative")
        for name in ("tau_T_s", "tau_D_s"):
            v = getattr(self, name)
            if v is not None and v <= 0.0:
                raise ValueError(f"{name} must be positive when supplied")

    @property
    def velocity_m_s(self) -> float:
        return thermal_velocity(self.temperature_K, self.atom_mass_kg)

    @property
    def effective_tau_T_s(self) -> float:
        if self.tau_T_s is not None:
            return self.tau_T_s
        return transit_time(self.fiber_radius_m, self.velocity_m_s)

    @property
    def effective_tau_D_s(self) -> float:
        if self.tau_D_s is not None:
            return self.tau_D_s
        tau2 = motional_dephasing_time(
            self.wavelength_m, self.control_angle_rad, self.velocity_m_s
        )
        tau3 = zeeman_dephasing_time(self.zeeman_broadening_Hz)
        return combined_dephasing(tau2, tau3)


@dataclass(frozen=True)
class MagneticScenario:
    """Longitudinal field plus the populated coherence ladder.

    m_populations lists (phase integer, weight) pairs; each coherence
    accumulates phase integer * 2 pi nu_L t.  The default ladder holds
    the seven clock-pair coherences at even integers 2m, m = -3..3,
    equally weighted, which rephase at every half Larmor period.
    """

    b_field_T: float = 0.4e-4
    g_f: float = CS_GF_GROUND
    m_populations: tuple = field(default_factory=lambda: _DEFAULT_LADDER)

    def __post_init__(self):
        if self.b_field_T < 0.0:
            raise ValueError("b_field_T must be nonnegative")
        if self.g_f <= 0.0:
            raise ValueError("g_f must be positive")
        pops = tuple((int(m), float(w)) for m, w in self.m_populations)
        object.__setattr__(self, "m_populations", pops)
        if any(w < 0.0 for _, w in pops):
            raise ValueError("population weights must be nonnegative")
        total = sum(w for _, w in pops)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("population weights must sum to 1")


def revival_envelope(
    t_grid, scenario: MagneticScenario, params: DecoherenceParams
) -> np.ndarray:
    """Relative efficiency curve with Larmor collapses and revivals.

    eta_rel(t) = |sum_m w_m exp(i m 2 pi nu_L t)|^2 * efficiency_decay(t),
    bounded above by the field-free decay with equality at rephasing
    times.  At B=0 the interference factor is identically 1.
    """
    t = np.asarray(t_grid, dtype=float)
    nu_larmor = scenario.g_f * MU_BOHR * scenario.b_field_T / H_PLANCK
    amp = np.zeros_like(t, dtype=complex)
    for m, w in scenario.m_populations:
        amp += w * np.exp(1j * m * 2.0 * np.pi * nu_larmor * t)
    comb = np.abs(amp) ** 2
    decay = efficiency_decay(t, params.effective_tau_D_s, params.effective_tau_T_s)
    out = comb * decay
    if np.isscalar(t_grid) or out.ndim == 0:
        return float(out)
    return out
