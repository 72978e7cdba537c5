"""Exact fundamental-mode solver for a vacuum-clad step-index cylinder.

Solves the full-vector HE11 dispersion relation of a two-layer fiber
(silica core, infinite vacuum cladding) without the weak-guidance
approximation, then builds the azimuthally averaged longitudinal
Poynting flux S_z(rho) of the mode.  From that profile the module
derives the quantities a subwavelength waveguide experiment cares
about: the fraction of guided power carried by the evanescent field
and the surface intensity reached for a given guided power.

Conventions
-----------
Fields vary as exp(i(omega t - beta z)).  With u = h a and w = q a,
where h and q are the transverse wavenumbers inside and outside the
core of radius a, the azimuthal-order-1 hybrid modes satisfy

    (J + K) (J + (n2/n1)^2 K) = (beta/(k0 n1))^2 (1/u^2 + 1/w^2)^2

with J = J1'(u)/(u J1(u)) and K = K1'(w)/(w K1(w)).  The HE branch is
the root of

    g = J + (1 + sbar)/2 K + sqrt(((1 - sbar)/2 K)^2 + R)

with sbar = (n2/n1)^2 and R the right-hand side above.  All integrals
use fixed-order Gauss-Legendre panels so results are bit-identical
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import jv, jvp, kv, kvp

from .constants import C_LIGHT, EPSILON_0, MU_0, SILICA_INDEX_852NM

# Single-mode boundary of the two-layer cylinder (TE01 cutoff)
V_SINGLE_MODE = 2.405

# Gauss-Legendre order per radial panel
_QUAD_ORDER = 96
# Cladding integration reaches exp(-_CLAD_FOLDS) suppression of the field
_CLAD_FOLDS = 40.0


class NoGuidedModeError(RuntimeError):
    """The requested geometry guides no bound fundamental mode."""


class EmptyScanError(RuntimeError):
    """No diameter in the scan produced a guided mode."""


@dataclass(frozen=True)
class FiberSpec:
    """Geometry and material of the waveguide.

    Parameters
    ----------
    radius_m : float
        Core radius in meters.
    wavelength_m : float
        Vacuum wavelength of the guided light in meters.
    core_index : float
        Refractive index of the core.
    cladding_index : float
        Refractive index of the surrounding medium (vacuum by default).
    """

    radius_m: float
    wavelength_m: float
    core_index: float = SILICA_INDEX_852NM
    cladding_index: float = 1.0

    def __post_init__(self):
        if self.radius_m <= 0.0:
            raise ValueError("radius_m must be positive")
        if self.wavelength_m <= 0.0:
            raise ValueError("wavelength_m must be positive")
        if self.core_index <= self.cladding_index:
            raise ValueError("core_index must exceed cladding_index")

    @property
    def v_number(self) -> float:
        k0 = 2.0 * math.pi / self.wavelength_m
        return k0 * self.radius_m * math.sqrt(
            self.core_index**2 - self.cladding_index**2
        )


@dataclass(frozen=True)
class GuidedMode:
    """Solved fundamental mode of a FiberSpec.

    Attributes
    ----------
    spec : FiberSpec
        Geometry the mode was solved for.
    n_eff : float
        Effective index, strictly between the cladding and core indices.
    beta_per_m : float
        Propagation constant n_eff * 2 pi / wavelength.
    v_number : float
        Normalized frequency of the geometry.
    evanescent_fraction : float
        Share of the guided power flowing outside the core.
    cladding_decay_per_m : float
        Transverse decay constant q of the outer field.
    residual : float
        Characteristic-equation residual at the returned root.
    multi_mode : bool
        True when the geometry also guides higher-order modes.
    intensity_profile : callable
        rho (m) -> azimuthally averaged S_z, normalized to unit power
        (units 1/m^2).  Accepts scalars or arrays.
    """

    spec: FiberSpec
    n_eff: float
    beta_per_m: float
    v_number: float
    evanescent_fraction: float
    cladding_decay_per_m: float
    residual: float
    multi_mode: bool
    intensity_profile: Callable[[np.ndarray], np.ndarray]


def _char_residual(spec: FiberSpec, n_eff) -> float:
    """HE-branch characteristic function, zero at a guided mode."""
    n_eff = np.asarray(n_eff, dtype=float)
    a = spec.radius_m
    k0 = 2.0 * math.pi / spec.wavelength_m
    n1 = spec.core_index
    n2 = spec.cladding_index
    u = k0 * a * np.sqrt(n1**2 - n_eff**2)
    w = k0 * a * np.sqrt(n_eff**2 - n2**2)
    jterm = jvp(1, u) / (u * jv(1, u))
    kterm = kvp(1, w) / (w * kv(1, w))
    sbar = (n2 / n1) ** 2
    rhs = (n_eff / n1) ** 2 * (1.0 / u**2 + 1.0 / w**2) ** 2
    g = jterm + 0.5 * (1.0 + sbar) * kterm + np.sqrt(
        (0.5 * (1.0 - sbar) * kterm) ** 2 + rhs
    )
    return float(g) if g.ndim == 0 else g


def solve_he11(spec: FiberSpec) -> GuidedMode:
    """Solve the HE11 mode of `spec`.

    Brackets the characteristic root on a fixed grid of effective
    indices, bisects the bracket down to 1e-12, then polishes with a
    few secant steps.  Raises NoGuidedModeError when no sign change
    exists, which for this geometry only happens through float
    underflow of the mode's decay constant.
    """
    n1 = spec.core_index
    n2 = spec.cladding_index
    lo = n2 + 1e-9
    hi = n1 - 1e-9
    grid = np.linspace(lo, hi, 1024)
    vals = _char_residual(spec, grid)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if flips.size == 0:
        raise NoGuidedModeError(
            f"no bound fundamental mode for radius {spec.radius_m:.3e} m "
            f"at {spec.wavelength_m:.3e} m (V = {spec.v_number:.3f})"
        )
    # fundamental = largest effective index
    i = int(flips[-1])
    a_lo, a_hi = grid[i], grid[i + 1]
    f_lo = vals[i]
    while a_hi - a_lo > 1e-12:
        mid = 0.5 * (a_lo + a_hi)
        f_mid = _char_residual(spec, mid)
        if f_lo * f_mid <= 0.0:
            a_hi = mid
        else:
            a_lo, f_lo = mid, f_mid
    # secant polish
    x0, x1 = a_lo, a_hi
    f0, f1 = _char_residual(spec, x0), _char_residual(spec, x1)
    for _ in range(8):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (n2 < x2 < n1):
            break
        x0, f0, x1, f1 = x1, f1, x2, _char_residual(spec, x2)
        if abs(f1) < 1e-14:
            break
    n_eff = x1 if abs(f1) < abs(f0) else x0
    return _build_mode(spec, n_eff)


def _field_coefficients(spec: FiberSpec, n_eff: float):
    """Reduced real field coefficients shared by profile and power."""
    a = spec.radius_m
    k0 = 2.0 * math.pi / spec.wavelength_m
    omega = k0 * C_LIGHT
    n1 = spec.core_index
    n2 = spec.cladding_index
    beta = n_eff * k0
    h = k0 * math.sqrt(n1**2 - n_eff**2)
    q = k0 * math.sqrt(n_eff**2 - n2**2)
    u = h * a
    w = q * a
    jterm = jvp(1, u) / (u * jv(1, u))
    kterm = kvp(1, w) / (w * kv(1, w))
    # hybrid-mode polarization parameter, H_z = i A (beta/(omega mu0)) s J1
    s_par = (1.0 / u**2 + 1.0 / w**2) / (jterm + kterm)
    c_out = jv(1, u) / kv(1, w)
    return dict(
        a=a, omega=omega, beta=beta, h=h, q=q, s_par=s_par, c_out=c_out,
        n1=n1, n2=n2,
    )


def _sz_unnormalized(par: dict, rho: np.ndarray) -> np.ndarray:
    """Azimuthally averaged longitudinal Poynting flux, arbitrary units."""
    rho = np.asarray(rho, dtype=float)
    beta = par["beta"]
    omega = par["omega"]
    s = par["s_par"]
    out = np.zeros_like(rho)
    inside = rho <= par["a"]
    # core, regular at rho=0: J1(hr)/r -> h/2
    r_in = rho[inside]
    h = par["h"]
    x = h * r_in
    j1 = jv(1, x)
    j1p = jvp(1, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        j1_over_r = np.where(r_in > 0.0, j1 / np.where(r_in > 0.0, r_in, 1.0), h / 2.0)
    x1 = (beta / h**2) * (h * j1p - s * j1_over_r)
    x2 = (beta / h**2) * (j1_over_r - s * h * j1p)
    y1 = (1.0 / h**2) * (
        omega * EPSILON_0 * par["n1"] ** 2 * h * j1p - beta**2 * s * j1_over_r / (omega * MU_0)
    )
    y2 = (1.0 / h**2) * (
        beta**2 * s * h * j1p / (omega * MU_0) - omega * EPSILON_0 * par["n1"] ** 2 * j1_over_r
    )
    out[inside] = 0.5 * (x1 * y1 - x2 * y2)
    # cladding, evanescent
    r_out = rho[~inside]
    if r_out.size:
        q = par["q"]
        c = par["c_out"]
        xo = q * r_out
        k1 = kv(1, xo)
        k1p = kvp(1, xo)
        k1_over_r = k1 / r_out
        x1c = (c * beta / q**2) * (q * k1p - s * k1_over_r)
        x2c = (c * beta / q**2) * (k1_over_r - s * q * k1p)
        y1c = (c / q**2) * (
            omega * EPSILON_0 * par["n2"] ** 2 * q * k1p - beta**2 * s * k1_over_r / (omega * MU_0)
        )
        y2c = (c / q**2) * (
            beta**2 * s * q * k1p / (omega * MU_0) - omega * EPSILON_0 * par["n2"] ** 2 * k1_over_r
        )
        out[~inside] = 0.5 * (x1c * y1c - x2c * y2c)
    return out


def _panel_nodes(edges: np.ndarray):
    """Gauss-Legendre nodes and weights over consecutive [edges] panels."""
    xg, wg = np.polynomial.legendre.leggauss(_QUAD_ORDER)
    nodes = []
    weights = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(0.5 * (hi + lo) + half * xg)
        weights.append(half * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def _build_mode(spec: FiberSpec, n_eff: float) -> GuidedMode:
    par = _field_coefficients(spec, n_eff)
    a = spec.radius_m
    q = par["q"]
    # radial power integrals P = int S_z 2 pi rho drho on fixed panels
    r_core, w_core = _panel_nodes(np.array([0.0, 0.5 * a, a]))
    reach = _CLAD_FOLDS / (2.0 * q)
    edges = a + reach * np.array([0.0, 0.05, 0.2, 0.5, 1.0])
    r_clad, w_clad = _panel_nodes(edges)
    p_core = float(np.sum(_sz_unnormalized(par, r_core) * 2.0 * np.pi * r_core * w_core))
    p_clad = float(np.sum(_sz_unnormalized(par, r_clad) * 2.0 * np.pi * r_clad * w_clad))
    p_tot = p_core + p_clad
    if p_tot <= 0.0:
        raise NoGuidedModeError("mode power integral is not positive")
    sign = 1.0
    if p_core < 0.0:
        # overall field sign is arbitrary, flux is not
        sign = -1.0
        p_core, p_clad, p_tot = -p_core, -p_clad, -p_tot
    norm = sign / p_tot

    def intensity_profile(rho):
        rho_arr = np.asarray(rho, dtype=float)
        vals = _sz_unnormalized(par, rho_arr) * norm
        if np.isscalar(rho) or rho_arr.ndim == 0:
            return float(vals)
        return vals

    k0 = 2.0 * math.pi / spec.wavelength_m
    return GuidedMode(
        spec=spec,
        n_eff=n_eff,
        beta_per_m=n_eff * k0,
        v_number=spec.v_number,
        evanescent_fraction=p_clad / p_tot,
        cladding_decay_per_m=q,
        residual=abs(_char_residual(spec, n_eff)),
        multi_mode=spec.v_number >= V_SINGLE_MODE,
        intensity_profile=intensity_profile,
    )


def mode_intensity(mode: GuidedMode, rho_m) -> np.ndarray:
    """Normalized azimuthally averaged intensity at radius rho_m."""
    return mode.intensity_profile(rho_m)


def evanescent_fraction(mode: GuidedMode) -> float:
    """Fraction of guided power outside the core, from the mode profile."""
    a = mode.spec.radius_m
    q = mode.cladding_decay_per_m
    reach = _CLAD_FOLDS / (2.0 * q)
    edges = a + reach * np.array([0.0, 0.05, 0.2, 0.5, 1.0])
    r, w = _panel_nodes(edges)
    return float(np.sum(mode.intensity_profile(r) * 2.0 * np.pi * r * w))


@dataclass(frozen=True)
class ScanResult:
    """Surface-intensity scan over fiber diameters at fixed power."""

    wavelength_m: float
    power_w: float
    diameters_m: np.ndarray
    surface_intensity_w_m2: np.ndarray
    n_eff: np.ndarray
    evanescent_fractions: np.ndarray
    argmax_diameter_m: float


def surface_intensity_scan(
    wavelength_m: float,
    diameters_m,
    power_w: float = 1.0,
    core_index: float = SILICA_INDEX_852NM,
) -> ScanResult:
    """Scan the evanescent surface intensity against fiber diameter.

    For each diameter, solves the fundamental mode and evaluates the
    power-normalized intensity just outside the surface times the
    guided power.  Diameters that guide no mode are dropped from the
    result.  The scan is a pure per-diameter map, safe to parallelize,
    and evaluated here in input order for deterministic output.
    """
    diameters_m = np.asarray(diameters_m, dtype=float)
    kept_d = []
    kept_i = []
    kept_n = []
    kept_f = []
    for d in diameters_m:
        spec = FiberSpec(radius_m=0.5 * d, wavelength_m=wavelength_m,
                         core_index=core_index)
        try:
            mode = solve_he11(spec)
        except NoGuidedModeError:
            continue
        rho_surf = 0.5 * d * (1.0 + 1e-12)
        kept_d.append(d)
        kept_i.append(power_w * float(mode.intensity_profile(rho_surf)))
        kept_n.append(mode.n_eff)
        kept_f.append(mode.evanescent_fraction)
    if not kept_d:
        raise EmptyScanError("no diameter in the scan guides a mode")
    kept_d = np.array(kept_d)
    kept_i = np.array(kept_i)
    return ScanResult(
        wavelength_m=wavelength_m,
        power_w=power_w,
        diameters_m=kept_d,
        surface_intensity_w_m2=kept_i,
        n_eff=np.array(kept_n),
        evanescent_fractions=np.array(kept_f),
        argmax_diameter_m=float(kept_d[int(np.argmax(kept_i))]),
    )
