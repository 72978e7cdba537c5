"""Fundamental-mode solver tests.

Frozen oracle values were computed with this solver after validating it
against machine-precision tangential-field continuity, pointwise Maxwell
curl residuals inside and outside the core, and the scalar LP01 power
integral in the weak-guidance limit (agreement 3e-4 at delta-n = 5e-4).
"""

import math

import numpy as np
import pytest

from fibermem.waveguide import (
    EmptyScanError,
    FiberSpec,
    GuidedMode,
    NoGuidedModeError,
    V_SINGLE_MODE,
    evanescent_fraction,
    mode_intensity,
    solve_he11,
    surface_intensity_scan,
)

SPEC_400 = FiberSpec(radius_m=200e-9, wavelength_m=852e-9)

# frozen solver outputs for the 400 nm / 852 nm reference geometry
N_EFF_400 = 1.06897949839866
EVAN_FRAC_400 = 0.592576832568


def test_reference_geometry_frozen_values():
    mode = solve_he11(SPEC_400)
    assert mode.n_eff == pytest.approx(N_EFF_400, rel=1e-9)
    assert mode.evanescent_fraction == pytest.approx(EVAN_FRAC_400, rel=1e-6)
    assert mode.v_number == pytest.approx(1.5537604732315082, rel=1e-12)
    assert not mode.multi_mode


def test_residual_below_tolerance():
    mode = solve_he11(SPEC_400)
    assert mode.residual < 1e-10


def test_effective_index_bounds_and_beta():
    mode = solve_he11(SPEC_400)
    assert SPEC_400.cladding_index < mode.n_eff < SPEC_400.core_index
    k0 = 2.0 * math.pi / SPEC_400.wavelength_m
    assert mode.beta_per_m == pytest.approx(mode.n_eff * k0, rel=1e-14)


def test_solver_deterministic():
    m1 = solve_he11(SPEC_400)
    m2 = solve_he11(SPEC_400)
    assert m1.n_eff == m2.n_eff
    assert m1.evanescent_fraction == m2.evanescent_fraction
    assert m1.beta_per_m == m2.beta_per_m


def test_evanescent_fraction_op_matches_mode():
    mode = solve_he11(SPEC_400)
    assert evanescent_fraction(mode) == pytest.approx(
        mode.evanescent_fraction, abs=1e-12
    )
    assert 0.0 < mode.evanescent_fraction < 1.0


def test_thick_fiber_limit():
    mode = solve_he11(FiberSpec(radius_m=1e-6, wavelength_m=852e-9))
    assert mode.evanescent_fraction < 0.05
    assert mode.n_eff > 1.40
    assert mode.multi_mode


def test_neff_increases_fraction_decreases_with_radius():
    radii = np.linspace(125e-9, 400e-9, 10)
    neff = []
    frac = []
    for r in radii:
        m = solve_he11(FiberSpec(radius_m=r, wavelength_m=852e-9))
        neff.append(m.n_eff)
        frac.append(m.evanescent_fraction)
    assert np.all(np.diff(neff) > 0.0)
    assert np.all(np.diff(frac) < 0.0)


def test_fraction_approaches_one_near_guidance_collapse():
    fr = [
        solve_he11(FiberSpec(radius_m=r, wavelength_m=852e-9)).evanescent_fraction
        for r in [150e-9, 120e-9, 95e-9, 80e-9]
    ]
    assert np.all(np.diff(fr) > 0.0)
    assert fr[-1] > 0.999


def test_no_mode_error_when_decay_underflows():
    with pytest.raises(NoGuidedModeError):
        solve_he11(FiberSpec(radius_m=40e-9, wavelength_m=852e-9))


def test_spec_validation():
    with pytest.raises(ValueError):
        FiberSpec(radius_m=-1e-9, wavelength_m=852e-9)
    with pytest.raises(ValueError):
        FiberSpec(radius_m=200e-9, wavelength_m=0.0)
    with pytest.raises(ValueError):
        FiberSpec(radius_m=200e-9, wavelength_m=852e-9, core_index=0.9)


def test_intensity_normalization_independent_quadrature():
    mode = solve_he11(SPEC_400)
    a = SPEC_400.radius_m
    q = mode.cladding_decay_per_m
    rho = np.linspace(0.0, a + 40.0 / (2.0 * q), 400001)
    total = np.trapezoid(mode.intensity_profile(rho) * 2.0 * np.pi * rho, rho)
    assert total == pytest.approx(1.0, abs=1e-5)


def test_mode_intensity_matches_profile():
    mode = solve_he11(SPEC_400)
    rho = np.array([0.0, 1e-7, 3e-7, 8e-7])
    assert np.array_equal(mode_intensity(mode, rho), mode.intensity_profile(rho))
    assert mode_intensity(mode, 3e-7) == pytest.approx(
        float(mode.intensity_profile(3e-7))
    )


def test_boundary_jump_is_bounded_dielectric_discontinuity():
    mode = solve_he11(SPEC_400)
    a = SPEC_400.radius_m
    inner = mode.intensity_profile(a * (1.0 - 1e-12))
    outer = mode.intensity_profile(a * (1.0 + 1e-12))
    assert inner > 0.0 and outer > 0.0
    # jump driven by the normal-field discontinuity, at most (n1/n2)^4
    assert 1.0 < outer / inner < (SPEC_400.core_index / SPEC_400.cladding_index) ** 4


def test_cladding_decay_constant_matches_beta():
    # rho*I(rho) ~ exp(-2 q rho) for q rho >> 1, prefactor-corrected decay
    mode = solve_he11(SPEC_400)
    a = SPEC_400.radius_m
    k0 = 2.0 * math.pi / SPEC_400.wavelength_m
    q_from_beta = math.sqrt(mode.beta_per_m**2 - k0**2)
    lo, hi = 8.0 * a, 12.0 * a
    slope = (
        math.log(hi * mode.intensity_profile(hi))
        - math.log(lo * mode.intensity_profile(lo))
    ) / (hi - lo)
    assert slope == pytest.approx(-2.0 * q_from_beta, rel=0.01)
    assert mode.cladding_decay_per_m == pytest.approx(q_from_beta, rel=1e-12)


def test_far_field_suppression():
    mode = solve_he11(SPEC_400)
    a = SPEC_400.radius_m
    ratio = mode.intensity_profile(10.0 * a) / mode.intensity_profile(a * (1.0 + 1e-12))
    assert ratio < 1e-3


def test_scan_argmax_and_content():
    scan = surface_intensity_scan(852e-9, np.arange(300e-9, 501e-9, 5e-9))
    assert scan.argmax_diameter_m == pytest.approx(380e-9, abs=1e-12)
    assert scan.diameters_m.shape == scan.surface_intensity_w_m2.shape
    assert np.all(scan.surface_intensity_w_m2 > 0.0)
    assert np.all(np.diff(scan.diameters_m) > 0.0)


def test_scan_power_scaling():
    d = np.arange(340e-9, 441e-9, 10e-9)
    s1 = surface_intensity_scan(852e-9, d, power_w=1.0)
    s2 = surface_intensity_scan(852e-9, d, power_w=2.0)
    assert np.array_equal(s2.surface_intensity_w_m2, 2.0 * s1.surface_intensity_w_m2)
    assert s2.argmax_diameter_m == s1.argmax_diameter_m


def test_scan_drops_unguided_and_empty_errors():
    scan = surface_intensity_scan(852e-9, np.array([60e-9, 400e-9]))
    assert scan.diameters_m.tolist() == [400e-9]
    with pytest.raises(EmptyScanError):
        surface_intensity_scan(852e-9, np.array([40e-9, 60e-9]))


def test_v_number_single_mode_flag():
    assert solve_he11(FiberSpec(radius_m=400e-9, wavelength_m=852e-9)).multi_mode
    assert V_SINGLE_MODE == pytest.approx(2.405)
