import numpy as np
import pytest

import hyperdecay as hd
from hyperdecay.presets import damped_wave_stack, em_elastic_stack, mgt_stack
from hyperdecay.solver import (DataSpec, RingProfile, ZeroProfile, _propagate_companion,
                               _propagate_lagrange, gaussian_data, sobolev_norm)
from hyperdecay.symbols import full_symbol_at
from tests.test_stability import random_interlaced_stack


def test_damped_wave_closed_form():
    stack = damped_wave_stack()
    got = hd.propagate_mode(stack, np.array([0.3]), [1.0, 0.0], 1.0, 0)
    ref = 1.125 * np.exp(-0.1) - 0.125 * np.exp(-0.9)
    assert abs(got - ref) < 1e-10


def test_initial_conditions_reproduced(rng):
    stack = em_elastic_stack()
    data = rng.normal(size=5) + 1j * rng.normal(size=5)
    xi = np.array([0.37, -0.2, 0.11])
    for k in range(5):
        got = hd.propagate_mode(stack, xi, data, 0.0, k)
        assert abs(got - data[k]) < 1e-9 * (1 + abs(data[k]))


def test_mgt_origin_ode_solution():
    stack = mgt_stack()
    for t in [0.3, 1.0, 4.0, 9.0]:
        got = hd.propagate_mode(stack, np.zeros(3), [0.0, 0.0, 1.0], t, 0)
        assert abs(got - (t - 1 + np.exp(-t))) < 1e-10


def test_path_agreement_random(rng):
    """Exponential-sum vs companion-exponential on 1000 samples away from confluence."""
    checked = 0
    while checked < 1000:
        m = int(rng.integers(2, 6))
        ell = 1 if m == 2 else int(rng.integers(1, 3))
        stack = random_interlaced_stack(rng, m, ell)
        for _ in range(10):
            rho = 10.0 ** rng.uniform(-2, 2)
            xi = np.array([rho if rng.uniform() < 0.5 else -rho])
            poly = full_symbol_at(stack, xi)
            lams = hd.roots(poly)
            diff = np.abs(lams[:, None] - lams[None, :])
            np.fill_diagonal(diff, np.inf)
            gap = float(np.min(diff))
            if gap < 1e-3 * (1 + np.max(np.abs(lams))):
                continue
            data = rng.normal(size=m) + 1j * rng.normal(size=m)
            t = rng.uniform(0.0, 10.0)
            k = int(rng.integers(0, m))
            a = _propagate_lagrange(lams, data, np.array([t]), k)[0]
            b = _propagate_companion(poly.array(), data, np.array([t]), k)[0]
            denom = max(abs(a), abs(b))
            if denom > 1e-250:
                assert abs(a - b) <= 1e-8 * denom, (m, rho, t, k)
            checked += 1
            if checked >= 1000:
                break


def test_paths_agree_near_confluence_window(rng):
    # roots separated by a gap in [1e-5, 1e-3] must still agree to 1e-8 relative
    for _ in range(50):
        gap = 10.0 ** rng.uniform(-5, -3)
        lams = np.array([-1.0 + 0j, -1.0 + gap + 0j, -0.3 + 0.9j])
        coeffs = np.polynomial.polynomial.polyfromroots(lams)
        data = rng.normal(size=3) + 1j * rng.normal(size=3)
        t = rng.uniform(0.0, 5.0)
        a = _propagate_lagrange(lams, data, np.array([t]), 0)[0]
        b = _propagate_companion(coeffs, data, np.array([t]), 0)[0]
        assert abs(a - b) <= 1e-8 * max(abs(a), abs(b), 1e-30)


def test_ode_residual_by_finite_differences(rng):
    """High-order local differentiation of the propagated mode satisfies the symbol ODE."""
    for _ in range(20):
        m = int(rng.integers(2, 5))
        ell = 1 if m == 2 else int(rng.integers(1, 3))
        stack = random_interlaced_stack(rng, m, ell)
        rho = 10.0 ** rng.uniform(-0.5, 0.3)
        xi = np.array([rho])
        q = full_symbol_at(stack, xi).array()
        lams = hd.roots(full_symbol_at(stack, xi))
        scale_lam = 1.0 + np.max(np.abs(lams))
        data = rng.normal(size=m) + 1j * rng.normal(size=m)
        t0 = rng.uniform(0.5, 3.0)
        h = 0.02 / scale_lam
        ts = t0 + h * np.arange(-6, 7)
        vals = np.array([hd.propagate_mode(stack, xi, data, t, 0) for t in ts])
        # local polynomial model of degree 8, differentiated at the center
        tloc = (ts - t0) / h
        fit = np.polynomial.polynomial.polyfit(tloc, vals, 8)
        derivs = []
        c = fit.copy()
        for r in range(m + 1):
            derivs.append(np.polynomial.polynomial.polyval(0.0, c) / h**r)
            c = np.polynomial.polynomial.polyder(c)
        resid = sum(q[r] * derivs[r] for r in range(m + 1))
        scale = sum(abs(q[r]) * scale_lam**r for r in range(m + 1)) * max(1.0, abs(vals[6]))
        assert abs(resid) < 1e-6 * scale


def test_sobolev_norm_gaussian():
    rho = np.geomspace(1e-4, 30, 120000)
    val = sobolev_norm(3, rho, np.exp(-(rho**2) / 2), 0.0)
    assert val == pytest.approx(np.pi**0.75, rel=1e-6)


def test_sobolev_norm_zero():
    rho = np.geomspace(1e-2, 10, 100)
    assert sobolev_norm(2, rho, np.zeros(100), 1.0) == 0.0


def test_sobolev_norm_window():
    rho = np.concatenate([np.geomspace(1e-2, 1.0, 6000), np.geomspace(1.0, 2.0, 6000)[1:],
                          np.geomspace(2.0, 100.0, 6000)[1:]])
    snap = np.where((rho >= 1.0) & (rho <= 2.0), 1.0 / rho, 0.0)
    assert sobolev_norm(1, rho, snap, 1.0) == pytest.approx(np.sqrt(2.0), abs=2e-3)


def test_sobolev_tail_check_raises():
    rho = np.geomspace(0.1, 10, 500)
    with pytest.raises(ValueError, match="extend the radial grid"):
        sobolev_norm(1, rho, np.ones(500), 0.0)


def test_simulate_mgt_slope(stacks):
    times = np.geomspace(1e2, 1e4, 25)
    series = hd.simulate(stacks["mgt"], gaussian_data(3, 2), times, 0, 0.0)
    assert abs(series.fitted_slope + 0.25) <= 0.05


def test_simulate_matches_preset_fixtures(stacks):
    # every wired sim fixture fits its predicted slope within 0.05 (0.07 for m = 5)
    from hyperdecay.presets import PRESETS

    times = np.geomspace(1e2, 1e4, 25)
    for name in ("blackstock_crighton", "mgt_classical_damping"):
        cfg = PRESETS[name].expected["sim"]
        series = hd.simulate(stacks[name], gaussian_data(stacks[name].m, cfg["slot"]),
                             times, cfg["k"], cfg["s"])
        assert abs(series.fitted_slope - cfg["slope"]) <= cfg["tol"], name


def test_simulate_fourth_order_quarter_scale(stacks):
    times = np.geomspace(1e2, 1e4, 25)
    series = hd.simulate(stacks["fourth_order_weak"], gaussian_data(4, 3), times, 0, 1.0)
    assert abs(series.fitted_slope + 0.125) <= 0.05


def test_simulate_zero_data_flag(stacks):
    data = DataSpec(tuple([ZeroProfile()] * 3))
    series = hd.simulate(stacks["mgt"], data, np.geomspace(1.0, 10.0, 5), 0, 0.0)
    assert np.isnan(series.fitted_slope)
    assert any("all-zero" in f for f in series.flags)


def test_ring_profile_data(stacks):
    data = DataSpec((ZeroProfile(), ZeroProfile(), RingProfile(1.0, 0.2)))
    series = hd.simulate(stacks["mgt"], data, np.geomspace(1.0, 100.0, 7), 0, 0.0)
    assert np.all(series.values > 0)
    assert series.values[-1] < series.values[0]


def test_propagate_mode_validates_data_length(stacks):
    with pytest.raises(ValueError):
        hd.propagate_mode(stacks["mgt"], np.array([0.1, 0, 0]), [1.0, 0.0], 1.0)


def test_simulate_anisotropic_direction_average(stacks):
    from hyperdecay.stability import sample_directions

    stack = stacks["anisotropic_elastic_2d"]
    data = gaussian_data(4, 3)
    rho = np.geomspace(1e-3, 30.0, 700)
    times = np.geomspace(10.0, 1000.0, 5)
    dirs = sample_directions(2)[::32]  # 8 angles are enough for a smoke check
    series = hd.simulate(stack, data, times, 0, 2.0, rho_grid=rho, directions=dirs)
    assert np.all(np.diff(series.values) < 0)
    slope, _ = (series.fitted_slope, series.slope_stderr)
    assert -0.7 < slope < -0.3  # half-power family rate at k+s = 2, n = 2


def test_grid_profile_roundtrip(stacks):
    rho = np.geomspace(1e-3, 30.0, 400)
    vals = np.exp(-(rho**2))
    data = DataSpec((ZeroProfile(), ZeroProfile(),
                     hd.GridProfile(tuple(vals.tolist()), zero_value=1.0)))
    series = hd.simulate(stacks["mgt"], data, np.array([10.0, 1000.0]), 0, 0.0, rho_grid=rho)
    assert series.values[1] < series.values[0]
    with pytest.raises(ValueError):
        hd.simulate(stacks["mgt"], data, np.array([1.0]), 0, 0.0)  # misaligned grid
