import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from drwave import wavesolver as W
from drwave.cli import strichartz_ensemble
from drwave.space import density
from drwave.transform import RadialProfile, forward_sft, radial_grid, spectral_grid

import shared


@pytest.fixture(scope="module")
def data21(space21):
    r, w = radial_grid()
    lgrid, lw = spectral_grid()
    f = RadialProfile(r, np.exp(-(r**2)), space21, w)
    g = RadialProfile(r, r * np.exp(-(r**2)) / (1 + r), space21, w)
    return f, g, forward_sft(f, lgrid, lw), forward_sft(g, lgrid, lw)


def test_sobolev_plain_is_plancherel(space21, data21):
    f, _, fhat, _ = data21
    assert W.sobolev_norm(space21, fhat, 0.0, 0.0) == pytest.approx(W.lq_norm(space21, f, 2.0), rel=1e-4)


def test_sobolev_multiplier_composition(space21, data21):
    _, _, fhat, _ = data21
    s = 0.7
    lam = fhat.lgrid
    shifted = fhat.with_values((lam**2 + space21.qtilde**2 / 4) ** (s / 2) * fhat.values)
    for sigma, tau in [(0.0, 0.0), (0.5, -0.5), (-0.3, 1.0)]:
        assert W.sobolev_norm(space21, shifted, sigma, tau) == pytest.approx(
            W.sobolev_norm(space21, fhat, sigma + s, tau), rel=1e-12
        )


def test_sobolev_equivalence_with_bessel_scale(space21, data21):
    """``H^{σ,0}`` and the ``(λ² + Q²/4)^σ`` scale differ by at most the multiplier ratio."""
    _, _, fhat, ghat = data21
    lam = fhat.lgrid
    sigma = 0.8
    ratio = ((lam**2 + space21.qtilde**2 / 4) / (lam**2 + space21.Q**2 / 4)) ** sigma
    for prof in (fhat, ghat):
        bessel = W.sobolev_norm(space21, prof.with_values(np.sqrt(ratio) ** -1 * prof.values), sigma, 0.0)
        val = W.sobolev_norm(space21, prof, sigma, 0.0)
        lo, hi = np.sqrt(ratio.min()), np.sqrt(ratio.max())
        assert lo * (1 - 1e-12) <= val / bessel <= hi * (1 + 1e-12)


def test_sobolev_rejects_singular_weight(space21, data21):
    _, _, fhat, _ = data21
    with pytest.raises(W.PreconditionError):
        W.sobolev_norm(space21, fhat, 0.0, 1.5)
    with pytest.raises(W.PreconditionError):
        W.sobolev_norm(space21, fhat, 0.0, -1.5)


def test_propagate_initial_and_zero_mode(space21, data21):
    _, _, fhat, ghat = data21
    st0 = W.linear_propagate(space21, fhat, ghat, 0.0)
    assert np.array_equal(st0.uhat.values, fhat.values) and np.array_equal(st0.vhat.values, ghat.values)
    lam = np.array([0.0, 1.0])
    one = fhat.__class__(lam, np.array([2.0, 0.0]), space21, np.ones(2))
    vel = one.with_values(np.array([3.0, 0.0]))
    out = W.linear_propagate(space21, one, vel, 1.5)
    assert out.uhat.values[0] == pytest.approx(2.0 + 1.5 * 3.0, abs=1e-15)


@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_group_property(t1, t2):
    sp = shared.new_space(2, 1)
    lam = np.linspace(0, 50, 501)
    from drwave.transform import SpectralProfile

    f = SpectralProfile(lam, np.exp(-(lam**2) / 10), sp, np.full(lam.size, 0.1))
    g = f.with_values(lam * np.exp(-(lam**2) / 10))
    two = W.propagate_state(sp, W.linear_propagate(sp, f, g, t1), t2)
    one = W.linear_propagate(sp, f, g, t1 + t2)
    assert np.max(np.abs(two.uhat.values - one.uhat.values)) < 1e-12
    assert np.max(np.abs(two.vhat.values - one.vhat.values)) < 1e-12


def test_energy_conservation(space21, data21):
    _, _, fhat, ghat = data21
    e0 = W.energy(space21, W.linear_propagate(space21, fhat, ghat, 0.0))
    drift = max(
        abs(W.energy(space21, W.linear_propagate(space21, fhat, ghat, t)) - e0) / e0 for t in np.linspace(0, 100, 101)
    )
    assert drift < 1e-12


@pytest.mark.parametrize("sigma,tau", [(0.0, 0.0), (0.5, 0.5), (1.0, -0.5)])
def test_generalized_energy_conservation(space21, data21, sigma, tau):
    _, _, fhat, ghat = data21
    e0 = W.generalized_energy(space21, W.linear_propagate(space21, fhat, ghat, 0.0), sigma, tau)
    for t in (1.0, 10.0, 100.0):
        e = W.generalized_energy(space21, W.linear_propagate(space21, fhat, ghat, t), sigma, tau)
        assert e == pytest.approx(e0, rel=1e-12)


def test_energy_of_zero_state(space21, data21):
    _, _, fhat, _ = data21
    zero = fhat.with_values(np.zeros_like(fhat.values))
    assert W.energy(space21, W.WaveState(zero, zero, 0.0)) == 0.0


def test_lq_norm_scaling_and_bump(space21):
    r, w = radial_grid()
    u = RadialProfile(r, ((r > 1) & (r < 2)).astype(float), space21, w)
    for q in (1.0, 2.0, 4.0):
        exact = integrate.quad(lambda x: float(density(space21, np.array([x]))[0]), 1, 2, epsabs=0, epsrel=1e-13)[0]
        assert W.lq_norm(space21, u, q) == pytest.approx(exact ** (1 / q), rel=1e-8)
        assert W.lq_norm(space21, u.with_values(-3 * u.values), q) == pytest.approx(3 * W.lq_norm(space21, u, q), rel=1e-13)
    with pytest.raises(W.PreconditionError):
        W.lq_norm(space21, u, 0.5)


def test_duhamel_constant_forcing():
    lam = np.array([0.0, 0.5, 2.0, 7.0])
    times = np.linspace(0, 10, 101)
    d, dd = W.duhamel(lam, times, np.ones((times.size, lam.size)))
    tl = np.outer(times, lam[1:])
    assert np.allclose(d[:, 1:], (1 - np.cos(tl)) / lam[1:] ** 2, atol=1e-12)
    assert np.allclose(dd[:, 1:], np.sin(tl) / lam[1:], atol=1e-12)
    assert np.allclose(d[:, 0], times**2 / 2, atol=1e-12)


def test_duhamel_linear_forcing_exact():
    lam = np.array([0.5, 3.0])
    times = np.linspace(0, 8, 33)
    d, _ = W.duhamel(lam, times, np.outer(times, np.ones(2)))
    tl = np.outer(times, lam)
    assert np.allclose(d, (tl - np.sin(tl)) / lam**3, atol=1e-12)


def test_solve_config_validation():
    with pytest.raises(W.PreconditionError):
        W.SolveConfig(gamma=1.0)
    with pytest.raises(W.PreconditionError):
        W.SolveConfig(nonlin="cubic")
    assert W.SolveConfig(T=50).nt == 500
    with pytest.raises(W.PreconditionError):
        W.SolveConfig(pair=(4.0, 2.0)).resolve_pair(4)
    assert W.SolveConfig().resolve_pair(4) == pytest.approx((1 / 0.275, 2.5))


def test_nonlinearity_kinds():
    u = np.array([-2.0, 0.5])
    assert np.allclose(W.nonlinearity(u, 3.0, "abs_power"), [8.0, 0.125])
    assert np.allclose(W.nonlinearity(u, 3.0, "focusing_power"), [-8.0, 0.125])


def test_zero_coupling_reduces_to_linear(space21):
    f, g = W.gaussian_data(space21, 1e-3)
    cfg = W.SolveConfig(T=5.0, coupling=0.0)
    traj, diag = W.picard_solve(space21, f, g, cfg)
    lin = W.linear_trajectory(space21, f, g, 5.0, cfg.nt)
    assert diag.converged
    assert np.max(np.abs(traj.uhat - lin.uhat)) < 1e-12 * np.max(np.abs(lin.uhat))
    assert np.max(np.abs(traj.u - lin.u)) < 1e-12 * np.max(np.abs(lin.u))


def test_refined_max():
    x = np.linspace(0, 1, 11)
    samples = np.sin(3 * x)
    assert 1 - samples.max() > 1e-3
    assert abs(W.refined_max(samples) - 1.0) < 1e-5
    assert W.refined_max(np.array([3.0, 2.0, 1.0])) == 3.0
    assert W.refined_max(x) == 1.0


def test_picard_small_data():
    traj, diag = shared.picard_run(1e-3)
    assert diag.converged and not diag.diverged
    assert all(r < 0.5 for r in diag.contraction_ratios)
    assert diag.residual < 1e-8
    assert np.isfinite(diag.lq_growth) and diag.lq_growth < 2
    assert diag.alias_ok
    assert max(diag.x_norms) < 2 * diag.x_norms[0]


def test_picard_ratio_scales_with_amplitude():
    big = W.contraction_ratio(shared.picard_run(1e-3)[1])
    small = W.contraction_ratio(shared.picard_run(5e-4)[1])
    assert small < big
    assert 1 <= big / small <= 4


def test_picard_time_refinement():
    coarse = shared.picard_run(1e-3)[1].x_norms[-1]
    fine = shared.picard_run(1e-3, nt=1000)[1].x_norms[-1]
    assert abs(fine - coarse) / fine < 1e-4


@pytest.mark.slow
def test_large_amplitude_control_x1000():
    """Data scaled by 10³ should leave the small-data regime."""
    _, diag = shared.picard_run(1.0)
    assert diag.diverged or not diag.converged or diag.blowup_suspected


@pytest.mark.slow
def test_large_amplitude_control_x10000():
    _, diag = shared.picard_run(10.0)
    assert diag.diverged and diag.blowup_suspected
    assert not diag.converged and diag.message


def test_strichartz_ensemble_stable(space21):
    ens = strichartz_ensemble(space21, 20, 0, 20.0, 200, 15.0, 50.0)
    assert np.all(np.isfinite(ens["ratios"])) and np.all(ens["ratios"] > 0)
    assert ens["spread"] < 10


def test_strichartz_velocity_only(space21):
    r, w = radial_grid()
    g = RadialProfile(r, 1e-3 * np.exp(-(r**2)), space21, w)
    f = g.with_values(np.zeros_like(r))
    traj = W.linear_trajectory(space21, f, g, 10.0, 100)
    pair = (2.0, 8 / 3)
    sigma = 5 / 2 * (0.5 - 3 / 8)
    ratio = W.strichartz_ratio(space21, traj, pair, f, g, None, sigma, sigma, pair)
    assert np.isfinite(ratio) and ratio > 0


def test_strichartz_rejections(space21):
    f, g = W.gaussian_data(space21, 1e-3)
    traj = W.linear_trajectory(space21, f, g, 2.0, 20)
    pair = (2.0, 8 / 3)
    with pytest.raises(W.PreconditionError, match="below"):
        W.strichartz_ratio(space21, traj, pair, f, g, None, 0.1, 0.5, pair)
    with pytest.raises(W.PreconditionError, match="admissible"):
        W.strichartz_ratio(space21, traj, (4.0, 8.0), f, g, None, 1.0, 1.0, pair)
    zero = f.with_values(np.zeros_like(f.values))
    with pytest.raises(W.PreconditionError):
        W.strichartz_ratio(space21, W.linear_trajectory(space21, zero, zero, 2.0, 20), pair, zero, zero, None, 0.5, 0.5, pair)


def test_trajectory_csv(space21):
    f, g = W.gaussian_data(space21, 1e-3)
    traj = W.linear_trajectory(space21, f, g, 0.1, 1)
    phys = traj.physical_csv().splitlines()
    spec = traj.spectral_csv().splitlines()
    assert phys[1] == "t,r,u" and spec[1] == "t,lambda,uhat_re,uhat_im"
    assert len(phys) == 2 + 2 * traj.rgrid.size
    assert "np." not in phys[2] + spec[2]
