"""End-to-end acceptance criteria; each test records one PASS/FAIL line for the summary."""

import time

import numpy as np
import pytest

from drwave import kernels as K
from drwave import spherical as S
from drwave import strichartz as X
from drwave import transform as T
from drwave import wavesolver as W
from drwave.cli import ROUNDTRIP_FAMILY, default_scan, roundtrip_errors
from drwave.space import log_density_derivative, new_space, omega_coeffs

import shared

SPACES = [(2, 1), (2, 2)]


def conclude(criterion, number, title, checks):
    """Record the verdict and fail the test naming the checks that did not hold."""
    failed = [name for name, (ok, _) in checks.items() if not ok]
    detail = "; ".join(f"{name}={val}" for name, (_, val) in checks.items())
    criterion(number, title, not failed, detail)
    assert not failed, f"failed checks {failed}: {detail}"


def test_criterion_01_spherical_functions(criterion):
    start = time.perf_counter()
    origin = resid = branch = 0.0
    h = 5e-3
    r = np.linspace(0.1, 10, 100)
    for mk in SPACES:
        sp = new_space(*mk)
        lams = [0.5, 1.0, 2.0, 5.0]
        origin = max(origin, max(abs(S.spherical_function(sp, lam, 0.0) - 1) for lam in lams))
        for lam in lams:
            v = [S.spherical_function(sp, lam, r + j * h) for j in (-2, -1, 0, 1, 2)]
            d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
            d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h**2)
            ode = d2 + log_density_derivative(sp, r) * d1 + (lam**2 + sp.Q**2 / 4) * v[2]
            resid = max(resid, float(np.max(np.abs(ode))))
        overlap = np.linspace(1.0, 2.0, 21)
        gap = S.ode_branch(sp, lams, overlap) - S._series_branch(sp, np.array(lams), overlap)
        branch = max(branch, float(np.max(np.abs(gap) / S.phi_zero(sp, overlap))))
    elapsed = time.perf_counter() - start
    conclude(criterion, 1, "spherical functions", {
        "phi(0) error": (origin < 1e-10, f"{origin:.1e}"),
        "ODE residual": (resid < 1e-6, f"{resid:.1e}"),
        "branch gap": (branch < 1e-7, f"{branch:.1e}"),
        "runtime": (elapsed < 60, f"{elapsed:.0f}s"),
    })


def test_criterion_02_gamma_recurrence(criterion):
    exact = True
    worst = 0.0
    fits = []
    for mk in SPACES:
        sp = new_space(*mk)
        w1 = omega_coeffs(sp, 1).as_array()[0]
        for lam in (0.0, 0.3, 1.0, 17.5):
            G = S.gamma_coeffs(sp, lam, 3).values
            exact &= G[0] == 1 and G[1] == w1 / (1 - 2j * lam)
        bound = S.fit_gamma_bound(sp, lmax=500, lam_range=(1.0, 100.0))
        lams = np.linspace(1, 100, 991)
        G = S.gamma_matrix(sp, lams, 500)
        ell = np.arange(1, 501)
        ratio = np.abs(G[1:]) * (1 + lams) / (bound.C * ell[:, None] ** bound.d)
        worst = max(worst, float(ratio.max()))
        fits.append(f"C={bound.C:.4g},d={bound.d:.3f}")
    conclude(criterion, 2, "Gamma recurrence", {
        "first terms exact": (bool(exact), str(bool(exact))),
        "bound ratio": (worst <= 1 + 1e-9, f"{worst:.6f}"),
        "fits": (True, " ".join(fits)),
    })


def test_criterion_03_roundtrip_plancherel(criterion):
    err = spread = 0.0
    for mk in SPACES:
        res = roundtrip_errors(new_space(*mk), list(ROUNDTRIP_FAMILY))
        err = max(err, max(v["roundtrip_error"] for v in res.values()))
        consts = [v["plancherel_constant"] for v in res.values()]
        spread = max(spread, (max(consts) - min(consts)) / np.mean(consts))
    conclude(criterion, 3, "transform roundtrip and Plancherel", {
        "roundtrip error": (err < 1e-4, f"{err:.1e}"),
        "c_S spread": (spread < 1e-3, f"{spread:.1e}"),
    })


def test_criterion_04_abel_factorisation(criterion):
    start = time.perf_counter()
    worst = 0.0
    r = np.linspace(0.5, 6, 56)
    for mk in SPACES:
        sp = new_space(*mk)
        for fn in (lambda x: np.exp(-(x**2)), lambda x: np.exp(-((x**2 - 9) ** 2) / 16)):
            g = T.forward_sft(T.radial_profile(sp, fn))
            abel = T.abel_inverse(sp, T.CosineSynthesis(g), r)
            direct = T.inverse_sft(g, r).values
            worst = max(worst, float(np.max(np.abs(abel - direct)) / np.max(np.abs(direct))))
    elapsed = time.perf_counter() - start
    conclude(criterion, 4, "Abel factorisation", {
        "relative error": (worst < 1e-3, f"{worst:.1e}"),
        "runtime": (elapsed < 120, f"{elapsed:.0f}s"),
    })


def _scan(mk, regime, **override):
    sp = new_space(*mk)
    scan = {**default_scan(sp, regime), **override}
    shift = scan.pop("shift", 0.0)
    return K.envelope_scan(sp, scan["sigma"], scan["tau"], regime, scan["ts"], scan["rs"], exponent_shift=shift)


def test_criterion_05_low_frequency_kernel(criterion):
    checks = {}
    for mk in SPACES:
        for tau in (0.0, 1.0):
            slope = shared.inner_slope(*mk, tau, shared.LONG_TIMES)
            checks[f"slope{mk} tau={tau:g}"] = (abs(slope - (tau - 3)) <= 0.15, f"{slope:.3f}")
        small = _scan(mk, "low_short_time")
        checks[f"small-t{mk}"] = (np.isfinite(small.max_ratio) and not small.diverging, f"{small.max_ratio:.3g}")
        outer = _scan(mk, "low_long_time_outer")
        checks[f"outer{mk}"] = (np.isfinite(outer.max_ratio) and not outer.diverging, f"{outer.max_ratio:.3g}")
    control = _scan((2, 1), "low_long_time_outer", shift=-1.0)
    checks["negative control"] = (control.diverging, "flagged" if control.diverging else "not flagged")
    conclude(criterion, 5, "low-frequency kernel estimates", checks)


def test_criterion_06_high_frequency_kernel(criterion):
    checks = {}
    for mk in SPACES:
        n = new_space(*mk).n
        slope = shared.endpoint_slope(*mk)
        checks[f"slope{mk}"] = (abs(slope + (n - 1) / 2) <= 0.15, f"{slope:.3f}")
        for regime in ("high_long_time", "high_short_time_outer"):
            rep = _scan(mk, regime)
            checks[f"{regime}{mk}"] = (np.isfinite(rep.max_ratio) and not rep.diverging, f"{rep.max_ratio:.3g}")
    conclude(criterion, 6, "high-frequency kernel estimates", checks)


def test_criterion_07_dispersive_decay(criterion):
    fit = shared.dispersive_fit()
    elapsed = shared.duration(shared.dispersive_fit)
    conclude(criterion, 7, "dispersive decay", {
        "small-t slope": (abs(fit.small_t_slope + 0.75) <= 0.15, f"{fit.small_t_slope:.3f}"),
        "large-t slope": (abs(fit.large_t_slope + 2.0) <= 0.2, f"{fit.large_t_slope:.3f}"),
        "runtime": (elapsed < 600, f"{elapsed:.0f}s"),
    })


def test_criterion_08_exponent_geometry(criterion):
    cont = 0.0
    ordered = True
    for n in range(4, 21):
        th = X.thresholds(n)
        cont = max(
            cont,
            abs(X.curve_c1(n, th.gamma2) - (n - 3) / (2 * (n - 1))),
            abs(X.curve_c2(n, th.gamma2) - (n - 3) / (2 * (n - 1))),
            abs(X.curve_c2(n, th.gamma_conf) - 0.5),
            abs(X.curve_c3(n, th.gamma_conf) - 0.5),
        )
        ordered &= th.gamma1 < th.gamma2 < th.gamma_conf < th.gamma_inf <= th.gamma_tilde_inf
    mismatches, near = 0, 0
    for n in (4, 5):
        _, nb, bad = shared.feasibility_mismatches(n)
        mismatches += len(bad)
        near += nb
    conclude(criterion, 8, "exponent geometry", {
        "curve continuity": (cont < 1e-12, f"{cont:.1e}"),
        "gamma3(4)": (X.thresholds(4).gamma3 == 2.5, repr(X.thresholds(4).gamma3)),
        "ordering": (bool(ordered), str(bool(ordered))),
        "brute-force mismatches": (mismatches == 0, f"{mismatches} (+{near} near boundary)"),
    })


def test_criterion_09_linear_solver(criterion):
    sp = new_space(2, 1)
    r, w = T.radial_grid()
    f = T.RadialProfile(r, np.exp(-(r**2)), sp, w)
    g = T.RadialProfile(r, r * np.exp(-(r**2)), sp, w)
    fhat, ghat = T.forward_sft(f), T.forward_sft(g)
    ts = np.linspace(0, 100, 201)
    states = [W.linear_propagate(sp, fhat, ghat, t) for t in ts]
    e = np.array([W.energy(sp, s) for s in states])
    drift = float(np.max(np.abs(e - e[0])) / e[0])
    gen = 0.0
    for sigma, tau in [(0.0, 0.0), (0.5, 0.5), (1.0, -0.5)]:
        ge = np.array([W.generalized_energy(sp, s, sigma, tau) for s in states[::20]])
        gen = max(gen, float(np.max(np.abs(ge - ge[0])) / ge[0]))
    group = 0.0
    for t1, t2 in [(0.3, 1.7), (5.0, 12.5), (40.0, 60.0)]:
        two = W.propagate_state(sp, W.linear_propagate(sp, fhat, ghat, t1), t2)
        one = W.linear_propagate(sp, fhat, ghat, t1 + t2)
        group = max(group, float(np.max(np.abs(two.uhat.values - one.uhat.values))))
    conclude(criterion, 9, "linear solver", {
        "energy drift": (drift < 1e-10, f"{drift:.1e}"),
        "generalized drift": (gen < 1e-10, f"{gen:.1e}"),
        "group property": (group < 1e-12, f"{group:.1e}"),
    })


def test_criterion_10_nonlinear_small_data(criterion):
    _, diag = shared.picard_run(1e-3)
    _, half = shared.picard_run(5e-4)
    elapsed = shared.duration(shared.picard_run, 1e-3) + shared.duration(shared.picard_run, 5e-4)
    ratios = diag.contraction_ratios
    scaling = W.contraction_ratio(diag) / W.contraction_ratio(half)
    expected = 2.0 ** (2.0 - 1)
    conclude(criterion, 10, "nonlinear small-data run", {
        "converged": (diag.converged and half.converged, str(diag.converged and half.converged)),
        "max contraction ratio": (max(ratios) < 0.5, f"{max(ratios):.2e}"),
        "residual": (diag.residual < 1e-8, f"{diag.residual:.1e}"),
        "X-norm bounded": (np.isfinite(max(diag.x_norms)) and diag.lq_growth < 2, f"{max(diag.x_norms):.3e}"),
        "amplitude scaling": (expected / 2 <= scaling <= expected * 2, f"{scaling:.3f}"),
        "runtime": (elapsed < 900, f"{elapsed:.0f}s"),
    })


def test_criterion_11_fourier_decay_verifiers(criterion):
    rep = T.appendix_a_report()
    checks = {name: (bool(ok), str(bool(ok))) for name, ok in rep["checks"].items()}
    checks["compact slope"] = (True, f"{rep['compact_symbol']['slope']:.3f}")
    checks["log slope"] = (True, f"{rep['inhomogeneous_symbol']['log_slope']:.3f}")
    conclude(criterion, 11, "Fourier-decay verifiers", checks)
