import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import k0

from drwave import transform as T
from drwave.cli import ROUNDTRIP_FAMILY, roundtrip_errors
from drwave.kernels import chi_cutoffs
from drwave.space import new_space
from drwave.spherical import phi_table, plancherel_density


def gaussian(space):
    return T.radial_profile(space, lambda r: np.exp(-(r**2)))


def test_forward_zero_and_linearity(space21):
    f = gaussian(space21)
    g = f.with_values(np.exp(-((f.rgrid - 2) ** 2)) * (1 + f.rgrid))
    assert np.all(T.forward_sft(f.with_values(np.zeros_like(f.rgrid))).values == 0)
    lhs = T.forward_sft(f.with_values(2.0 * f.values - 3.0 * g.values)).values
    rhs = 2.0 * T.forward_sft(f).values - 3.0 * T.forward_sft(g).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_forward_rejects_heavy_tail(space21):
    with pytest.raises(T.TruncationError):
        T.forward_sft(T.radial_profile(space21, lambda r: np.exp(-0.5 * r)))


def test_plancherel_constant_frozen(space21, space22):
    assert T.plancherel_constant(space21) == pytest.approx(1 / np.pi, rel=1e-8)
    assert T.plancherel_constant(space22) == pytest.approx(2 / np.pi, rel=1e-8)


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_roundtrip_family(mk):
    sp = new_space(*mk)
    res = roundtrip_errors(sp, list(ROUNDTRIP_FAMILY))
    for name, v in res.items():
        assert v["roundtrip_error"] < 1e-4, name
        assert abs(v["plancherel_mismatch"]) < 1e-4, name
    consts = [v["plancherel_constant"] for v in res.values()]
    assert (max(consts) - min(consts)) / np.mean(consts) < 1e-3


@settings(max_examples=10)
@given(st.floats(0.6, 2.0), st.floats(0.0, 3.0))
def test_roundtrip_random_gaussians(width, centre):
    sp = new_space(2, 1)
    f = T.radial_profile(sp, lambda r: np.exp(-(((r - centre) / width) ** 2)) + np.exp(-(((r + centre) / width) ** 2)))
    back = T.inverse_sft(T.forward_sft(f), f.rgrid, f.weights)
    assert T.relative_l2_error(back, f) < 1e-4


def test_inverse_of_zero(space21):
    lam, w = T.spectral_grid()
    g = T.SpectralProfile(lam, np.zeros_like(lam), space21, w)
    assert np.all(T.inverse_sft(g).values == 0)


def test_inverse_rejects_heavy_spectrum(space21):
    lam, w = T.spectral_grid()
    with pytest.raises(T.TruncationError):
        T.inverse_sft(T.SpectralProfile(lam, 1 / (1 + lam**2), space21, w))


def test_inverse_of_narrow_bump(space21):
    lam, w = T.spectral_grid()
    lam0, width = 2.0, 0.02
    g = T.SpectralProfile(lam, np.exp(-(((lam - lam0) / width) ** 2)), space21, w)
    r = np.linspace(0, 8, 33)
    out = T.inverse_sft(g, r).values
    mass = np.sum(w * g.values.real)
    predicted = T.plancherel_constant(space21) * plancherel_density(space21, lam0) * mass * phi_table(space21, [lam0], r)[0]
    assert np.max(np.abs(out - predicted)) / np.max(np.abs(predicted)) < 1e-2


def test_profile_csv_roundtrip(space22):
    f = gaussian(space22)
    back = T.RadialProfile.from_csv(f.to_csv())
    assert back.space == space22
    assert np.array_equal(back.rgrid, f.rgrid) and np.array_equal(back.values, f.values)
    g = T.forward_sft(f)
    gb = T.SpectralProfile.from_csv(g.to_csv())
    assert np.array_equal(gb.values, g.values)
    assert f.to_csv().startswith(f"# space m=2 k=2 qtilde={space22.qtilde!r}\nr,value_re,value_im\n")


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_abel_factorisation(mk):
    sp = new_space(*mk)
    r = np.linspace(0.5, 6, 56)
    for fn in (lambda x: np.exp(-(x**2)), lambda x: np.exp(-((x**2 - 9) ** 2) / 16)):
        g = T.forward_sft(T.radial_profile(sp, fn))
        abel = T.abel_inverse(sp, T.CosineSynthesis(g), r)
        direct = T.inverse_sft(g, r).values
        assert np.max(np.abs(abel - fn(r))) / np.max(np.abs(fn(r))) < 1e-3
        assert np.max(np.abs(abel - direct)) / np.max(np.abs(direct)) < 1e-3


def test_abel_of_zero(space21, space22):
    for sp in (space21, space22):
        assert np.all(T.abel_inverse(sp, lambda s: 0.0 * np.asarray(s), np.array([1.0, 2.0])) == 0)


def test_abel_rejects_origin(space21):
    with pytest.raises(ValueError):
        T.abel_inverse(space21, lambda s: np.exp(-np.asarray(s) ** 2), 0.0)


def test_abel_constants(space21):
    a_e, a_o = T.abel_constants(space21)
    assert a_e == pytest.approx(2.0**-3.5 * np.pi**-1.5)
    assert a_o == pytest.approx(2.0**-3.5 * np.pi**-2)


def test_cosine_synthesis_derivatives(space21):
    g = T.forward_sft(gaussian(space21))
    cs = T.CosineSynthesis(g)
    s, h = np.linspace(0.3, 3, 10), 1e-4
    d = cs.derivatives(s, 2)
    assert np.allclose(d[1], (cs(s + h) - cs(s - h)) / (2 * h), atol=1e-8)
    assert np.allclose(d[2], (cs(s + h) - 2 * cs(s) + cs(s - h)) / h**2, atol=1e-5)


def test_oscillatory_zero_symbol():
    zero = T.Symbol(lambda lam: 0 * lam, 0.0, (0.0, 2.0))
    assert T.oscillatory_fourier(zero, 3.0) == 0
    with pytest.raises(ValueError):
        T.oscillatory_fourier(zero, 0.0)


def test_oscillatory_bessel_oracle():
    b = T.Symbol(lambda lam: (1 + lam**2) ** -0.5, -1.0, (-np.inf, np.inf))
    for x in (1e-4, 1e-2, 0.5, 3.0, 20.0):
        k = T.oscillatory_fourier(b, x)
        assert abs(k - 2 * k0(x)) < 1e-12 + 1e-9 * 2 * k0(x)


def test_oscillatory_gaussian_oracle():
    b = T.Symbol(lambda lam: np.exp(-(lam**2)), -np.inf, (-np.inf, np.inf))
    for x in (0.5, 2.0, 5.0):
        assert abs(T.oscillatory_fourier(b, x) - np.sqrt(np.pi) * np.exp(-(x**2) / 4)) < 1e-12


def test_compact_symbol_decay():
    b = T.Symbol(lambda lam: chi_cutoffs(lam)[0] * np.sqrt(lam), 0.5, (0.0, 2.0), (0.0,))
    assert T.fourier_decay_slope(b, np.geomspace(10, 1e3, 9)) == pytest.approx(-1.5, abs=0.1)


def test_schwartz_symbol_decay():
    """A compactly supported smooth symbol decays faster than any chosen power (N = 4 here)."""
    b = T.Symbol(lambda lam: chi_cutoffs(np.abs(lam))[0] * np.cos(lam), 0.0, (-2.0, 2.0))
    assert T.fourier_decay_slope(b, np.geomspace(10, 40, 6)) < -4


def test_inhomogeneous_log_growth():
    b = T.Symbol(lambda lam: (1 + lam**2) ** -0.5, -1.0, (-np.inf, np.inf))
    fit = T.log_growth_fit(b, np.geomspace(1e-4, 1e-2, 7))
    assert fit.slope == pytest.approx(2.0, abs=0.1)
    assert fit.r_squared > 0.999


def test_riesz_boundary():
    assert T.riesz_boundary_check(0, 0.0, None, 1e-3) == 0
    xs = np.geomspace(1e-6, 0.4, 16)
    scans = [T.riesz_scan(z, xs) for z in (1.0, 2.0, 4.0, 8.0)]
    for s in scans:
        assert np.isfinite(s.sup) and abs(s.log_slope) < 0.05
    c1 = scans[0].sup / 2
    assert all(s.sup <= c1 * (1 + s.zeta**2) for s in scans)


def test_riesz_with_remainder_symbol():
    f = T.Symbol(lambda lam: (1 + lam**2) ** -1.5 + 0j, -3.0, (0.0, np.inf))
    scan = T.riesz_scan(1.0, np.geomspace(1e-6, 0.4, 12), m_order=1, f_symbol=f)
    assert abs(scan.log_slope) < 0.05


def test_riesz_rejects_bad_input():
    f = T.Symbol(lambda lam: (1 + lam**2) ** -0.5, -1.0, (0.0, np.inf))
    with pytest.raises(ValueError):
        T.riesz_boundary_check(0, 1.0, f, 0.1)
    with pytest.raises(ValueError):
        T.riesz_boundary_check(0, 1.0, None, 0.6)


def test_symbol_decay_report_checks():
    report = T.appendix_a_report()
    assert all(report["checks"].values())
