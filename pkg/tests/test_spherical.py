import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drwave import spherical as S
from drwave.space import density, log_density_derivative, new_space, omega, omega_coeffs


def c_oracle(sp, lam):
    mpmath.mp.dps = 30
    il = 1j * mpmath.mpf(lam)
    val = (
        mpmath.gamma(mpmath.mpf(sp.n) / 2)
        * mpmath.power(2, sp.Q - 2 * il)
        * mpmath.gamma(2 * il)
        / (mpmath.gamma(il + mpmath.mpf(sp.Q) / 2) * mpmath.gamma(il + mpmath.mpf(sp.m) / 4 + 0.5))
    )
    return complex(val)


def phi_oracle(sp, lam, r):
    """φ_λ(r) = ₂F₁(Q/2 + iλ, Q/2 - iλ; n/2; -sinh²(r/2))."""
    mpmath.mp.dps = 30
    a = mpmath.mpf(sp.Q) / 2 + 1j * mpmath.mpf(lam)
    b = mpmath.mpf(sp.Q) / 2 - 1j * mpmath.mpf(lam)
    return float(mpmath.re(mpmath.hyp2f1(a, b, mpmath.mpf(sp.n) / 2, -mpmath.sinh(mpmath.mpf(r) / 2) ** 2)))


def test_c_function_matches_oracle(space21, space22):
    for sp in (space21, space22):
        for lam in (0.3, 1.0, 4.5):
            assert abs(S.c_function(sp, lam) / c_oracle(sp, lam) - 1) < 1e-10


@given(st.floats(0.01, 200.0))
def test_c_function_conjugation(lam):
    sp = new_space(2, 1)
    assert abs(S.c_function(sp, -lam)) == pytest.approx(abs(S.c_function(sp, lam)), rel=1e-12)


def test_c_function_singular_at_zero(space21):
    with pytest.raises(S.SingularityError):
        S.c_function(space21, 0.0)


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_c_function_large_lambda_growth(mk):
    sp = new_space(*mk)
    lam = np.geomspace(1e2, 1e4, 20)
    slope = np.polyfit(np.log(lam), -np.log(np.abs(S.c_function(sp, lam))), 1)[0]
    assert slope == pytest.approx(sp.Q / 2 + sp.m / 4, abs=0.02)


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_plancherel_density_slopes(mk):
    sp = new_space(*mk)
    small = np.geomspace(1e-4, 1e-2, 20)
    assert np.polyfit(np.log(small), np.log(S.plancherel_density(sp, small)), 1)[0] == pytest.approx(2, abs=0.02)
    big = np.geomspace(1e2, 1e4, 20)
    assert np.polyfit(np.log(big), np.log(S.plancherel_density(sp, big)), 1)[0] == pytest.approx(sp.n - 1, abs=0.05)
    assert S.plancherel_density(sp, 0.0) == 0.0


@given(st.floats(-100, 100).filter(lambda x: x != 0))
def test_plancherel_density_even(lam):
    sp = new_space(2, 2)
    assert S.plancherel_density(sp, lam) == S.plancherel_density(sp, -lam)


def test_plancherel_density_upper_bound(space21):
    lam = np.geomspace(1e-3, 1e3, 200)
    ratio = S.plancherel_density(space21, lam) / (lam**2 * (1 + lam) ** (space21.n - 3))
    assert ratio.max() / ratio.min() < 50


def test_gamma_coefficients_first_terms(space21):
    for lam in (0.0, 0.7, 3.0 + 0.2j):
        G = S.gamma_coeffs(space21, lam, 5).values
        assert G[0] == 1
        assert G[1] == omega_coeffs(space21, 1).as_array()[0] / (1 - 2j * lam)
    assert S.gamma_coeffs(space21, 0.0, 1).values[1] == 1


def test_gamma_recurrence_pole(space21):
    with pytest.raises(S.SingularityError, match="l = 3"):
        S.gamma_coeffs(space21, -1.5j, 10)


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_gamma_bound_single_fit(mk):
    sp = new_space(*mk)
    bound = S.fit_gamma_bound(sp, lmax=500, lam_range=(1.0, 100.0))
    lams = np.linspace(1, 100, 997)
    G = S.gamma_matrix(sp, lams, 500)
    ell = np.arange(1, 501)
    lhs = np.abs(G[1:]) * (1 + lams)
    assert np.all(lhs <= bound.C * ell[:, None] ** bound.d * (1 + 1e-9))


def test_phi_big_leading_behaviour(space21, space22):
    for sp in (space21, space22):
        val, err = S.phi_big(sp, 1.3, 30.0)
        lead = np.sqrt(density(sp, 30.0)) * val * np.exp(-1j * 1.3 * 30.0)
        assert abs(lead - 2 ** (-sp.k / 2)) < 1e-6
        assert err < 1e-10
    with pytest.raises(ValueError):
        S.phi_big(space21, 1.0, 0.5)


def test_phi_big_solves_eigen_equation(space22):
    lam, h = 2.0, 1e-3
    r = np.linspace(2, 10, 33)
    def u(x):
        return np.sqrt(density(space22, x)) * S.phi_big(space22, lam, x)[0]
    second = (-u(r - 2 * h) + 16 * u(r - h) - 30 * u(r) + 16 * u(r + h) - u(r + 2 * h)) / (12 * h**2)
    resid = second - omega(space22, r) * u(r) + lam**2 * u(r)
    assert np.max(np.abs(resid)) < 1e-6


def test_phi_big_single_term(space21):
    r = np.linspace(1, 5, 9)
    leading_only = np.zeros((S.LMAX_CAP + 1, 1), dtype=complex)
    leading_only[0] = 1.0
    single = S._phi_big_matrix(space21, np.array([0.8 + 0j]), r, G=leading_only)[0][0]
    expected = 2 ** (-space21.k / 2) * density(space21, r) ** -0.5 * np.exp(0.8j * r)
    assert np.allclose(single, expected, rtol=1e-14)


@pytest.mark.parametrize("mk", [(2, 1), (2, 2)])
def test_spherical_function_matches_hypergeometric(mk):
    sp = new_space(*mk)
    for lam in (0.0, 0.5, 2.0, 7.0):
        for r in (0.05, 0.7, 1.5, 4.0, 9.0):
            assert abs(S.spherical_function(sp, lam, r) - phi_oracle(sp, lam, r)) < 1e-10


@given(st.floats(0.0, 30.0), st.floats(0.0, 12.0))
def test_spherical_function_even_and_bounded(lam, r):
    sp = new_space(2, 1)
    v = S.spherical_function(sp, lam, r)
    assert abs(v - S.spherical_function(sp, -lam, r)) < 1e-12
    assert abs(v) <= S.phi_zero(sp, r) * (1 + 1e-8) + 1e-14


def test_spherical_function_at_origin(space21):
    for lam in (0.0, 0.5, 1.0, 5.0, 40.0):
        assert abs(S.spherical_function(space21, lam, 0.0) - 1) < 1e-10


def test_spherical_function_rejects_complex(space21):
    with pytest.raises(ValueError):
        S.spherical_function(space21, 1 + 1j, 1.0)


def test_phi_zero_properties(space21, space22):
    for sp in (space21, space22):
        r = np.linspace(0, 30, 301)
        p = S.phi_zero(sp, r)
        assert p[0] == pytest.approx(1, abs=1e-14)
        assert np.all(np.diff(p) < 0)
        env = p * np.exp(sp.Q * r / 2) / (1 + r)
        assert env.max() <= S.phi_zero_envelope_constant(sp) * (1 + 1e-12)
        assert env.max() / env[-1] < 10


def test_phi_table_branch_check(space21):
    table = S.phi_table(space21, [0.5, 1.0, 2.0], np.linspace(0.0, 3.0, 31))
    assert table.shape == (3, 31)
    assert np.allclose(table[:, 0], 1)


def test_gamma_derivative_bound(space21):
    """|Γ_ℓ(λ)| (1+|λ|) / ℓ^d stays bounded for |λ| in [1, 100]."""
    bound = S.gamma_bound(space21)
    lams = np.concatenate([-np.linspace(1, 100, 50), np.linspace(1, 100, 50)])
    G = S.gamma_matrix(space21, lams, 300)
    ell = np.arange(1, 301)
    assert np.max(np.abs(G[1:]) * (1 + np.abs(lams)) / ell[:, None] ** bound.d) <= bound.C * (1 + 1e-9)


def test_ode_residual_interior(space22):
    lam, h = 1.0, 5e-3
    r = np.linspace(0.2, 0.9, 15)
    pts = np.concatenate([r + j * h for j in (-2, -1, 0, 1, 2)])
    v = S.ode_branch(space22, [lam], pts)[0].reshape(5, -1)
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h**2)
    resid = d2 + log_density_derivative(space22, r) * d1 + (lam**2 + space22.Q**2 / 4) * v[2]
    assert np.max(np.abs(resid)) < 1e-6
