"""Spherical functions, the expansion functions Φ_λ and the c-function.

The spherical function ``φ_λ`` is the radial eigenfunction of the
Laplace–Beltrami operator with eigenvalue ``-(λ² + Q²/4)`` normalised by
``φ_λ(0) = 1``.  It is evaluated by a hybrid scheme:

* for ``r >= R_SWITCH`` from ``c(λ) Φ_λ(r) + c(-λ) Φ_{-λ}(r)`` where ``Φ_λ`` is
  the convergent exponential series ``2^{-k/2} V^{-1/2} Σ Γ_ℓ e^{(iλ-ℓ) r}``;
* for ``r < R_SWITCH`` by integrating the radial eigen-ODE from a Taylor start
  near the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import loggamma

from .quadrature import rk8_linear2
from .space import SpaceParams, log_density, log_density_derivative, omega_coeffs

R_SWITCH = 1.0
R_MIN_SERIES = 1.0
SERIES_TOL = 1e-14
LMAX_CAP = 5000
ODE_STEP = 1e-3
ODE_START = 1e-3
# Largest value of λ·h used by the ODE branch; keeps RK8 well inside its
# accuracy region for oscillatory solutions.
ODE_PHASE_STEP = 0.2
BRANCH_TOL = 1e-7


class SingularityError(ValueError):
    """Raised at poles of the c-function or of the Γ_ℓ recurrence."""


class BranchMismatchError(RuntimeError):
    """Raised when the series and ODE evaluations of φ_λ disagree."""


# ---------------------------------------------------------------------------
# c-function and Plancherel density
# ---------------------------------------------------------------------------


def _is_gamma_pole(z: np.ndarray) -> np.ndarray:
    # Only exact poles: Γ is finite (if huge) arbitrarily close to one.
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def log_c_function(space: SpaceParams, lam: ArrayLike) -> np.ndarray:
    """Complex logarithm of :func:`c_function` (principal branches of log Γ)."""
    lam = np.asarray(lam, dtype=complex)
    il = 1j * lam
    z_num = 2 * il
    z1 = il + space.Q / 2
    z2 = il + space.m / 4 + 0.5
    if np.any(lam == 0):
        raise SingularityError("c-function is singular at lambda = 0")
    if np.any(_is_gamma_pole(z_num)):
        raise SingularityError("c-function numerator Gamma(2 i lambda) has a pole")
    if np.any(_is_gamma_pole(z1) | _is_gamma_pole(z2)):
        raise SingularityError("c-function denominator Gamma factor has a pole (c vanishes)")
    return (
        loggamma(space.n / 2)
        + (space.Q - 2 * il) * np.log(2.0)
        + loggamma(z_num)
        - loggamma(z1)
        - loggamma(z2)
    )


def c_function(space: SpaceParams, lam: ArrayLike) -> np.ndarray | complex:
    """Harish-Chandra c-function

    ``c(λ) = Γ(n/2) 2^{Q-2iλ} Γ(2iλ) / [Γ(iλ + Q/2) Γ(iλ + m/4 + 1/2)]``.
    """
    out = np.exp(log_c_function(space, lam))
    return out if out.ndim else complex(out)


def plancherel_density(space: SpaceParams, lam: ArrayLike) -> np.ndarray | float:
    """``|c(λ)|^{-2}`` for real λ, with the continuous value 0 at λ = 0."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(lam.shape)
    nz = lam != 0
    out[nz] = np.exp(-2.0 * log_c_function(space, lam[nz]).real)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Γ_ℓ coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaTable:
    """Coefficients ``Γ_0 .. Γ_L`` of the Φ_λ series for one λ."""

    values: np.ndarray
    lam: complex
    lmax: int


def _check_recurrence_poles(lams: np.ndarray, lmax: int) -> None:
    # ℓ - 2iλ = 0  <=>  λ = -iℓ/2
    ell = 2j * lams
    bad = (np.abs(ell.imag) < 1e-14) & (np.abs(ell.real - np.round(ell.real)) < 1e-14)
    bad &= (np.round(ell.real) >= 1) & (np.round(ell.real) <= lmax)
    if np.any(bad):
        offending = int(np.round(ell[bad][0].real))
        raise SingularityError(f"Gamma recurrence has a pole at l = {offending} (lambda = -i*{offending}/2)")


def gamma_matrix(space: SpaceParams, lams: ArrayLike, lmax: int) -> np.ndarray:
    """Γ_ℓ(λ) for ``ℓ = 0..lmax`` and every λ in ``lams``; shape ``(lmax+1, N)``."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if lmax < 0:
        raise ValueError("lmax must be non-negative")
    _check_recurrence_poles(lams, lmax)
    G = np.zeros((lmax + 1, lams.size), dtype=complex)
    G[0] = 1.0
    if lmax == 0:
        return G
    w = omega_coeffs(space, lmax).as_array()
    for ell in range(1, lmax + 1):
        # Σ_{j<ℓ} ω_{ℓ-j} Γ_j
        acc = w[ell - 1 :: -1] @ G[:ell] if ell > 1 else w[0] * G[0]
        G[ell] = acc / (ell * (ell - 2j * lams))
    return G


def gamma_coeffs(space: SpaceParams, lam: complex, lmax: int) -> GammaTable:
    """Γ_0..Γ_lmax from ``ℓ(ℓ - 2iλ) Γ_ℓ = Σ_{j<ℓ} ω_{ℓ-j} Γ_j``, ``Γ_0 = 1``."""
    vals = gamma_matrix(space, [lam], lmax)[:, 0]
    return GammaTable(values=vals, lam=complex(lam), lmax=lmax)


@dataclass(frozen=True)
class GammaBound:
    """Fitted constants in ``|Γ_ℓ(λ)| (1+|λ|) <= C ℓ^d`` (real λ, ℓ >= 1)."""

    C: float
    d: float
    lmax: int
    lam_range: tuple[float, float]


def fit_gamma_bound(
    space: SpaceParams, lmax: int = 500, lam_range: tuple[float, float] = (1.0, 100.0), nlam: int = 199
) -> GammaBound:
    """Fit ``(C, d)`` in the Γ_ℓ bound on a λ-sample of ``lam_range``.

    ``d`` is the least-squares log–log slope of ``M(ℓ) = max_λ |Γ_ℓ(λ)|(1+λ)``
    over ``ℓ ∈ [10, lmax]``; ``C`` is then the smallest constant making the
    bound hold on the whole sample.
    """
    lams = np.linspace(lam_range[0], lam_range[1], nlam)
    G = gamma_matrix(space, lams, lmax)
    M = np.max(np.abs(G[1:]) * (1 + lams), axis=1)
    ell = np.arange(1, lmax + 1)
    sel = ell >= min(10, lmax)
    d = float(np.polyfit(np.log(ell[sel]), np.log(M[sel]), 1)[0]) if sel.sum() > 1 else 0.0
    C = float(np.max(M / ell**d))
    return GammaBound(C=C, d=d, lmax=lmax, lam_range=lam_range)


@lru_cache(maxsize=32)
def gamma_bound(space: SpaceParams) -> GammaBound:
    """Per-space Γ_ℓ bound, fitted once and cached."""
    return fit_gamma_bound(space)


def series_length(space: SpaceParams, r: float, tol: float = SERIES_TOL) -> int:
    """First ℓ with ``(1+ℓ)^d e^{-ℓ r} < tol`` (capped at ``LMAX_CAP``)."""
    d = max(gamma_bound(space).d, 0.0)
    ell = np.arange(LMAX_CAP + 1)
    ok = d * np.log1p(ell) - ell * r < np.log(tol)
    idx = np.flatnonzero(ok)
    return int(idx[0]) if idx.size else LMAX_CAP


def _series_error(space: SpaceParams, lam_abs: np.ndarray, r: float, L: int) -> np.ndarray:
    gb = gamma_bound(space)
    ell = np.arange(L + 1, L + 400)
    tail = gb.C * np.sum(ell**gb.d * np.exp(-ell * r))
    return tail / (1 + lam_abs)


# ---------------------------------------------------------------------------
# Φ_λ
# ---------------------------------------------------------------------------


def _phi_big_matrix(space: SpaceParams, lams: np.ndarray, rs: np.ndarray, G: np.ndarray | None = None):
    """Φ_λ(r) on a (λ, r) grid; returns values and truncation-error bounds."""
    rmin = float(np.min(rs))
    L = series_length(space, rmin)
    if G is None or G.shape[0] < L + 1:
        G = gamma_matrix(space, lams, L)
    ell = np.arange(L + 1)
    # Σ_ℓ Γ_ℓ e^{-ℓ r}; per-r truncation is implicit since later terms are tiny.
    E = np.exp(-np.outer(ell, rs))
    S = G[: L + 1].T @ E
    pref = 2.0 ** (-space.k / 2) * np.exp(-0.5 * log_density(space, rs))
    vals = S * np.exp(1j * np.outer(lams, rs)) * pref
    err = _series_error(space, np.abs(lams), rmin, L)[:, None] * pref[None, :]
    return vals, err


def phi_big(space: SpaceParams, lam: complex, r: ArrayLike, r_min: float = R_MIN_SERIES):
    """Expansion function ``Φ_λ(r)`` and a truncation-error estimate.

    Returns
    -------
    value, error : complex or ndarray
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < r_min):
        raise ValueError(f"phi_big requires r >= r_min = {r_min}")
    vals, err = _phi_big_matrix(space, np.array([lam], dtype=complex), r_arr)
    if np.ndim(r) == 0:
        return complex(vals[0, 0]), float(err[0, 0])
    return vals[0], err[0]


# ---------------------------------------------------------------------------
# ODE branch
# ---------------------------------------------------------------------------


def _taylor(space: SpaceParams, mu: np.ndarray, r: np.ndarray | float):
    """Series ``1 + b2 r² + b4 r⁴`` of the regular solution and its derivative."""
    n = space.n
    a1 = (space.m + 4 * space.k) / 12.0
    b2 = -mu / (2 * n)
    b4 = -b2 * (mu + 2 * a1) / (4 * (n + 2))
    r = np.asarray(r, dtype=float)
    val = 1 + b2 * r**2 + b4 * r**4
    der = 2 * b2 * r + 4 * b4 * r**3
    return val, der


def _coefficient(space: SpaceParams):
    """Scalar ``V'/V`` for the stepper's inner loop (plain floats, no checks)."""
    a = 0.5 * (space.m + space.k)
    b = 0.5 * space.k

    def p(r: float) -> float:
        th = math.tanh(0.5 * r)
        return a / th + b * th

    return p


def ode_branch(
    space: SpaceParams, lams: ArrayLike, rs: ArrayLike, step: float = ODE_STEP, far_step: float = 1e-2
) -> np.ndarray:
    """φ_λ(r) by integrating ``φ'' + (V'/V) φ' + (λ² + Q²/4) φ = 0``.

    The step is ``step`` for ``r < R_SWITCH`` (and ``far_step`` beyond, where the
    coefficients are smooth), further reduced to ``ODE_PHASE_STEP/|λ|`` for
    large frequencies.  λ values are processed in bands of similar size.

    Returns an array of shape ``(len(lams), len(rs))``.
    """
    lams = np.atleast_1d(np.abs(np.asarray(lams, dtype=float)))
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    out = np.empty((lams.size, rs.size))
    if lams.size == 0 or rs.size == 0:
        return out
    order = np.argsort(rs)
    rs_sorted = rs[order]
    mu_all = lams**2 + space.Q**2 / 4.0
    # Bands by powers of two in λ so that one step size serves a whole band.
    band_id = np.floor(np.log2(np.maximum(lams, 1.0))).astype(int)
    for b in np.unique(band_id):
        sel = np.flatnonzero(band_id == b)
        mu = mu_all[sel]
        lam_top = float(np.max(lams[sel]))
        h_near = min(step, ODE_PHASE_STEP / max(lam_top, 1e-300))
        h_far = min(far_step, ODE_PHASE_STEP / max(lam_top, 1e-300))
        r0 = min(ODE_START, 0.02 / np.sqrt(float(np.max(mu))))
        res = np.empty((rs_sorted.size, sel.size))
        small = rs_sorted <= r0
        if np.any(small):
            res[small] = _taylor(space, mu[None, :], rs_sorted[small][:, None])[0]
        big = ~small
        if np.any(big):
            v0, d0 = _taylor(space, mu, r0)
            targets = rs_sorted[big]
            add_switch = targets[-1] > R_SWITCH and not np.any(targets == R_SWITCH)
            tt = np.union1d(targets, [R_SWITCH]) if add_switch else targets
            vals, _ = rk8_linear2(
                tt, np.vstack([v0, d0]), r0, _coefficient(space), mu,
                h_near, h_far=h_far, r_far=R_SWITCH,
            )
            if add_switch:
                vals = vals[np.isin(tt, targets)]
            res[big] = vals
        out[np.ix_(sel, order)] = res.T
    return out


# ---------------------------------------------------------------------------
# Hybrid evaluation
# ---------------------------------------------------------------------------

# Below this |λ| the c-function split loses digits to cancellation and the
# ODE branch is used on the whole half-line instead.
LAMBDA_ODE_ONLY = 1e-6


def _series_branch(space: SpaceParams, lams: np.ndarray, rs: np.ndarray, check_real: bool = False) -> np.ndarray:
    """c(λ)Φ_λ + c(-λ)Φ_{-λ} on a (λ, r) grid, for real λ ≠ 0 and r >= R_MIN_SERIES."""
    lams = np.asarray(lams, dtype=float)
    plus, _ = _phi_big_matrix(space, lams.astype(complex), rs)
    c_plus = c_function(space, lams)
    term = np.atleast_1d(c_plus)[:, None] * plus
    if check_real:
        minus, _ = _phi_big_matrix(space, (-lams).astype(complex), rs)
        c_minus = np.atleast_1d(c_function(space, -lams))
        total = term + c_minus[:, None] * minus
        scale = np.maximum(np.abs(term), 1e-300)
        if np.any(np.abs(total.imag) > 1e-10 * np.maximum(scale, 1.0)):
            raise BranchMismatchError("c(λ)Φ_λ + c(-λ)Φ_{-λ} is not real to 1e-10")
        return total.real
    # For real λ the second term is the complex conjugate of the first.
    return 2.0 * term.real


def phi_table(
    space: SpaceParams,
    lams: ArrayLike,
    rs: ArrayLike,
    r_switch: float = R_SWITCH,
    check_branches: bool = True,
) -> np.ndarray:
    """Spherical functions φ_λ(r) on a (λ, r) grid, shape ``(len(lams), len(rs))``.

    Radii below ``r_switch`` use the ODE branch; radii at or above it use the
    series branch, except for |λ| below ``LAMBDA_ODE_ONLY`` where the ODE is used
    throughout.  With ``check_branches`` (and some radius below the switch) both
    branches are evaluated at ``r_switch`` and compared relative to φ_0(r_switch); disagreement beyond
    ``BRANCH_TOL`` raises :class:`BranchMismatchError`.
    """
    lams = np.abs(np.atleast_1d(np.asarray(lams, dtype=float)))
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    if np.any(rs < 0):
        raise ValueError("r must be non-negative")
    out = np.empty((lams.size, rs.size))
    tiny = lams < LAMBDA_ODE_ONLY
    near = rs < r_switch
    if np.any(tiny):
        out[tiny] = ode_branch(space, lams[tiny], rs)
    reg = ~tiny
    if np.any(reg):
        lr = lams[reg]
        near_vals = None
        if check_branches and np.any(near):
            probe_r = np.append(rs[near], r_switch)
            ode_vals = ode_branch(space, lr, probe_r)
            ser = _series_branch(space, lr, np.array([r_switch]))[:, 0]
            scale = phi_zero(space, r_switch)
            gap = np.max(np.abs(ode_vals[:, -1] - ser)) / scale
            if gap > BRANCH_TOL:
                raise BranchMismatchError(
                    f"series and ODE branches differ by {gap:.2e} (relative) at r = {r_switch}"
                )
            near_vals = ode_vals[:, :-1]
        elif np.any(near):
            near_vals = ode_branch(space, lr, rs[near])
        block = np.empty((lr.size, rs.size))
        if np.any(near):
            block[:, near] = near_vals
        if np.any(~near):
            block[:, ~near] = _series_branch(space, lr, rs[~near])
        out[reg] = block
    return out


def spherical_function(space: SpaceParams, lam: float, r: ArrayLike) -> np.ndarray | float:
    """Spherical function φ_λ(r) for real λ and r >= 0 (hybrid ODE / series)."""
    if np.iscomplexobj(lam) and np.imag(lam) != 0:
        raise ValueError("spherical_function requires real lambda")
    lam = float(np.real(lam))
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise ValueError("r must be non-negative")
    far = r_arr >= R_SWITCH
    vals = phi_table(space, [lam], r_arr)[0]
    if np.any(far) and abs(lam) >= LAMBDA_ODE_ONLY:
        # Explicit reality check of the two-term combination.
        _series_branch(space, np.array([abs(lam)]), r_arr[far], check_real=True)
    return vals if np.ndim(r) else float(vals[0])


def phi_zero(space: SpaceParams, r: ArrayLike) -> np.ndarray | float:
    """Ground spherical function φ_0(r) via the ODE branch on the whole half-line."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise ValueError("r must be non-negative")
    vals = _phi_zero_cached(space, tuple(r_arr.tolist())) if r_arr.size < 64 else ode_branch(space, [0.0], r_arr)[0]
    return vals if np.ndim(r) else float(vals[0])


@lru_cache(maxsize=256)
def _phi_zero_cached(space: SpaceParams, rs: tuple) -> np.ndarray:
    return ode_branch(space, [0.0], np.array(rs))[0]


def phi_zero_envelope_constant(space: SpaceParams, rmax: float = 30.0, npts: int = 601) -> float:
    """Fitted ``C`` in ``φ_0(r) <= C (1 + r) e^{-Qr/2}`` on ``[0, rmax]``."""
    rs = np.linspace(0, rmax, npts)
    return float(np.max(phi_zero(space, rs) * np.exp(space.Q * rs / 2) / (1 + rs)))
