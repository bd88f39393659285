"""Linear and semilinear shifted wave equation on the spectral side.

Radial solutions are represented by their spherical transforms. The linear
flow is an exact multiplier; the semilinear problem is solved by Picard
iteration of the Duhamel map, moving to the radial grid only to apply the
nonlinearity.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .space import SpaceParams, density
from .spherical import plancherel_density
from .strichartz import find_exponents, is_admissible
from .transform import (
    RadialProfile,
    SpectralProfile,
    forward_sft,
    plancherel_constant,
    radial_grid,
    spectral_grid,
    transform_matrix,
)

NONLINEARITIES = ("focusing_power", "abs_power")
ALIAS_TOL = 1e-6
PICARD_TOL = 1e-8
DIVERGENCE_FACTOR = 2.0


class PreconditionError(ValueError):
    """A hypothesis of the estimate being evaluated is violated."""


@dataclass(frozen=True)
class WaveState:
    """Spectral snapshot ``(û(t, ·), ∂_t û(t, ·))`` at time ``t``."""

    uhat: SpectralProfile
    vhat: SpectralProfile
    t: float

    def __post_init__(self) -> None:
        if self.uhat.lgrid.shape != self.vhat.lgrid.shape or not np.array_equal(self.uhat.lgrid, self.vhat.lgrid):
            raise ValueError("uhat and vhat must share one lambda grid")


def _check_shared(f: SpectralProfile, g: SpectralProfile) -> None:
    if f.lgrid.shape != g.lgrid.shape or not np.array_equal(f.lgrid, g.lgrid):
        raise ValueError("profiles must share one lambda grid")


def _tilde_multiplier(space: SpaceParams, lam: np.ndarray) -> np.ndarray:
    return lam**2 + space.qtilde**2 / 4


def sobolev_norm(space: SpaceParams, g: SpectralProfile, sigma: float, tau: float) -> float:
    """``‖g‖_{H^{σ,τ}} = (c_S ∫ |c|^{-2} (λ² + Q~²/4)^σ λ^{2τ} |g|² dλ)^{1/2}``.

    The weight is integrable at ``λ = 0`` only for ``|τ| < 3/2``.
    """
    if not -1.5 < tau < 1.5:
        raise PreconditionError(f"tau={tau} outside (-3/2, 3/2): the weight λ^(2τ)|c|^-2 is not integrable at 0")
    lam = g.lgrid
    weight = plancherel_density(space, lam) * _tilde_multiplier(space, lam) ** sigma * lam ** (2 * tau)
    val = plancherel_constant(space) * np.sum(g.weights * weight * np.abs(g.values) ** 2)
    return float(np.sqrt(val))


def _sinc_factor(lam: np.ndarray, t: float) -> np.ndarray:
    """``sin(tλ)/λ`` with the value ``t`` at ``λ = 0``."""
    return t * np.sinc(t * lam / np.pi)


def linear_propagate(space: SpaceParams, fhat: SpectralProfile, ghat: SpectralProfile, t: float) -> WaveState:
    """Free evolution of data ``(f, g)`` to time ``t``."""
    _check_shared(fhat, ghat)
    lam = fhat.lgrid
    cos_t = np.cos(t * lam)
    u = cos_t * fhat.values + _sinc_factor(lam, t) * ghat.values
    v = -lam * np.sin(t * lam) * fhat.values + cos_t * ghat.values
    return WaveState(fhat.with_values(u), fhat.with_values(v), float(t))


def propagate_state(space: SpaceParams, state: WaveState, dt: float) -> WaveState:
    """Advance a state by ``dt`` with the free flow."""
    out = linear_propagate(space, state.uhat, state.vhat, dt)
    return WaveState(out.uhat, out.vhat, state.t + dt)


def energy(space: SpaceParams, state: WaveState) -> float:
    """``E = (1/2) c_S ∫ |c|^{-2} (|v̂|² + λ²|û|²) dλ``."""
    lam = state.uhat.lgrid
    integrand = plancherel_density(space, lam) * (np.abs(state.vhat.values) ** 2 + lam**2 * np.abs(state.uhat.values) ** 2)
    return float(0.5 * plancherel_constant(space) * np.sum(state.uhat.weights * integrand))


def generalized_energy(space: SpaceParams, state: WaveState, sigma: float, tau: float) -> float:
    """``‖∂_t u‖²_{H^{σ,τ}} + ‖u‖²_{H^{σ,τ+1}}``, conserved by the free flow.

    The second term is evaluated as ``‖Du‖²_{H^{σ,τ}}`` so that ``τ + 1`` may
    reach ``3/2``.
    """
    du = state.uhat.with_values(state.uhat.lgrid * state.uhat.values)
    return sobolev_norm(space, state.vhat, sigma, tau) ** 2 + sobolev_norm(space, du, sigma, tau) ** 2


def lq_norm(space: SpaceParams, u: RadialProfile, q: float) -> float:
    """``(∫ |u(r)|^q V(r) dr)^{1/q}`` on the profile's grid."""
    if q < 1:
        raise PreconditionError(f"q={q} must be at least 1")
    vals = np.abs(np.asarray(u.values)) ** q
    return float(np.sum(u.weights * density(space, u.rgrid) * vals) ** (1.0 / q))


# ---------------------------------------------------------------------------
# batched transforms over a time grid


class _Transforms:
    """Forward and inverse transforms on fixed grids, applied to stacks of profiles."""

    def __init__(self, space: SpaceParams, lgrid, lweights, rgrid, rweights) -> None:
        self.space = space
        self.lgrid, self.lweights = lgrid, lweights
        self.rgrid, self.rweights = rgrid, rweights
        self.table = transform_matrix(space, lgrid, rgrid)
        self.r_measure = rweights * density(space, rgrid)
        self.l_measure = plancherel_constant(space) * lweights * plancherel_density(space, lgrid)

    @staticmethod
    def _real_matmul(values: np.ndarray, matrix: np.ndarray) -> np.ndarray:
        # real/imag views are strided; contiguous copies keep the product on BLAS
        if np.iscomplexobj(values):
            re = np.ascontiguousarray(values.real) @ matrix
            im = np.ascontiguousarray(values.imag)
            if not np.any(im):
                return re
            return re + 1j * (im @ matrix)
        return np.ascontiguousarray(values) @ matrix

    def inverse(self, uhat: np.ndarray) -> np.ndarray:
        return self._real_matmul(uhat * self.l_measure, self.table)

    def forward(self, u: np.ndarray) -> np.ndarray:
        return self._real_matmul(u * self.r_measure, self.table.T)

    def spectral_tail_share(self, ghat: np.ndarray, time_weights: np.ndarray, frac: float = 0.1) -> float:
        """Time-integrated share of ``∫|c|^{-2}|ĝ|² dλ`` on the top ``frac`` of the λ-grid."""
        mass = np.abs(ghat) ** 2 * (self.lweights * plancherel_density(self.space, self.lgrid))
        top = self.lgrid >= (1 - frac) * self.lgrid[-1]
        total = float(time_weights @ mass.sum(axis=1))
        return float(time_weights @ mass[:, top].sum(axis=1)) / total if total > 0 else 0.0

    def radial_tail_share(self, u: np.ndarray, time_weights: np.ndarray, frac: float = 0.1) -> float:
        """Time-integrated share of ``∫|u| φ_0 dµ`` on the outer ``frac`` of the r-grid."""
        r = self.rgrid
        mass = np.abs(u) * (self.rweights * (1 + r) * np.exp(self.space.Q * r / 2))
        outer = r >= (1 - frac) * r[-1]
        total = float(time_weights @ mass.sum(axis=1))
        return float(time_weights @ mass[:, outer].sum(axis=1)) / total if total > 0 else 0.0


def _filon_weights(lam: np.ndarray, h: float, sign: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights for ``∫_0^h e^{±iλx} F(x) dx`` with ``F`` linear between its end values."""
    theta = sign * lam * h
    i_theta = 1j * theta
    small = np.abs(theta) < 0.05
    safe = np.where(small, 1.0, i_theta)
    e = np.exp(i_theta)
    i0 = np.where(small, 0, (e - 1) / safe)
    i1 = np.where(small, 0, e / safe - (e - 1) / safe**2)
    z = i_theta[small]
    i0[small] = 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120 + z**5 / 720 + z**6 / 5040
    i1[small] = 1 / 2 + z / 3 + z**2 / 8 + z**3 / 30 + z**4 / 144 + z**5 / 840 + z**6 / 5760
    return h * (i0 - i1), h * i1


def duhamel(lam: np.ndarray, times: np.ndarray, forcing: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Duhamel term and its time derivative on a uniform time grid.

    Computes ``D(t_j) = ∫_0^{t_j} sin((t_j - s)λ)/λ F(s) ds`` and
    ``∂_t D(t_j) = ∫_0^{t_j} cos((t_j - s)λ) F(s) ds`` with ``F`` interpolated
    linearly in time between grid nodes and the oscillatory factor integrated
    exactly (trapezoid rule with exact phase).
    """
    nt = times.size
    h = float(times[1] - times[0]) if nt > 1 else 0.0
    out = np.zeros_like(forcing, dtype=complex)
    dout = np.zeros_like(forcing, dtype=complex)
    if nt < 2:
        return out, dout
    # E±(t_j) = ∫_0^{t_j} e^{±iλs} F(s) ds via cumulative sums over intervals
    cum = {}
    for sign in (1, -1):
        w0, w1 = _filon_weights(lam, h, sign)
        phase = np.exp(sign * 1j * np.outer(times[:-1], lam))
        pieces = phase * (w0 * forcing[:-1] + w1 * forcing[1:])
        cum[sign] = np.vstack([np.zeros((1, lam.size), dtype=complex), np.cumsum(pieces, axis=0)])
    c_int = 0.5 * (cum[1] + cum[-1])  # ∫ cos(λs) F
    s_int = (cum[1] - cum[-1]) / 2j  # ∫ sin(λs) F
    tl = np.outer(times, lam)
    sin_t, cos_t = np.sin(tl), np.cos(tl)
    num = sin_t * c_int - cos_t * s_int
    safe = np.where(lam > 0, lam, 1.0)
    out = np.where(lam > 0, num / safe, 0.0)
    dout = cos_t * c_int + sin_t * s_int
    if np.any(lam == 0):
        # sin((t-s)λ)/λ → t - s; trapezoid on the linear interpolant
        zero = lam == 0
        f0 = forcing[:, zero]
        for j in range(1, nt):
            s = times[: j + 1]
            out[j, zero] = np.trapezoid((times[j] - s)[:, None] * f0[: j + 1], s, axis=0)
    return out, dout


@dataclass
class SolveConfig:
    """Parameters of a semilinear run.

    ``sigma`` is the regularity index of the data space
    ``H^{σ-1/2,1/2} × H^{σ-1/2,-1/2}``. When ``pair`` is None the monitoring
    pair is taken from the exponent solver for ``(n, γ, σ)``.
    """

    gamma: float = 2.0
    nonlin: str = "focusing_power"
    T: float = 50.0
    nt: int | None = None
    picard_max: int = 30
    pair: tuple[float, float] | None = None
    sigma: float = 0.3
    coupling: float = 1.0
    tol: float = PICARD_TOL

    def __post_init__(self) -> None:
        if not self.gamma > 1:
            raise PreconditionError(f"nonlinearity power γ={self.gamma} must exceed 1")
        if self.nonlin not in NONLINEARITIES:
            raise PreconditionError(f"nonlin must be one of {NONLINEARITIES}")
        if not self.T > 0:
            raise PreconditionError("T must be positive")
        if self.nt is None:
            self.nt = int(math.ceil(10 * self.T))
        if self.nt < 1 or self.picard_max < 1:
            raise PreconditionError("nt and picard_max must be positive")

    def resolve_pair(self, n: int) -> tuple[float, float]:
        """``(p, q)`` used for the ``L^p_t L^q_r`` part of the X-norm."""
        if self.pair is not None:
            p, q = self.pair
            if not is_admissible(n, 1 / p, 1 / q):
                raise PreconditionError(f"(p, q)=({p}, {q}) is not admissible in dimension {n}")
            return float(p), float(q)
        sol = find_exponents(n, self.gamma, self.sigma)
        if not sol.feasible:
            raise PreconditionError(f"no exponents for n={n}, γ={self.gamma}, σ={self.sigma}: {sol.message}")
        return 1 / sol.inv_p, 1 / sol.inv_q


def nonlinearity(u: np.ndarray, gamma: float, kind: str) -> np.ndarray:
    mag = np.abs(u)
    if kind == "abs_power":
        return mag**gamma
    return mag ** (gamma - 1) * u


def _time_weights(times: np.ndarray) -> np.ndarray:
    w = np.full(times.size, times[1] - times[0] if times.size > 1 else 1.0)
    if times.size > 1:
        w[0] = w[-1] = 0.5 * w[0]
    return w


@dataclass
class Trajectory:
    """Solution samples on a uniform time grid (spectral and radial)."""

    space: SpaceParams
    times: np.ndarray
    lgrid: np.ndarray
    lweights: np.ndarray
    rgrid: np.ndarray
    rweights: np.ndarray
    uhat: np.ndarray
    vhat: np.ndarray
    u: np.ndarray

    def state(self, j: int) -> WaveState:
        prof = SpectralProfile(self.lgrid, self.uhat[j], self.space, self.lweights)
        return WaveState(prof, prof.with_values(self.vhat[j]), float(self.times[j]))

    def states(self) -> list[WaveState]:
        return [self.state(j) for j in range(self.times.size)]

    def physical_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# space m={self.space.m} k={self.space.k} qtilde={self.space.qtilde!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "r", "u"])
        for j, t in enumerate(self.times):
            for r, val in zip(self.rgrid, np.real(self.u[j])):
                w.writerow([repr(float(t)), repr(float(r)), repr(float(val))])
        return buf.getvalue()

    def spectral_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# space m={self.space.m} k={self.space.k} qtilde={self.space.qtilde!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "lambda", "uhat_re", "uhat_im"])
        for j, t in enumerate(self.times):
            for lam, val in zip(self.lgrid, self.uhat[j]):
                w.writerow([repr(float(t)), repr(float(lam)), repr(float(val.real)), repr(float(val.imag))])
        return buf.getvalue()


@dataclass
class XNorm:
    """Components of the discrete X-norm."""

    sup_h_plus: float
    sup_h_minus: float
    lp_lq: float

    @property
    def total(self) -> float:
        return self.sup_h_plus + self.sup_h_minus + self.lp_lq


def _sobolev_rows(space: SpaceParams, lgrid, lweights, values: np.ndarray, sigma: float, tau: float) -> np.ndarray:
    weight = plancherel_density(space, lgrid) * _tilde_multiplier(space, lgrid) ** sigma * lgrid ** (2 * tau)
    return np.sqrt(plancherel_constant(space) * (np.abs(values) ** 2 @ (lweights * weight)))


def x_norm(
    space: SpaceParams,
    times: np.ndarray,
    lgrid: np.ndarray,
    lweights: np.ndarray,
    rgrid: np.ndarray,
    rweights: np.ndarray,
    uhat: np.ndarray,
    vhat: np.ndarray,
    u: np.ndarray,
    sigma: float,
    p: float,
    q: float,
) -> XNorm:
    """``sup_t ‖u‖_{H^{σ-1/2,1/2}} + sup_t ‖∂_t u‖_{H^{σ-1/2,-1/2}} + ‖u‖_{L^p_t L^q}``.

    The suprema are maxima over the time nodes and the time integral uses the
    trapezoid rule.
    """
    plus = _sobolev_rows(space, lgrid, lweights, uhat, sigma - 0.5, 0.5)
    minus = _sobolev_rows(space, lgrid, lweights, vhat, sigma - 0.5, -0.5)
    lq = (np.abs(u) ** q @ (rweights * density(space, rgrid))) ** (1 / q)
    lp = float(np.sum(_time_weights(times) * lq**p) ** (1 / p))
    return XNorm(refined_max(plus), refined_max(minus), lp)


def refined_max(samples: np.ndarray) -> float:
    """Maximum of a smooth function from uniform samples.

    An interior discrete maximum is refined by the quartic through the five
    nearest samples, maximized on a fine sub-grid between the neighbouring
    nodes. This removes most of the sampling bias of the plain node maximum.
    """
    samples = np.asarray(samples, dtype=float)
    j = int(np.argmax(samples))
    best = float(samples[j])
    if samples.size < 5 or j == 0 or j == samples.size - 1:
        return best
    lo = min(max(j - 2, 0), samples.size - 5)
    offsets = np.arange(lo, lo + 5) - j
    coeffs = np.polyfit(offsets, samples[lo : lo + 5], 4)
    fine = np.polyval(coeffs, np.linspace(-1.0, 1.0, 401))
    return max(best, float(fine.max()))


@dataclass
class PicardDiagnostics:
    """Per-iteration record of a Picard run."""

    converged: bool = False
    diverged: bool = False
    blowup_suspected: bool = False
    iterations: int = 0
    pair: tuple[float, float] = (math.nan, math.nan)
    x_norms: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    contraction_ratios: list = field(default_factory=list)
    sup_lq: list = field(default_factory=list)
    lq_growth: float = math.nan
    alias_tail: float = 0.0
    alias_ok: bool = True
    radial_tail: float = 0.0
    residual: float = math.nan
    message: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=float)


def _setup(space: SpaceParams, f: RadialProfile, g: RadialProfile, lmax: float | None):
    if f.rgrid.shape != g.rgrid.shape or not np.array_equal(f.rgrid, g.rgrid):
        raise PreconditionError("f and g must share one radial grid")
    lgrid, lweights = spectral_grid() if lmax is None else spectral_grid(lmax)
    fhat = forward_sft(f, lgrid, lweights)
    ghat = forward_sft(g, lgrid, lweights)
    ops = _Transforms(space, lgrid, lweights, f.rgrid, f.weights)
    return fhat, ghat, ops


def _linear_arrays(lam: np.ndarray, times: np.ndarray, fhat: np.ndarray, ghat: np.ndarray):
    tl = np.outer(times, lam)
    cos_t = np.cos(tl)
    u = cos_t * fhat + times[:, None] * np.sinc(tl / np.pi) * ghat
    v = -lam * np.sin(tl) * fhat + cos_t * ghat
    return u, v


def picard_solve(
    space: SpaceParams,
    f: RadialProfile,
    g: RadialProfile,
    cfg: SolveConfig,
    lmax: float | None = None,
) -> tuple[Trajectory, PicardDiagnostics]:
    """Fixed-point iteration ``u ← Φ(u)`` of the Duhamel map on ``[0, T]``.

    ``Φ(v) = cos(tD)f + sin(tD)/D g + ∫_0^t sin((t-s)D)/D F(v(s)) ds`` with
    ``F`` scaled by ``cfg.coupling``. Iteration starts from the free solution
    and stops when successive iterates differ by less than ``cfg.tol`` relative
    to the current X-norm. Divergence (the difference doubling twice in a row
    or the X-norm growing by ``DIVERGENCE_FACTOR``) is reported in the
    diagnostics, not raised.
    """
    n = space.n
    p, q = cfg.resolve_pair(n)
    fhat, ghat, ops = _setup(space, f, g, lmax)
    lam = ops.lgrid
    times = np.linspace(0.0, cfg.T, cfg.nt + 1)
    diag = PicardDiagnostics(pair=(p, q))

    lin_u, lin_v = _linear_arrays(lam, times, fhat.values, ghat.values)

    def norm(uh, vh, ur) -> XNorm:
        return x_norm(space, times, lam, ops.lweights, ops.rgrid, ops.rweights, uh, vh, ur, cfg.sigma, p, q)

    def phi(ur: np.ndarray):
        forcing_r = cfg.coupling * nonlinearity(ur, cfg.gamma, cfg.nonlin)
        forcing = ops.forward(forcing_r)
        tw = _time_weights(times)
        diag.alias_tail = max(diag.alias_tail, ops.spectral_tail_share(forcing, tw))
        diag.radial_tail = max(diag.radial_tail, ops.radial_tail_share(forcing_r, tw))
        d, dd = duhamel(lam, times, forcing)
        uh = lin_u + d
        vh = lin_v + dd
        return uh, vh, ops.inverse(uh)

    uh, vh = lin_u.astype(complex), lin_v.astype(complex)
    ur = ops.inverse(uh)
    x0 = norm(uh, vh, ur).total
    diag.x_norms.append(x0)
    diag.sup_lq.append(_sup_lq(space, ops, ur, q))
    grow_count = 0
    for it in range(cfg.picard_max):
        uh_new, vh_new, ur_new = phi(ur)
        diff = norm(uh_new - uh, vh_new - vh, ur_new - ur).total
        xn = norm(uh_new, vh_new, ur_new).total
        diag.differences.append(diff)
        if len(diag.differences) > 1 and diag.differences[-2] > 0:
            ratio = diff / diag.differences[-2]
            diag.contraction_ratios.append(ratio)
            grow_count = grow_count + 1 if ratio >= 2.0 else 0
        diag.x_norms.append(xn)
        diag.sup_lq.append(_sup_lq(space, ops, ur_new, q))
        uh, vh, ur = uh_new, vh_new, ur_new
        diag.iterations = it + 1
        if not np.isfinite(xn) or xn >= DIVERGENCE_FACTOR * x0 or grow_count >= 2:
            diag.diverged = True
            diag.blowup_suspected = True
            diag.message = f"Picard iteration diverged at iteration {it + 1} (X-norm {xn:.3e}, difference {diff:.3e})"
            break
        if diff <= cfg.tol * xn:
            diag.converged = True
            break
    diag.alias_ok = diag.alias_tail < ALIAS_TOL
    if not diag.converged and not diag.diverged:
        diag.message = f"no convergence within {cfg.picard_max} iterations"
    if diag.converged:
        # one more application of Φ measures the fixed-point residual
        uh_chk, vh_chk, ur_chk = phi(ur)
        diag.residual = norm(uh_chk - uh, vh_chk - vh, ur_chk - ur).total / norm(uh, vh, ur).total
    lq0 = diag.sup_lq[0]
    diag.lq_growth = float(diag.sup_lq[-1] / lq0) if lq0 > 0 else math.nan
    traj = Trajectory(space, times, lam, ops.lweights, ops.rgrid, ops.rweights, uh, vh, ur)
    return traj, diag


def _sup_lq(space: SpaceParams, ops: _Transforms, ur: np.ndarray, q: float) -> float:
    lq = (np.abs(ur) ** q @ ops.r_measure) ** (1 / q)
    return float(lq.max())


def contraction_ratio(diag: PicardDiagnostics) -> float:
    """First measured contraction ratio ``‖u2 - u1‖_X / ‖u1 - u0‖_X``."""
    return diag.contraction_ratios[0] if diag.contraction_ratios else math.nan


# ---------------------------------------------------------------------------
# Strichartz ratio


def bessel_lq_norm(space: SpaceParams, ops: _Transforms, ghat: np.ndarray, s: float, q: float) -> np.ndarray:
    """``‖D~^s g‖_{L^q}`` for each row of ``ghat``."""
    mult = _tilde_multiplier(space, ops.lgrid) ** (s / 2)
    vals = ops.inverse(ghat * mult)
    return (np.abs(vals) ** q @ ops.r_measure) ** (1 / q)


def strichartz_ratio(
    space: SpaceParams,
    trajectory: Trajectory,
    pair: tuple[float, float],
    f: RadialProfile,
    g: RadialProfile,
    forcing_history: np.ndarray | None,
    sigma: float,
    sigmatilde: float,
    pairtilde: tuple[float, float],
) -> float:
    """LHS/RHS of the inhomogeneous Strichartz estimate on the trajectory's time interval.

    LHS is ``‖u‖_{L^p_t L^q}``; RHS is ``‖f‖_{H^{σ-1/2,1/2}} + ‖g‖_{H^{σ-1/2,-1/2}}
    + ‖F‖_{L^{p~'}_t H^{σ+σ~-1}_{q~'}}``. ``forcing_history`` holds the
    spectral forcing at each time node (None for the free equation).
    """
    n = space.n
    p, q = pair
    pt, qt = pairtilde
    for name, (pp, qq) in (("(p,q)", pair), ("(p~,q~)", pairtilde)):
        if not is_admissible(n, 1 / pp, 1 / qq):
            raise PreconditionError(
                f"{name}=({pp}, {qq}) is not admissible in dimension {n}: need 2/p + (n-1)/q >= (n-1)/2"
            )
    need = (n + 1) / 2 * (0.5 - 1 / q)
    if sigma < need - 1e-12:
        raise PreconditionError(f"σ={sigma} below (n+1)/2 (1/2 - 1/q) = {need:.6g} required by the Strichartz estimate")
    need_t = (n + 1) / 2 * (0.5 - 1 / qt)
    if sigmatilde < need_t - 1e-12:
        raise PreconditionError(f"σ~={sigmatilde} below (n+1)/2 (1/2 - 1/q~) = {need_t:.6g}")
    times = trajectory.times
    ops = _Transforms(space, trajectory.lgrid, trajectory.lweights, trajectory.rgrid, trajectory.rweights)
    lq = (np.abs(trajectory.u) ** q @ ops.r_measure) ** (1 / q)
    lhs = float(np.sum(_time_weights(times) * lq**p) ** (1 / p))
    fhat = forward_sft(f, trajectory.lgrid, trajectory.lweights)
    ghat = forward_sft(g, trajectory.lgrid, trajectory.lweights)
    rhs = sobolev_norm(space, fhat, sigma - 0.5, 0.5) + sobolev_norm(space, ghat, sigma - 0.5, -0.5)
    if forcing_history is not None:
        p_dual = pt / (pt - 1) if pt > 1 else math.inf
        q_dual = qt / (qt - 1)
        inner = bessel_lq_norm(space, ops, np.asarray(forcing_history), sigma + sigmatilde - 1, q_dual)
        rhs += float(np.sum(_time_weights(times) * inner**p_dual) ** (1 / p_dual))
    if rhs == 0:
        raise PreconditionError("right-hand side vanishes (zero data and forcing)")
    return lhs / rhs


def linear_trajectory(
    space: SpaceParams, f: RadialProfile, g: RadialProfile, T: float, nt: int, lmax: float | None = None
) -> Trajectory:
    """Free solution sampled on a uniform time grid."""
    fhat, ghat, ops = _setup(space, f, g, lmax)
    times = np.linspace(0.0, T, nt + 1)
    uh, vh = _linear_arrays(ops.lgrid, times, fhat.values, ghat.values)
    return Trajectory(space, times, ops.lgrid, ops.lweights, ops.rgrid, ops.rweights, uh, vh, ops.inverse(uh))


def gaussian_data(space: SpaceParams, amplitude: float, width: float = 1.0, rmax: float | None = None):
    """Initial data ``f = amplitude · e^{-r²/width²}``, ``g = 0`` on the default radial grid."""
    r, w = radial_grid() if rmax is None else radial_grid(rmax)
    f = RadialProfile(r, amplitude * np.exp(-((r / width) ** 2)), space, w)
    return f, f.with_values(np.zeros_like(r))
