"""Kernels of the shifted wave propagator and numerical checks of their decay.

The operator ``D^{-τ} D̃^{τ-σ} e^{itD}`` is split with the cutoffs
``χ_0 + χ_∞ = 1`` into a low-frequency kernel ``w_t^0`` and a high-frequency
kernel ``w̃_t^∞``; the latter carries the analytic-family prefactor
``e^{σ²}/Γ((n+1)/2 - σ)`` so that it stays meaningful on the line
``Re σ = (n+1)/2``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats
from scipy.special import rgamma

from .quadrature import panel_rule, uniform_panels
from .space import SpaceParams, density
from .spherical import phi_table, phi_zero, plancherel_density
from .transform import RadialProfile, transform_matrix

PARTS = ("low", "high_regularized", "full")
CUTOFFS = ("smooth", "quintic")
PANEL_PHASE = 2 * np.pi  # largest phase change of e^{i(t±r)λ} across one 16-node panel
PANEL_CAP = 0.1  # panel cap where the symbol itself varies (λ ≤ 2)
LAMBDA_SCALE = 100.0  # high-frequency taper sits at Λ1 = LAMBDA_SCALE / min(|t|, 1)
HIGH_CHUNK = 4096
TRUNCATION_TOL = 0.05
TAPER_REACH = 2.0  # χ_0(λ/Λ1) vanishes beyond 2Λ1


def taper(x: ArrayLike) -> np.ndarray:
    """Smooth cutoff ``χ_0(x)`` applied to the λ-integral at scale Λ1."""
    return chi_cutoffs(x)[0]


class IntegrabilityError(ValueError):
    """Raised when the low-frequency integrand is not integrable at λ = 0."""


class RegimeError(ValueError):
    """Raised when scan ranges do not belong to the requested regime."""


class TruncationLimitError(RuntimeError):
    """Raised when the high-frequency truncation estimate exceeds its tolerance."""


# ---------------------------------------------------------------------------
# Cutoffs
# ---------------------------------------------------------------------------


def _flat_exp(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def chi_cutoffs(lam: ArrayLike, kind: str = "smooth") -> tuple[np.ndarray, np.ndarray]:
    """Partition of unity ``(χ_0, χ_∞)`` with ``χ_0 = 1`` on ``[0, 1]`` and ``0`` on ``[2, ∞)``.

    ``kind="smooth"`` uses the ``C^∞`` transition built from ``e^{-1/x}``;
    ``kind="quintic"`` uses the ``C²`` smoothstep ``1 - (10u³ - 15u⁴ + 6u⁵)``.
    """
    lam = np.asarray(lam, dtype=float)
    u = np.clip(lam - 1.0, 0.0, 1.0)
    if kind == "smooth":
        a, b = _flat_exp(1.0 - u), _flat_exp(u)
        chi0 = a / (a + b)
    elif kind == "quintic":
        chi0 = 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u**2)
    else:
        raise ValueError(f"unknown cutoff kind {kind!r}; expected one of {CUTOFFS}")
    chi0 = np.where(lam <= 1.0, 1.0, np.where(lam >= 2.0, 0.0, chi0))
    return chi0, 1.0 - chi0


# ---------------------------------------------------------------------------
# Requests and tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelRequest:
    """One propagator kernel: order ``σ``, weight ``τ``, time ``t`` and frequency part."""

    sigma: complex
    tau: float
    t: float
    part: str = "low"
    cutoff: str = "smooth"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", complex(self.sigma))
        if self.part not in PARTS:
            raise ValueError(f"part must be one of {PARTS}")
        if self.cutoff not in CUTOFFS:
            raise ValueError(f"cutoff must be one of {CUTOFFS}")
        if self.t == 0:
            raise ValueError("t must be non-zero")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


@dataclass
class KernelTable:
    """Kernel values on a (t, r) grid; ``truncation`` holds per-t error estimates."""

    space: SpaceParams
    sigma: complex
    tau: float
    part: str
    ts: np.ndarray
    rgrid: np.ndarray
    values: np.ndarray
    truncation: np.ndarray | None = None
    cutoff: str = "smooth"

    def profile(self, i: int) -> RadialProfile:
        return RadialProfile(self.rgrid, self.values[i], self.space)

    def to_csv(self) -> str:
        buf = io.StringIO()
        sp = self.space
        buf.write(f"# space m={sp.m} k={sp.k} qtilde={sp.qtilde!r}\n")
        buf.write(f"# kernel part={self.part} sigma={complex(self.sigma)!r} tau={float(self.tau)!r} cutoff={self.cutoff}\n")
        buf.write("t,r,kernel_re,kernel_im\n")
        for t, row in zip(self.ts, self.values):
            for r, v in zip(self.rgrid, row):
                buf.write(f"{float(t)!r},{float(r)!r},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()


def spectral_symbol(space: SpaceParams, lam: ArrayLike, sigma: complex, tau: float) -> np.ndarray:
    """``|c(λ)|^{-2} λ^{-τ} (λ² + Q̃²/4)^{(τ-σ)/2}`` for ``λ > 0`` (``0`` at ``λ = 0``)."""
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam > 0, lam, 1.0)
    shifted = (safe**2 + space.qtilde**2 / 4) ** ((tau - complex(sigma)) / 2)
    out = plancherel_density(space, safe) * safe ** (-tau) * shifted
    return np.where(lam > 0, out, 0.0)


def regularizing_factor(space: SpaceParams, sigma: complex) -> complex:
    """``e^{σ²} / Γ((n+1)/2 - σ)`` (zero at the poles of Γ)."""
    sigma = complex(sigma)
    return complex(np.exp(sigma**2) * rgamma((space.n + 1) / 2 - sigma))


def _panel_width(t_max: float, r_max: float, cap: float | None) -> float:
    width = PANEL_PHASE / (abs(t_max) + r_max + 1e-300)
    return width if cap is None else min(cap, width)


def low_frequency_grid(t_max: float, r_max: float) -> tuple[np.ndarray, np.ndarray]:
    """λ-quadrature on ``[0, 2]`` resolving ``e^{i(t±r)λ}`` and graded at λ = 0."""
    width = _panel_width(t_max, r_max, PANEL_CAP)
    npan = max(1, int(np.ceil(2.0 / width)))
    edges = np.linspace(0.0, 2.0, npan + 1)
    inner = edges[1] * 2.0 ** -np.arange(20, 0, -1)
    return panel_rule(np.concatenate([[0.0], inner, edges[1:]]))


# ---------------------------------------------------------------------------
# Low-frequency kernel
# ---------------------------------------------------------------------------


def _check_low(tau: float) -> None:
    if tau >= 2:
        raise IntegrabilityError("the low-frequency kernel needs tau < 2 (|c|^-2 λ^-τ must be integrable at 0)")


def kernel_w0_table(
    space: SpaceParams,
    sigma: complex,
    tau: float,
    ts: ArrayLike,
    rgrid: ArrayLike,
    cutoff: str = "smooth",
) -> KernelTable:
    """``w_t^0(r) = ∫_0^2 χ_0 |c|^{-2} λ^{-τ} (λ²+Q̃²/4)^{(τ-σ)/2} φ_λ(r) e^{itλ} dλ`` on a grid.

    One λ-grid (fine enough for the largest ``|t|``) and one φ table serve
    every time in ``ts``.
    """
    _check_low(tau)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    rgrid = np.atleast_1d(np.asarray(rgrid, dtype=float))
    if np.any(ts == 0):
        raise ValueError("t must be non-zero")
    lam, w = low_frequency_grid(np.max(np.abs(ts)), rgrid.max())
    phi = transform_matrix(space, lam, rgrid)
    weight = w * chi_cutoffs(lam, cutoff)[0] * spectral_symbol(space, lam, sigma, tau)
    vals = np.empty((ts.size, rgrid.size), dtype=complex)
    for i, t in enumerate(ts):
        vals[i] = (weight * np.exp(1j * t * lam)) @ phi
    return KernelTable(space, complex(sigma), tau, "low", ts, rgrid, vals, cutoff=cutoff)


def kernel_w0(space: SpaceParams, req: KernelRequest, rgrid: ArrayLike) -> RadialProfile:
    """Low-frequency kernel ``w_t^0`` for one request, as a radial profile."""
    if req.part != "low":
        raise ValueError("kernel_w0 needs a request with part='low'")
    return kernel_w0_table(space, req.sigma, req.tau, [req.t], rgrid, req.cutoff).profile(0)


# ---------------------------------------------------------------------------
# High-frequency kernel
# ---------------------------------------------------------------------------


def _high_grid(t_max: float, r_max: float, top: float) -> tuple[np.ndarray, np.ndarray]:
    # The cutoff transition on [1, 2] is resolved finely; beyond it only the
    # oscillation and the slowly varying symbol matter.
    n1, w1 = uniform_panels(1.0, 2.0, _panel_width(t_max, r_max, PANEL_CAP))
    n2, w2 = uniform_panels(2.0, top, _panel_width(t_max, r_max, None))
    return np.concatenate([n1, n2]), np.concatenate([w1, w2])


def _check_high(space: SpaceParams, sigma: complex, tau: float) -> None:
    if not 0 <= tau < 1.5:
        raise ValueError("tau must lie in [0, 3/2)")
    if not 0 <= complex(sigma).real <= (space.n + 1) / 2 + 1e-12:
        raise ValueError("Re sigma must lie in [0, (n+1)/2] for the regularized high-frequency kernel")


def kernel_w_inf_table(
    space: SpaceParams,
    sigma: complex,
    tau: float,
    ts: ArrayLike,
    rgrid: ArrayLike,
    cutoff: str = "smooth",
    lam_scale: float = LAMBDA_SCALE,
    tol: float | None = TRUNCATION_TOL,
    regularized: bool = True,
) -> KernelTable:
    """High-frequency kernel ``w̃_t^∞`` on a (t, r) grid.

    The integral over ``λ ≥ 1`` is cut off smoothly with ``χ_0(λ/Λ1)``,
    ``Λ1 = lam_scale/min(|t|, 1)``.  The truncation estimate for each ``t`` is
    ``max |w_{Λ1} - w_{Λ1/2}| / max |w_{Λ1}|`` over radii with
    ``|r - |t|| ≥ 10/Λ1``; on the light cone itself the regularized integral
    is bounded but does not settle pointwise.

    Radii below and above 1 get separate λ-grids (the oscillation rate grows
    with r); φ is evaluated chunk by chunk and each chunk is reused for all t.
    """
    _check_high(space, sigma, tau)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    rgrid = np.atleast_1d(np.asarray(rgrid, dtype=float))
    if np.any(ts == 0):
        raise ValueError("t must be non-zero")
    lam1 = lam_scale / np.minimum(np.abs(ts), 1.0)
    top = TAPER_REACH * lam1.max()
    t_max = np.max(np.abs(ts))
    full = np.zeros((ts.size, rgrid.size), dtype=complex)
    half = np.zeros_like(full)
    for block in (rgrid < 1.0, rgrid >= 1.0):
        if not np.any(block):
            continue
        rb = rgrid[block]
        lam, w = _high_grid(t_max, rb.max(), top)
        base = w * chi_cutoffs(lam, cutoff)[1] * spectral_symbol(space, lam, sigma, tau)
        acc_full = np.zeros((ts.size, rb.size), dtype=complex)
        acc_half = np.zeros_like(acc_full)
        for start in range(0, lam.size, HIGH_CHUNK):
            sl = slice(start, start + HIGH_CHUNK)
            lc = lam[sl]
            phi = phi_table(space, lc, rb)
            for i, t in enumerate(ts):
                osc = base[sl] * np.exp(1j * t * lc)
                acc_full[i] += (osc * taper(lc / lam1[i])) @ phi
                acc_half[i] += (osc * taper(2 * lc / lam1[i])) @ phi
        full[:, block] = acc_full
        half[:, block] = acc_half
    pref = regularizing_factor(space, sigma) if regularized else 1.0
    full *= pref
    half *= pref
    trunc = np.zeros(ts.size)
    for i, t in enumerate(ts):
        away = np.abs(rgrid - abs(t)) >= 10.0 / lam1[i]
        scale = np.max(np.abs(full[i])) if full[i].size else 0.0
        if np.any(away) and scale > 0:
            trunc[i] = np.max(np.abs(full[i, away] - half[i, away])) / scale
    if tol is not None and np.any(trunc > tol):
        bad = ts[np.argmax(trunc)]
        raise TruncationLimitError(
            f"high-frequency truncation estimate {trunc.max():.2e} exceeds {tol:g} at t={bad:g}; raise lam_scale"
        )
    part = "high_regularized" if regularized else "high"
    return KernelTable(space, complex(sigma), tau, part, ts, rgrid, full, trunc, cutoff)


def kernel_w_inf(space: SpaceParams, req: KernelRequest, rgrid: ArrayLike, **kwargs) -> RadialProfile:
    """Regularized high-frequency kernel ``w̃_t^∞`` for one request."""
    if req.part != "high_regularized":
        raise ValueError("kernel_w_inf needs a request with part='high_regularized'")
    table = kernel_w_inf_table(space, req.sigma, req.tau, [req.t], rgrid, req.cutoff, **kwargs)
    return table.profile(0)


def kernel_full(space: SpaceParams, req: KernelRequest, rgrid: ArrayLike, **kwargs) -> RadialProfile:
    """``w_t^0 + w_t^∞`` without the analytic-family prefactor."""
    low = kernel_w0_table(space, req.sigma, req.tau, [req.t], rgrid, req.cutoff).values[0]
    high = kernel_w_inf_table(
        space, req.sigma, req.tau, [req.t], rgrid, req.cutoff, regularized=False, **kwargs
    ).values[0]
    return RadialProfile(np.asarray(rgrid, dtype=float), low + high, space)


def kernel(space: SpaceParams, req: KernelRequest, rgrid: ArrayLike, **kwargs) -> RadialProfile:
    """Dispatch on ``req.part``."""
    if req.part == "low":
        return kernel_w0(space, req, rgrid)
    if req.part == "high_regularized":
        return kernel_w_inf(space, req, rgrid, **kwargs)
    return kernel_full(space, req, rgrid, **kwargs)


@lru_cache(maxsize=32)
def _cached_w_inf(space, sigma, tau, ts, rs, cutoff):
    return kernel_w_inf_table(space, sigma, tau, np.array(ts), np.array(rs), cutoff)


@lru_cache(maxsize=32)
def _cached_w0(space, sigma, tau, ts, rs, cutoff):
    return kernel_w0_table(space, sigma, tau, np.array(ts), np.array(rs), cutoff)


# ---------------------------------------------------------------------------
# Envelope scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Regime:
    """A pointwise estimate: which kernel, which (t, r) range, which envelope.

    ``scale`` names the variable along which the estimate is asymptotic; the
    divergence test looks at the ratio as that variable grows.  ``shifted``
    names the envelope exponent that ``exponent_shift`` modifies.
    """

    name: str
    part: str
    description: str
    scale: str
    shifted: str


REGIMES = {
    r.name: r
    for r in (
        Regime("low_short_time", "low", "|t| <= 2, all r: |w0| <~ phi0(r)", "r", "exponential rate"),
        Regime("low_long_time_inner", "low", "|t| >= 2, r <= |t|/2: |w0| <~ |t|^(tau-3) phi0(r)", "t", "power of |t|"),
        Regime(
            "low_long_time_outer",
            "low",
            "|t| >= 2, r >= |t|/2: |w0| <~ (1+|r-|t||)^(tau-2) e^(-Qr/2)",
            "1+|r-t|",
            "power of 1+|r-|t||",
        ),
        Regime(
            "high_short_time_inner",
            "high_regularized",
            "0 < |t| <= 2, r <= 3: |w_inf| <~ |t|^(-(n-1)/2)",
            "1/t",
            "power of |t|",
        ),
        Regime(
            "high_short_time_outer",
            "high_regularized",
            "0 < |t| <= 2, r >= 3: |w_inf| <~ r^(-N) e^(-Qr/2)",
            "r",
            "exponential rate",
        ),
        Regime(
            "high_long_time",
            "high_regularized",
            "|t| >= 2: |w_inf| <~ (1+|r-|t||)^(-N) e^(-Qr/2)",
            "r",
            "exponential rate",
        ),
    )
}


@dataclass
class EnvelopeReport:
    """Outcome of one envelope scan.

    ``max_ratio`` is the sup of ``|kernel|/envelope`` (so also the best
    constant on the scanned grid); ``diverging`` flags a ratio that keeps
    growing along the regime's scale variable.
    """

    region: str
    max_ratio: float
    fitted_constant: float
    diverging: bool
    slope: float
    scale: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    description: str = ""

    def to_csv_row(self) -> str:
        return f"{self.region},{float(self.max_ratio)!r},{float(self.fitted_constant)!r}"


def envelope_csv(reports: list[EnvelopeReport]) -> str:
    return "regime,max_ratio,constant\n" + "".join(r.to_csv_row() + "\n" for r in reports)


DIVERGENCE_FACTOR = 10.0
DIVERGENCE_SLOPE = 0.5


def divergence_test(scale: np.ndarray, ratios: np.ndarray) -> tuple[bool, float]:
    """Flag ratios that grow along ``scale``.

    Divergent when the largest ratio over the top quarter of the scale range
    exceeds ``DIVERGENCE_FACTOR`` times the median, or when the log–log slope
    over the upper half is above ``DIVERGENCE_SLOPE``.  Returns the flag and
    the slope.
    """
    order = np.argsort(scale)
    s, q = np.asarray(scale, float)[order], np.asarray(ratios, float)[order]
    pos = q > 0
    if pos.sum() < 3:
        return False, 0.0
    s, q = s[pos], q[pos]
    med = np.median(q)
    top = s >= np.quantile(s, 0.75)
    upper = s >= np.quantile(s, 0.5)
    slope = float(np.polyfit(np.log(s[upper]), np.log(q[upper]), 1)[0]) if upper.sum() >= 2 else 0.0
    return bool(q[top].max() > DIVERGENCE_FACTOR * med or slope > DIVERGENCE_SLOPE), slope


def envelope_scan(
    space: SpaceParams,
    sigma: complex,
    tau: float,
    regime: str,
    ts: ArrayLike,
    rs: ArrayLike,
    N: int = 3,
    exponent_shift: float = 0.0,
    cutoff: str = "smooth",
    table: KernelTable | None = None,
) -> EnvelopeReport:
    """Sup of ``|kernel| / envelope`` over a (t, r) scan for one regime.

    ``exponent_shift`` strengthens (negative) or weakens (positive) the claimed
    decay: it is added to the power of ``|t|`` or ``1+|r-|t||``, multiplies the
    envelope by ``(1/|t|)^{shift}`` in the short-time regime, or adds to the
    exponential rate (``e^{shift·r}``) where the polynomial part is ``r^{-∞}``
    or ``φ_0``.  A negative shift is the negative control: the scan must then
    report divergence.

    A precomputed ``table`` on the same ``(ts, rs)`` may be passed to avoid
    recomputing the kernel.
    """
    if regime not in REGIMES:
        raise RegimeError(f"unknown regime {regime!r}; expected one of {sorted(REGIMES)}")
    reg = REGIMES[regime]
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    at = np.abs(ts)
    short = regime in ("low_short_time", "high_short_time_inner", "high_short_time_outer")
    if short and np.any(at > 2):
        raise RegimeError(f"regime {regime} needs |t| <= 2")
    if not short and np.any(at < 2):
        raise RegimeError(f"regime {regime} needs |t| >= 2")
    if regime == "high_short_time_inner" and np.any(rs > 3):
        raise RegimeError("regime high_short_time_inner needs r <= 3")
    if regime == "high_short_time_outer" and np.any(rs < 3):
        raise RegimeError("regime high_short_time_outer needs r >= 3")
    if regime == "low_long_time_inner" and not np.any(rs[:, None] <= at[None, :] / 2):
        raise RegimeError("no radius with r <= |t|/2 in the scan")
    if regime == "low_long_time_outer" and not np.any(rs[:, None] >= at[None, :] / 2):
        raise RegimeError("no radius with r >= |t|/2 in the scan")

    if table is None:
        if reg.part == "low":
            table = _cached_w0(space, complex(sigma), tau, tuple(ts), tuple(rs), cutoff)
        else:
            table = _cached_w_inf(space, complex(sigma), tau, tuple(ts), tuple(rs), cutoff)
    vals = np.abs(table.values)
    Q = space.Q
    R = rs[None, :]
    T = at[:, None]
    shift = exponent_shift
    with np.errstate(divide="ignore", over="ignore"):
        if regime == "low_short_time":
            env = phi_zero(space, rs)[None, :] * np.exp(shift * R) * np.ones_like(T)
            mask = np.ones(vals.shape, bool)
            scale = np.broadcast_to(R, vals.shape)
        elif regime == "low_long_time_inner":
            env = T ** (tau - 3 + shift) * phi_zero(space, rs)[None, :]
            mask = R <= T / 2
            scale = np.broadcast_to(T, vals.shape)
        elif regime == "low_long_time_outer":
            env = (1 + np.abs(R - T)) ** (tau - 2 + shift) * np.exp(-Q * R / 2)
            mask = R >= T / 2
            scale = 1 + np.abs(R - T)
        elif regime == "high_short_time_inner":
            env = T ** (-(space.n - 1) / 2 - shift) * np.ones_like(R)
            mask = np.ones(vals.shape, bool)
            scale = np.broadcast_to(1 / T, vals.shape)
        elif regime == "high_short_time_outer":
            env = R ** (-float(N)) * np.exp((-Q / 2 + shift) * R) * np.ones_like(T)
            mask = np.ones(vals.shape, bool)
            scale = np.broadcast_to(R, vals.shape)
        else:  # high_long_time
            env = (1 + np.abs(R - T)) ** (-float(N)) * np.exp((-Q / 2 + shift) * R)
            mask = np.ones(vals.shape, bool)
            scale = np.broadcast_to(R, vals.shape)
    # Points where the envelope underflows carry no information.
    mask = mask & (env > 1e-290)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mask, vals / np.where(mask, env, 1.0), np.nan)
    # Sup over the non-scale variable for each distinct value of the scale variable.
    sc = np.round(np.asarray(scale)[mask], 12)
    rt = ratio[mask]
    uniq = np.unique(sc)
    sups = np.array([rt[sc == u].max() for u in uniq])
    diverging, slope = divergence_test(uniq, sups)
    max_ratio = float(np.nanmax(ratio)) if np.any(mask) else 0.0
    if not np.isfinite(max_ratio):
        diverging = True
    return EnvelopeReport(regime, max_ratio, max_ratio, diverging, slope, uniq, sups, reg.description)


# ---------------------------------------------------------------------------
# Dispersive bounds
# ---------------------------------------------------------------------------


def criterion_bound(
    space: SpaceParams, kappa: RadialProfile, q: float, qtilde: float, tail_tol: float = 1e-12
) -> float:
    """``(∫ V φ_0^ν |κ|^α dr)^{1/α}`` with ``ν = 2 min(q,q̃)/(q+q̃)``, ``α = q q̃/(q+q̃)``.

    Up to a constant this bounds the ``L^{q̃'} → L^q`` norm of convolution with
    the radial kernel ``κ``.
    """
    if not (q > 2 and qtilde > 2):
        raise ValueError("q and qtilde must both exceed 2")
    nu = 2 * min(q, qtilde) / (q + qtilde)
    alpha = q * qtilde / (q + qtilde)
    r = kappa.rgrid
    integrand = density(space, r) * phi_zero(space, r) ** nu * np.abs(kappa.values) ** alpha
    total = float(np.sum(kappa.weights * integrand))
    if total == 0:
        return 0.0
    edge = integrand[-max(1, r.size // 50) :].max() * (r[-1] - r[0]) / total
    if edge > tail_tol:
        raise ValueError(f"kernel not sampled far enough: end-of-grid integrand share {edge:.1e} > {tail_tol:g}")
    return total ** (1 / alpha)


def _fit(ts: np.ndarray, vals: np.ndarray) -> tuple[float, tuple[float, float]]:
    res = stats.linregress(np.log(ts), np.log(vals))
    if ts.size > 2:
        half = stats.t.ppf(0.975, ts.size - 2) * res.stderr
    else:
        half = np.inf
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


@dataclass
class DispersiveFit:
    """Small- and large-time decay slopes with 95% confidence intervals."""

    small_t_slope: float
    small_t_ci: tuple[float, float]
    large_t_slope: float
    large_t_ci: tuple[float, float]
    small_ts: np.ndarray = field(repr=False)
    small_values: np.ndarray = field(repr=False)
    large_ts: np.ndarray = field(repr=False)
    large_values: np.ndarray = field(repr=False)
    theta: float = 1.0


SMALL_TS = (0.05, 0.1, 0.2, 0.5)
LARGE_TS = (128.0, 256.0, 512.0, 1024.0)
ENDPOINT_ZETA = 1.0


def endpoint_sup(space: SpaceParams, tau: float, ts: ArrayLike, zeta: float = ENDPOINT_ZETA, r_max: float = 3.0, dr: float = 0.05):
    """``sup_{r ≤ r_max} |w̃_t^∞(r)|`` at ``σ = (n+1)/2 + iζ`` for each t."""
    rs = np.round(np.arange(0.0, r_max + dr / 2, dr), 12)
    sigma = complex((space.n + 1) / 2, zeta)
    table = _cached_w_inf(space, sigma, float(tau), tuple(float(t) for t in ts), tuple(rs), "smooth")
    return np.max(np.abs(table.values), axis=1)


def large_time_radii(t_max: float, r_far: float = 40.0, width: float = 0.25) -> tuple[np.ndarray, np.ndarray]:
    """Radial quadrature reaching past the light cone of the largest time (or ``r_far``)."""
    return uniform_panels(0.0, max(r_far, min(t_max + 20.0, 200.0)), width)


def dispersive_decay_fit(
    space: SpaceParams,
    q: float,
    sigma: float,
    tau: float,
    small_ts: ArrayLike = SMALL_TS,
    large_ts: ArrayLike = LARGE_TS,
    zeta: float = ENDPOINT_ZETA,
    cutoff: str = "smooth",
) -> DispersiveFit:
    """Decay slopes of the ``L^{q'} → L^q`` bound for small and large ``|t|``.

    Small times: the bound interpolates between ``L² → L²`` (time independent)
    and ``L¹ → L^∞`` at ``Re σ = (n+1)/2`` with weight ``θ = 1 - 2/q``, so the
    proxy is ``(sup_r |w̃_t^∞|)^θ``.  Large times: :func:`criterion_bound` of
    ``w_t^0`` with ``q = q̃``.
    """
    n = space.n
    if not 2 < q < np.inf:
        raise ValueError("q must lie in (2, inf)")
    if not 0 <= tau < 1.5:
        raise ValueError("tau must lie in [0, 3/2)")
    threshold = (n + 1) * (0.5 - 1 / q)
    if sigma < threshold - 1e-12:
        raise ValueError(
            f"sigma={sigma} is below (n+1)(1/2-1/q)={threshold:.6g}, the regularity the dispersive estimate assumes"
        )
    theta = 1 - 2 / q
    small_ts = np.asarray(small_ts, dtype=float)
    large_ts = np.asarray(large_ts, dtype=float)
    small_vals = endpoint_sup(space, tau, small_ts, zeta) ** theta
    r, w = large_time_radii(large_ts.max())
    table = _cached_w0(space, complex(sigma), float(tau), tuple(large_ts), tuple(r), cutoff)
    large_vals = np.array(
        [criterion_bound(space, RadialProfile(r, row, space, w), q, q) for row in table.values]
    )
    s_slope, s_ci = _fit(small_ts, small_vals)
    l_slope, l_ci = _fit(large_ts, large_vals)
    return DispersiveFit(s_slope, s_ci, l_slope, l_ci, small_ts, small_vals, large_ts, large_vals, theta)
