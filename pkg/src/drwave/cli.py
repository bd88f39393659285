"""Command-line front end: ``drwave <group> <action> [options]``.

Every command writes its artifacts to ``--outdir`` as
``<command>-<spacehash>-<paramhash>.<ext>`` together with a manifest JSON that
echoes the full run configuration, the package versions and the seed. Runs
with identical configuration produce byte-identical files.

Exit codes: 0 success, 1 validation error (bad arguments or violated
hypotheses), 2 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy

from . import __version__
from . import kernels as K
from . import spherical as S
from . import strichartz as X
from . import transform as T
from . import wavesolver as W
from .space import SpaceParams, SpaceValidationError, new_space, omega_coeffs, omega_growth_constant

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TOLERANCE = 2


class UsageError(Exception):
    """Bad command line or config file."""


class ToleranceFailure(Exception):
    """A numerical check missed its tolerance; artifacts are still written."""


VALIDATION_ERRORS = (
    UsageError,
    SpaceValidationError,
    X.ExponentRangeError,
    W.PreconditionError,
    K.IntegrabilityError,
    K.RegimeError,
    S.SingularityError,
    ValueError,
)
TOLERANCE_ERRORS = (
    ToleranceFailure,
    T.TruncationError,
    T.ResolutionError,
    T.SmoothnessError,
    K.TruncationLimitError,
    S.BranchMismatchError,
)


# ---------------------------------------------------------------------------
# Run configuration and reporting
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Resolved configuration of one command (echoed in the manifest)."""

    command: str
    m: int | None
    k: int | None
    qtilde: float | None
    rmax: float
    r_panel: float
    lmax: float
    lambda_panel: float
    outdir: str
    seed: int
    options: dict[str, Any] = field(default_factory=dict)

    def space(self) -> SpaceParams:
        if self.m is None or self.k is None:
            raise UsageError(f"{self.command} needs --m and --k")
        return new_space(self.m, self.k, self.qtilde)

    def space_hash(self) -> str:
        if self.m is None:
            key = json.dumps({"n": self.options.get("n")})
        else:
            key = self.space().key
        return _short_hash(key)

    def param_hash(self) -> str:
        payload = {
            "grid": [self.rmax, self.r_panel, self.lmax, self.lambda_panel],
            "seed": self.seed,
            "options": self.options,
        }
        return _short_hash(json.dumps(payload, sort_keys=True, default=_jsonable))

    def stem(self) -> str:
        return f"{self.command.replace(' ', '_')}-{self.space_hash()}-{self.param_hash()}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "space": {"m": self.m, "k": self.k, "qtilde": self.qtilde},
            "grid": {
                "rmax": self.rmax,
                "r_panel": self.r_panel,
                "lmax": self.lmax,
                "lambda_panel": self.lambda_panel,
            },
            "outdir": self.outdir,
            "seed": self.seed,
            "options": self.options,
        }


def _short_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:10]


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable, allow_nan=True) + "\n"


def versions() -> dict[str, str]:
    return {
        "drwave": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def report(cfg: RunConfig, artifacts: dict[str, str], status: str = "ok") -> list[Path]:
    """Write ``artifacts`` (extension → text) and the manifest; return the paths."""
    out = Path(cfg.outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from exc
    stem = cfg.stem()
    paths = []
    for ext, text in artifacts.items():
        path = out / f"{stem}.{ext}"
        path.write_text(text)
        paths.append(path)
    manifest = {
        "config": cfg.to_dict(),
        "versions": versions(),
        "seed": cfg.seed,
        "status": status,
        "artifacts": sorted(p.name for p in paths),
    }
    mpath = out / f"{stem}.manifest.json"
    mpath.write_text(_dumps(manifest))
    return paths + [mpath]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _grid_r(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    return T.radial_grid(cfg.rmax, cfg.r_panel)


def _grid_l(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    return T.spectral_grid(cfg.lmax, cfg.lambda_panel)


def _radii(opts: dict[str, Any]) -> np.ndarray:
    lo, hi, step = opts["r_min"], opts["r_max"], opts["r_step"]
    if not (0 <= lo <= hi and step > 0):
        raise UsageError("need 0 <= r-min <= r-max and r-step > 0")
    return np.round(np.arange(lo, hi + step / 2, step), 12)


def cmd_space_info(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    jmax = int(cfg.options["jmax"])
    info = {
        "m": sp.m,
        "k": sp.k,
        "n": sp.n,
        "Q": sp.Q,
        "qtilde": sp.qtilde,
        "omega_coeffs": [float(w) for w in omega_coeffs(sp, jmax).as_array()],
        "omega_growth_constant": float(omega_growth_constant(sp)),
    }
    print(f"n={sp.n} Q={sp.Q} qtilde={sp.qtilde:g}")
    return {"json": _dumps(info)}, "ok"


def cmd_spherical_eval(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    lams = np.asarray(cfg.options["lam"], dtype=float)
    rs = _radii(cfg.options)
    table = S.phi_table(sp, lams, rs)
    lines = [f"# space m={sp.m} k={sp.k} qtilde={sp.qtilde!r}", "lambda,r,phi"]
    for lam, row in zip(lams, table):
        lines += [f"{float(lam)!r},{float(r)!r},{float(v)!r}" for r, v in zip(rs, row)]
    return {"csv": "\n".join(lines) + "\n"}, "ok"


ROUNDTRIP_FAMILY: dict[str, Callable[[SpaceParams], Callable]] = {
    "gaussian": lambda sp: (lambda r: np.exp(-(r**2))),
    "sech": lambda sp: (lambda r: (1 + r**2) / np.cosh(r) ** (sp.Q + 2)),
    "ring": lambda sp: (lambda r: np.exp(-((r**2 - 9) ** 2) / 16)),
}


def roundtrip_errors(sp: SpaceParams, names, rgrid=None, lgrid=None) -> dict[str, dict[str, float]]:
    """Roundtrip L²(dµ) error and Plancherel mismatch for each named profile."""
    r, rw = rgrid if rgrid is not None else T.radial_grid()
    lam, lw = lgrid if lgrid is not None else T.spectral_grid()
    c_s = T.plancherel_constant(sp)
    out = {}
    for name in names:
        fn = ROUNDTRIP_FAMILY[name](sp)
        f = T.RadialProfile(r, fn(r), sp, rw)
        g = T.forward_sft(f, lam, lw)
        back = T.inverse_sft(g, r, rw)
        out[name] = {
            "roundtrip_error": T.relative_l2_error(back, f),
            "plancherel_constant": T.l2_norm_sq(f) / T.spectral_l2_sq(g, 1.0),
            "plancherel_mismatch": T.l2_norm_sq(f) / T.spectral_l2_sq(g, c_s) - 1,
        }
    return out


def cmd_transform_roundtrip(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    names = cfg.options["family"]
    unknown = sorted(set(names) - set(ROUNDTRIP_FAMILY))
    if unknown:
        raise UsageError(f"unknown profiles {unknown}; choose from {sorted(ROUNDTRIP_FAMILY)}")
    tol = cfg.options["tol"]
    res = roundtrip_errors(sp, names, _grid_r(cfg), _grid_l(cfg))
    consts = [v["plancherel_constant"] for v in res.values()]
    spread = (max(consts) - min(consts)) / np.mean(consts)
    body = {"profiles": res, "c_S": T.plancherel_constant(sp), "c_S_spread": spread, "tol": tol}
    failed = [k for k, v in res.items() if not v["roundtrip_error"] < tol]
    for name, v in res.items():
        print(f"{name}: roundtrip {v['roundtrip_error']:.3e}  plancherel {v['plancherel_mismatch']:+.3e}")
    if failed:
        return {"json": _dumps(body)}, f"roundtrip error above {tol:g} for {failed}"
    return {"json": _dumps(body)}, "ok"


def _sigma(opts: dict[str, Any], space: SpaceParams | None = None) -> complex:
    sigma = opts.get("sigma")
    if sigma is None:
        if space is None:
            raise UsageError("--sigma is required")
        sigma = (space.n + 1) / 2
    return complex(float(sigma), float(opts.get("zeta") or 0.0))


def cmd_kernel_table(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    o = cfg.options
    ts = np.asarray(o["t"], dtype=float)
    rs = _radii(o)
    if o["part"] == "low":
        table = K.kernel_w0_table(sp, _sigma(o), o["tau"], ts, rs, cutoff=o["cutoff"])
    else:
        table = K.kernel_w_inf_table(sp, _sigma(o, sp), o["tau"], ts, rs, cutoff=o["cutoff"])
    return {"csv": table.to_csv()}, "ok"


def default_scan(space: SpaceParams, regime: str) -> dict[str, Any]:
    """Scan windows used by ``kernel verify`` for each regime."""
    top = complex((space.n + 1) / 2, K.ENDPOINT_ZETA)
    grid = lambda a, b, h: np.round(np.arange(a, b + h / 2, h), 12)  # noqa: E731
    return {
        "low_short_time": dict(sigma=0.5, tau=0.0, ts=[0.5, 1.0, 2.0], rs=grid(0, 12, 0.25)),
        "low_long_time_inner": dict(sigma=0.5, tau=0.0, ts=[4.0, 8.0, 16.0, 32.0, 64.0], rs=grid(0, 32, 0.25)),
        "low_long_time_outer": dict(sigma=0.5, tau=1.0, ts=[8.0], rs=grid(4, 208, 1.0)),
        "high_short_time_inner": dict(sigma=top, tau=0.0, ts=[0.05, 0.1, 0.2, 0.5], rs=grid(0, 3, 0.05)),
        "high_short_time_outer": dict(sigma=top, tau=0.0, ts=[0.5, 1.0, 2.0], rs=grid(3, 12, 0.25)),
        "high_long_time": dict(sigma=top, tau=0.0, ts=[6.0], rs=grid(0, 206, 1.0)),
    }[regime]


def cmd_kernel_verify(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    o = cfg.options
    regimes = o["regime"] or list(K.REGIMES)
    unknown = sorted(set(regimes) - set(K.REGIMES))
    if unknown:
        raise UsageError(f"unknown regimes {unknown}; choose from {sorted(K.REGIMES)}")
    reports, failures = [], []
    for name in regimes:
        scan = default_scan(sp, name)
        if o["tau"] is not None:
            scan["tau"] = o["tau"]
        rep = K.envelope_scan(
            sp, scan["sigma"], scan["tau"], name, scan["ts"], scan["rs"], N=o["order"], exponent_shift=o["shift"]
        )
        reports.append(rep)
        flag = "DIVERGING" if rep.diverging else "bounded"
        print(f"{name}: max ratio {rep.max_ratio:.4g} ({flag})")
        if rep.diverging:
            failures.append(name)
    lines = ["regime,max_ratio,constant,diverging"]
    lines += [f"{r.region},{float(r.max_ratio)!r},{float(r.fitted_constant)!r},{int(r.diverging)}" for r in reports]
    lines += [f"FAILED,{name},divergence flag raised," for name in failures]
    status = f"divergence flag in regimes {failures}" if failures else "ok"
    return {"csv": "\n".join(lines) + "\n"}, status


def cmd_dispersive_fit(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    o = cfg.options
    fit = K.dispersive_decay_fit(sp, o["q"], o["sigma"], o["tau"], o["small_ts"], o["large_ts"])
    body = {
        "q": o["q"],
        "sigma": o["sigma"],
        "tau": o["tau"],
        "small_t_slope": fit.small_t_slope,
        "small_t_ci": fit.small_t_ci,
        "small_t_target": -(sp.n - 1) * (0.5 - 1 / o["q"]),
        "large_t_slope": fit.large_t_slope,
        "large_t_ci": fit.large_t_ci,
        "large_t_target": o["tau"] - 3,
        "small_ts": fit.small_ts,
        "small_values": fit.small_values,
        "large_ts": fit.large_ts,
        "large_values": fit.large_values,
    }
    print(f"small-t slope {fit.small_t_slope:.4f}  large-t slope {fit.large_t_slope:.4f}")
    return {"json": _dumps(body)}, "ok"


def cmd_region_curve(cfg: RunConfig) -> tuple[dict[str, str], str]:
    o = cfg.options
    return {"csv": X.region_curve_csv(X.region_curve(o["n"], o["step"]), o["n"])}, "ok"


def cmd_exponents_find(cfg: RunConfig) -> tuple[dict[str, str], str]:
    o = cfg.options
    sol = X.find_exponents(o["n"], o["gamma"], o["sigma"])
    text = _dumps(sol.to_dict())
    print(text, end="")
    if not sol.feasible:
        raise _Infeasible({"json": text}, f"no admissible exponents: {sol.message}")
    return {"json": text}, "ok"


class _Infeasible(Exception):
    def __init__(self, artifacts: dict[str, str], message: str) -> None:
        super().__init__(message)
        self.artifacts = artifacts


def _data(cfg: RunConfig, sp: SpaceParams, amplitude: float, width: float):
    f, g = W.gaussian_data(sp, amplitude, width, cfg.rmax)
    return f, g


def cmd_solve_linear(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    o = cfg.options
    f, g = _data(cfg, sp, o["amplitude"], o["width"])
    nt = o["nt"] or int(math.ceil(10 * o["T"]))
    traj = W.linear_trajectory(sp, f, g, o["T"], nt, cfg.lmax)
    e = np.array([W.energy(sp, s) for s in traj.states()])
    drift = float(np.max(np.abs(e - e[0])) / e[0]) if e[0] > 0 else 0.0
    body: dict[str, Any] = {"energy0": float(e[0]), "energy_drift": drift, "nt": nt, "T": o["T"]}
    if o["ensemble"]:
        body["strichartz"] = strichartz_ensemble(sp, o["ensemble"], cfg.seed, o["T"], nt, cfg.rmax, cfg.lmax)
    print(f"energy drift {drift:.3e}")
    artifacts = {"json": _dumps(body), "csv": traj.physical_csv(), "spectral.csv": traj.spectral_csv()}
    if drift >= o["energy_tol"]:
        return artifacts, f"energy drift {drift:.3e} above {o['energy_tol']:g}"
    return artifacts, "ok"


def strichartz_ensemble(
    sp: SpaceParams, count: int, seed: int, T_end: float, nt: int, rmax: float, lmax: float
) -> dict[str, Any]:
    """Free-wave Strichartz ratios for ``count`` random Gaussians (seeded)."""
    rng = np.random.default_rng(seed)
    pair = (2.0, 8.0 / 3.0)  # (1/p, 1/q) = (1/2, 3/8)
    sigma = (sp.n + 1) / 2 * (0.5 - 1 / pair[1])
    ratios = []
    for _ in range(count):
        amp = float(rng.uniform(1e-3, 1e-2))
        width = float(rng.uniform(0.5, 1.5))
        f, g = W.gaussian_data(sp, amp, width, rmax)
        traj = W.linear_trajectory(sp, f, g, T_end, nt, lmax)
        ratios.append(W.strichartz_ratio(sp, traj, pair, f, g, None, sigma, sigma, pair))
    ratios = np.array(ratios)
    return {"pair": pair, "sigma": sigma, "ratios": ratios, "spread": float(ratios.max() / ratios.min())}


def cmd_solve_nlw(cfg: RunConfig) -> tuple[dict[str, str], str]:
    sp = cfg.space()
    o = cfg.options
    pair = None if o["p"] is None else (o["p"], o["q"])
    scfg = W.SolveConfig(
        gamma=o["gamma"],
        nonlin=o["nonlin"],
        T=o["T"],
        nt=o["nt"],
        picard_max=o["picard_max"],
        pair=pair,
        sigma=o["sigma"],
        tol=o["tol"],
    )
    f, g = _data(cfg, sp, o["amplitude"], o["width"])
    traj, diag = W.picard_solve(sp, f, g, scfg, cfg.lmax)
    print(
        f"converged={diag.converged} iterations={diag.iterations} "
        f"ratio={W.contraction_ratio(diag):.3e} residual={diag.residual:.3e}"
    )
    artifacts = {"json": diag.to_json() + "\n", "csv": traj.physical_csv(), "spectral.csv": traj.spectral_csv()}
    if not diag.converged:
        return artifacts, diag.message
    if not diag.alias_ok:
        return artifacts, f"aliasing share {diag.alias_tail:.2e} above {W.ALIAS_TOL:g}"
    return artifacts, "ok"


def cmd_appendixa_verify(cfg: RunConfig) -> tuple[dict[str, str], str]:
    body = T.appendix_a_report(tuple(cfg.options["zeta"]))
    failed = [k for k, ok in body["checks"].items() if not ok]
    for k, ok in body["checks"].items():
        print(f"{k}: {'PASS' if ok else 'FAIL'}")
    return {"json": _dumps(body)}, (f"failed checks {failed}" if failed else "ok")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{message}\n{self.format_usage()}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("space and grids")
    g.add_argument("--m", type=int, help="even dimension m >= 2")
    g.add_argument("--k", type=int, help="centre dimension k >= 1")
    g.add_argument("--qtilde", type=float, help="shift parameter (default Q+1)")
    g.add_argument("--rmax", type=float, help=f"radial cutoff (default {T.RMAX})")
    g.add_argument("--r-panel", type=float, help=f"radial panel width (default {T.R_PANEL})")
    g.add_argument("--lmax", type=float, help=f"spectral cutoff (default {T.LMAX})")
    g.add_argument("--lambda-panel", type=float, help=f"spectral panel width (default {T.L_PANEL})")
    g.add_argument("--outdir", help="artifact directory (default ./drwave-out)")
    g.add_argument("--seed", type=int, help="seed for ensemble commands (default 0)")
    g.add_argument("--config", help="JSON config file; flags win over its values")
    return p


def _radius_flags(p: argparse.ArgumentParser, lo: float, hi: float, step: float) -> None:
    p.add_argument("--r-min", type=float, default=lo)
    p.add_argument("--r-max", type=float, default=hi)
    p.add_argument("--r-step", type=float, default=step)


COMMANDS: dict[str, Callable[[RunConfig], tuple[dict[str, str], str]]] = {
    "space info": cmd_space_info,
    "spherical eval": cmd_spherical_eval,
    "transform roundtrip": cmd_transform_roundtrip,
    "kernel table": cmd_kernel_table,
    "kernel verify": cmd_kernel_verify,
    "dispersive fit": cmd_dispersive_fit,
    "region curve": cmd_region_curve,
    "exponents find": cmd_exponents_find,
    "solve linear": cmd_solve_linear,
    "solve nlw": cmd_solve_nlw,
    "appendixa verify": cmd_appendixa_verify,
}

_GLOBAL = ("m", "k", "qtilde", "rmax", "r_panel", "lmax", "lambda_panel", "outdir", "seed", "config")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="drwave", description="Harmonic analysis and wave equations on Damek–Ricci spaces.")
    parser.add_argument("--version", action="version", version=f"drwave {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    subs: dict[str, argparse._SubParsersAction] = {}
    for name in sorted({c.split()[0] for c in COMMANDS}):
        subs[name] = groups.add_parser(name).add_subparsers(dest="action", required=True, parser_class=_Parser)

    def add(command: str, help_text: str) -> argparse.ArgumentParser:
        group, action = command.split()
        return subs[group].add_parser(action, parents=[common], help=help_text, description=help_text)

    p = add("space info", "Print n, Q, Q~ and the ω expansion coefficients.")
    p.add_argument("--jmax", type=int, default=10)

    p = add("spherical eval", "Tabulate spherical functions φ_λ(r).")
    p.add_argument("--lam", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    _radius_flags(p, 0.0, 10.0, 0.1)

    p = add("transform roundtrip", "Forward/inverse roundtrip and Plancherel check.")
    p.add_argument("--family", nargs="+", default=list(ROUNDTRIP_FAMILY))
    p.add_argument("--tol", type=float, default=1e-4)

    p = add("kernel table", "Tabulate a propagator kernel on a (t, r) grid.")
    p.add_argument("--part", choices=("low", "high"), default="low")
    p.add_argument("--sigma", type=float, help="real part of σ (default (n+1)/2 for --part high)")
    p.add_argument("--zeta", type=float, default=0.0, help="imaginary part of σ")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p.add_argument("--cutoff", choices=K.CUTOFFS, default="smooth")
    _radius_flags(p, 0.0, 12.0, 0.1)

    p = add("kernel verify", "Envelope scans of the pointwise kernel estimates.")
    p.add_argument("--regime", nargs="+", help=f"subset of {sorted(K.REGIMES)}")
    p.add_argument("--tau", type=float, help="override the weight τ of every scan")
    p.add_argument("--order", type=int, default=3, help="finite order N for r^-∞ envelopes")
    p.add_argument("--shift", type=float, default=0.0, help="envelope exponent shift (negative control: -1)")

    p = add("dispersive fit", "Small- and large-time slopes of the dispersive bound.")
    p.add_argument("--q", type=float, default=4.0)
    p.add_argument("--sigma", type=float, default=1.25)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--small-ts", type=float, nargs="+", default=list(K.SMALL_TS))
    p.add_argument("--large-ts", type=float, nargs="+", default=list(K.LARGE_TS))

    p = add("region curve", "Regularity curve σ_min(γ) as CSV.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--step", type=float, default=0.01)

    p = add("exponents find", "Solve the exponent constraint system.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)

    p = add("solve linear", "Free wave from Gaussian data; energy check and Strichartz ensemble.")
    p.add_argument("--amplitude", type=float, default=1e-3)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--nt", type=int)
    p.add_argument("--energy-tol", type=float, default=1e-10)
    p.add_argument("--ensemble", type=int, default=0, help="number of random Gaussians for Strichartz ratios")

    p = add("solve nlw", "Picard iteration for the semilinear equation.")
    p.add_argument("--amplitude", type=float, default=1e-3)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--nonlin", choices=W.NONLINEARITIES, default="focusing_power")
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--nt", type=int)
    p.add_argument("--picard-max", type=int, default=30)
    p.add_argument("--tol", type=float, default=W.PICARD_TOL)
    p.add_argument("--p", type=float, help="monitoring p (default from the exponent solver)")
    p.add_argument("--q", type=float, help="monitoring q (with --p)")

    p = add("appendixa verify", "Fourier-decay scans of compact, inhomogeneous and Riesz symbols.")
    p.add_argument("--zeta", type=float, nargs="+", default=[1.0, 2.0, 4.0, 8.0])
    return parser


def _load_config(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {key.replace("-", "_"): val for key, val in data.items()}


def parse(argv: list[str]) -> RunConfig:
    """Parse ``argv`` into a :class:`RunConfig`; config-file values fill unset flags."""
    parser = build_parser()
    args = parser.parse_args(argv)
    values = vars(args)
    if values.get("config"):
        file_values = _load_config(values["config"])
        # Re-parse with the file values as defaults so that explicit flags win.
        sub = parser._subparsers._group_actions[0].choices[args.group]  # type: ignore[union-attr]
        leaf = sub._subparsers._group_actions[0].choices[args.action]  # type: ignore[union-attr]
        known = {a.dest for a in leaf._actions}
        stray = sorted(set(file_values) - known)
        if stray:
            raise UsageError(f"unknown config keys {stray}")
        leaf.set_defaults(**file_values)
        values = vars(parser.parse_args(argv))
    command = f"{values.pop('group')} {values.pop('action')}"
    glob = {key: values.pop(key) for key in _GLOBAL}
    return RunConfig(
        command=command,
        m=glob["m"],
        k=glob["k"],
        qtilde=glob["qtilde"],
        rmax=glob["rmax"] if glob["rmax"] is not None else T.RMAX,
        r_panel=glob["r_panel"] if glob["r_panel"] is not None else T.R_PANEL,
        lmax=glob["lmax"] if glob["lmax"] is not None else T.LMAX,
        lambda_panel=glob["lambda_panel"] if glob["lambda_panel"] is not None else T.L_PANEL,
        outdir=glob["outdir"] or "drwave-out",
        seed=glob["seed"] if glob["seed"] is not None else 0,
        options=values,
    )


def dispatch(argv: list[str] | None = None) -> int:
    """Run one command; return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse(argv)
        if cfg.command not in {"region curve", "exponents find", "appendixa verify"}:
            cfg.space()
        try:
            artifacts, status = COMMANDS[cfg.command](cfg)
        except _Infeasible as exc:
            report(cfg, exc.artifacts, status=f"infeasible: {exc}")
            raise UsageError(str(exc)) from exc
        except TOLERANCE_ERRORS as exc:
            report(cfg, {}, status=f"tolerance failure: {exc}")
            raise ToleranceFailure(str(exc)) from exc
        paths = report(cfg, artifacts, status)
        for path in paths:
            print(f"wrote {path}")
        if status != "ok":
            raise ToleranceFailure(status)
        return EXIT_OK
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(dispatch())
