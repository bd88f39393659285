"""Admissible exponents, regularity thresholds and the exponent feasibility solver.

All exponents are handled through their reciprocals: ``inv_p = 1/p`` and so
on. For a power nonlinearity ``|u|^γ`` the fixed-point argument needs
admissible pairs ``(p, q)`` and ``(p~, q~)`` tied together by
``p = p~' γ`` and a Sobolev embedding. The seven resulting linear
constraints are listed in :data:`CONSTRAINTS`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

EPS_OPEN = 1e-9
CLOSED_TOL = 1e-12

CONSTRAINTS = {
    "i": "1/p~ = 1 - γ/p",
    "ii": "0 < 1/q~' <= γ/q < 1",
    "iii": "(n-1)/2 - (n+1)/2 (1/q + 1/q~) <= n (1/q~' - γ/q)",
    "iv": "2/p + (n-1)/q >= (n-1)/2",
    "v": "2/p~ + (n-1)/q~ >= (n-1)/2",
    "vi": "(1/p, 1/q) in (0, 1/2] x [(n-3)/(2(n-1)), 1/2)",
    "vii": "(1/p~, 1/q~) in (0, 1/2] x [(n-3)/(2(n-1)), 1/2)",
    "q_excluded": "1/q not in {1/2 - 2/(γ(n-1)), 1/2, 1/γ}",
    "sigma_strichartz": "σ >= (n+1)/2 (1/2 - 1/q)",
    "sigma_curve": "σ >= regularity curve at γ",
}


class ExponentRangeError(ValueError):
    """γ lies outside the range covered by the well-posedness cases."""


def _check_dimension(n: int) -> None:
    if int(n) != n or n < 4:
        raise ValueError(f"dimension must be an integer >= 4, got {n}")


def is_admissible(n: int, inv_p: float, inv_q: float) -> bool:
    """Whether ``(1/p, 1/q)`` lies in the admissible triangle for dimension ``n``."""
    _check_dimension(n)
    if not (0 < inv_p <= 0.5 and 0 < inv_q < 0.5):
        return False
    return 2 * inv_p + (n - 1) * inv_q >= (n - 1) / 2 - CLOSED_TOL


@dataclass(frozen=True)
class AdmissiblePair:
    """A point of the admissible triangle."""

    inv_p: float
    inv_q: float
    n: int

    def __post_init__(self) -> None:
        if not is_admissible(self.n, self.inv_p, self.inv_q):
            raise ValueError(
                f"(1/p, 1/q) = ({self.inv_p:g}, {self.inv_q:g}) is not admissible for n={self.n}: "
                "need 1/p in (0,1/2], 1/q in (0,1/2) and 2/p + (n-1)/q >= (n-1)/2"
            )

    @property
    def p(self) -> float:
        return 1.0 / self.inv_p

    @property
    def q(self) -> float:
        return 1.0 / self.inv_q


@dataclass(frozen=True)
class GammaThresholds:
    """Critical powers of the nonlinearity in dimension ``n``."""

    n: int
    gamma1: float
    gamma2: float
    gamma_conf: float
    gamma3: float
    gamma4: float
    gamma_inf: float
    gamma_tilde_inf: float
    strauss: float

    @property
    def endpoint_included(self) -> bool:
        """Whether ``γ = γ_∞`` itself is covered (true from dimension 6 on)."""
        return self.n >= 6


def strauss_exponent(n: int) -> float:
    """Euclidean critical power ``γ_0(n)``, kept as reference metadata."""
    a = 0.5 + 1.0 / (n - 1)
    return a + math.sqrt(a * a + 2.0 / (n - 1))


def thresholds(n: int) -> GammaThresholds:
    _check_dimension(n)
    gamma3 = (n * n + 5 * n - 2 + math.sqrt(n**4 + 2 * n**3 + 21 * n * n - 12 * n + 4)) / (2 * n * n - 2 * n)
    gamma4 = (n * n + 2 * n - 5) / (n * n - 2 * n - 1)
    return GammaThresholds(
        n=n,
        gamma1=(n + 3) / n,
        gamma2=(n + 1) ** 2 / ((n - 1) ** 2 + 4),
        gamma_conf=(n + 3) / (n - 1),
        gamma3=gamma3,
        gamma4=gamma4,
        gamma_inf=gamma3 if n in (4, 5) else gamma4,
        gamma_tilde_inf=1 + 4 * (n - 1) / ((n + 1) * (n - 3)) if n > 3 else math.inf,
        strauss=strauss_exponent(n),
    )


def curve_c1(n: int, gamma: float) -> float:
    return (n + 1) / 4 * (1 - (n + 5) / (2 * n * gamma - n - 1))


def curve_c2(n: int, gamma: float) -> float:
    return (n + 1) / 4 - 1 / (gamma - 1)


def curve_c3(n: int, gamma: float) -> float:
    return n / 2 - 2 / (gamma - 1)


@dataclass(frozen=True)
class CurvePoint:
    """Minimal regularity at one power ``γ``.

    ``open_below`` marks the first piece, where any ``σ > sigma_min = 0`` works
    but ``σ = 0`` itself does not.
    """

    gamma: float
    sigma_min: float
    case: str
    open_below: bool


def regularity_case(n: int, gamma: float) -> str:
    """Case label A-D of the regularity region containing the power ``γ``."""
    th = thresholds(n)
    if not gamma > 1:
        raise ExponentRangeError(f"γ must exceed 1, got {gamma}")
    top_ok = gamma < th.gamma_inf or (th.endpoint_included and gamma <= th.gamma_inf)
    if not top_ok:
        rule = "γ <= γ_∞" if th.endpoint_included else "γ < γ_∞"
        raise ExponentRangeError(f"γ={gamma} outside the covered range: need {rule} = {th.gamma_inf:.12g} for n={n}")
    if gamma <= th.gamma1:
        return "A"
    if gamma <= th.gamma2:
        return "B"
    if gamma < th.gamma_conf:
        return "C"
    return "D"


def curve_point(n: int, gamma: float) -> CurvePoint:
    case = regularity_case(n, gamma)
    if case == "A":
        return CurvePoint(gamma, 0.0, case, True)
    value = {"B": curve_c1, "C": curve_c2, "D": curve_c3}[case](n, gamma)
    return CurvePoint(gamma, float(value), case, False)


def regularity_curve(n: int, gamma: float) -> float:
    """Infimum of admissible regularity ``σ`` for the power ``γ``.

    On case A the value is 0 and the bound is strict (see :func:`curve_point`).
    """
    return curve_point(n, gamma).sigma_min


def region_curve(n: int, step: float = 0.01, gamma_min: float | None = None) -> list[CurvePoint]:
    """Sample the regularity curve on ``(1, γ_∞)`` with the given step."""
    th = thresholds(n)
    start = 1 + step if gamma_min is None else gamma_min
    gammas = np.arange(start, th.gamma_inf, step)
    if th.endpoint_included:
        gammas = np.append(gammas, th.gamma_inf)
    return [curve_point(n, float(g)) for g in gammas if g > 1]


def region_curve_csv(points: list[CurvePoint], n: int) -> str:
    buf = io.StringIO()
    buf.write(f"# regularity curve n={n}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["gamma", "sigma_min", "case"])
    for pt in points:
        writer.writerow([repr(pt.gamma), repr(pt.sigma_min), pt.case])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# constraint system


@dataclass(frozen=True)
class ConstraintCheck:
    cid: str
    satisfied: bool
    slack: float


def _excluded_q(n: int, gamma: float) -> tuple[float, ...]:
    return (0.5 - 2 / (gamma * (n - 1)), 0.5, 1 / gamma)


def verify_exponents(
    n: int, gamma: float, sigma: float, inv_p: float, inv_q: float, inv_ptilde: float, inv_qtilde: float
) -> list[ConstraintCheck]:
    """Evaluate every constraint on a candidate quadruple.

    Slack is positive when a constraint holds with room to spare. Closed
    constraints accept slack down to ``-CLOSED_TOL``; open ones need slack > 0.
    """
    a, b, at, bt = inv_p, inv_q, inv_ptilde, inv_qtilde
    low = (n - 3) / (2 * (n - 1))
    dual_qt = 1 - bt  # 1/q~'
    checks: list[ConstraintCheck] = []

    def add(cid: str, closed: list[float], strict: list[float] = ()) -> None:
        values = list(closed) + list(strict)
        slack = min(values)
        ok = all(v >= -CLOSED_TOL for v in closed) and all(v > 0 for v in strict)
        checks.append(ConstraintCheck(cid, bool(ok), float(slack)))

    add("i", [-abs(at - (1 - gamma * a))])
    add("ii", [gamma * b - dual_qt], [dual_qt, 1 - gamma * b])
    add("iii", [n * (dual_qt - gamma * b) - ((n - 1) / 2 - (n + 1) / 2 * (b + bt))])
    add("iv", [2 * a + (n - 1) * b - (n - 1) / 2])
    add("v", [2 * at + (n - 1) * bt - (n - 1) / 2])
    add("vi", [0.5 - a, b - low], [a, 0.5 - b])
    add("vii", [0.5 - at, bt - low], [at, 0.5 - bt])
    add("q_excluded", [], [min(abs(b - x) for x in _excluded_q(n, gamma))])
    add("sigma_strichartz", [sigma - (n + 1) / 2 * (0.5 - b)])
    try:
        pt = curve_point(n, gamma)
        if pt.open_below:
            add("sigma_curve", [], [sigma - pt.sigma_min])
        else:
            add("sigma_curve", [sigma - pt.sigma_min])
    except ExponentRangeError:
        checks.append(ConstraintCheck("sigma_curve", False, -math.inf))
    return checks


@dataclass
class ExponentSolution:
    """Result of :func:`find_exponents`.

    When ``feasible`` is false the exponent fields are NaN and ``collapsed``
    names the first window that turned out empty.
    """

    n: int
    gamma: float
    sigma: float
    feasible: bool
    inv_p: float = math.nan
    inv_q: float = math.nan
    inv_ptilde: float = math.nan
    inv_qtilde: float = math.nan
    case: str | None = None
    collapsed: str | None = None
    message: str = ""
    windows: dict = field(default_factory=dict)
    constraint_report: list[ConstraintCheck] = field(default_factory=list)

    @property
    def quadruple(self) -> tuple[float, float, float, float]:
        return (self.inv_p, self.inv_q, self.inv_ptilde, self.inv_qtilde)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "gamma": self.gamma,
            "sigma": self.sigma,
            "feasible": self.feasible,
            "case": self.case,
            "inv_p": self.inv_p,
            "inv_q": self.inv_q,
            "inv_ptilde": self.inv_ptilde,
            "inv_qtilde": self.inv_qtilde,
            "collapsed": self.collapsed,
            "message": self.message,
            "windows": {k: list(v) for k, v in self.windows.items()},
            "constraints": [
                {"id": c.cid, "satisfied": c.satisfied, "slack": c.slack, "text": CONSTRAINTS[c.cid]}
                for c in self.constraint_report
            ],
        }


def q_window(n: int, gamma: float) -> tuple[float, float, bool]:
    """Window ``(lo, hi, lo_strict)`` for ``1/q`` in the case containing ``γ``.

    The upper end is the binding bound of the case; the lower end is strict on
    the sub-cases where ``1/2 - 2/(γ(n-1))`` exceeds ``(n-3)/(2(n-1))``.
    """
    case = regularity_case(n, gamma)
    low = (n - 3) / (2 * (n - 1))
    shifted_low = 0.5 - 2 / (gamma * (n - 1))
    upper_b = (n + 5) / (2 * (2 * n * gamma - n - 1))
    upper_c = 2 / ((gamma - 1) * (n + 1))
    upper_d = (n + 7 - gamma * (n - 1)) / (2 * (gamma - 1) * (n + 1))
    if case == "A":
        return low, 0.5 - EPS_OPEN, False
    if case == "B":
        return low, upper_b, False
    if case == "C":
        # n = 4 splits at γ = 2, where 1/2 - 2/(γ(n-1)) overtakes (n-3)/(2(n-1)).
        if n == 4 and gamma > 2:
            return shifted_low, upper_c, True
        return low, upper_c, False
    # case D: n = 4 always uses the shifted lower end; n >= 5 only above γ = 2.
    if n == 4 or gamma > 2:
        return shifted_low, upper_d, True
    return low, upper_d, False


def qtilde_window(n: int, gamma: float, inv_q: float) -> tuple[float, float]:
    """Closed window for ``1/q~`` given ``1/q``.

    Besides the two lower bounds coming from the ``p``-windows, the window
    includes ``1/q~ >= 1 - γ/q`` (the left half of constraint ii).
    """
    low = (n - 3) / (2 * (n - 1))
    lo = max(low, gamma / 2 + (n - 5) / (2 * (n - 1)) - gamma * inv_q, 1 - gamma * inv_q)
    hi = min(0.5 - EPS_OPEN, (n + 1) / (n - 1) - (2 * n * gamma - n - 1) / (n - 1) * inv_q)
    return lo, hi


def p_window(n: int, gamma: float, inv_q: float, inv_qtilde: float) -> tuple[float, float]:
    """Closed window for ``1/p`` given ``1/q`` and ``1/q~`` (with ``1/p~ = 1 - γ/p``)."""
    lo = max((n - 1) / 2 * (0.5 - inv_q), 1 / (2 * gamma), EPS_OPEN)
    hi = min(0.5, ((5 - n) / 4 + (n - 1) * inv_qtilde / 2) / gamma, (1 - EPS_OPEN) / gamma)
    return lo, hi


def find_exponents(n: int, gamma: float, sigma: float) -> ExponentSolution:
    """Canonical exponent quadruple for the power ``γ`` at regularity ``σ``.

    The search fixes ``1/q`` as large as its window allows, then ``1/q~`` and
    ``1/p`` likewise. Maximal ``1/q`` also minimizes the regularity demanded
    by the Strichartz estimate, so no feasible ``σ`` is lost.
    """
    _check_dimension(n)
    sol = ExponentSolution(n=n, gamma=float(gamma), sigma=float(sigma), feasible=False)
    try:
        pt = curve_point(n, gamma)
    except ExponentRangeError as exc:
        sol.collapsed = "gamma_range"
        sol.message = str(exc)
        return sol
    sol.case = pt.case
    below = sigma <= pt.sigma_min if pt.open_below else sigma < pt.sigma_min - CLOSED_TOL
    if below:
        sol.collapsed = "sigma_curve"
        rel = ">" if pt.open_below else ">="
        sol.message = f"σ={sigma} is below the regularity curve: case {pt.case} needs σ {rel} {pt.sigma_min:.12g}"
        sol.constraint_report = _report_nan(n, gamma, sigma)
        return sol

    lo, hi, lo_strict = q_window(n, gamma)
    # The remaining upper bounds on 1/q; they are implied by the case bound but kept as a guard.
    hi = min(
        hi,
        0.5 - EPS_OPEN,
        (1 - EPS_OPEN) / gamma,
        2 / ((gamma - 1) * (n + 1)),
        (n + 5) / (2 * (2 * n * gamma - n - 1)),
        (n + 7 - gamma * (n - 1)) / (2 * (gamma - 1) * (n + 1)),
    )
    sigma_lo = 0.5 - 2 * sigma / (n + 1)
    sol.windows["q"] = (lo, hi)
    if hi < lo or (lo_strict and hi <= lo) or hi < sigma_lo - CLOSED_TOL:
        sol.collapsed = "q_window"
        sol.message = f"1/q window [{lo:.6g}, {hi:.6g}] empty or below σ-requirement {sigma_lo:.6g}"
        sol.constraint_report = _report_nan(n, gamma, sigma)
        return sol
    inv_q = hi
    qt_lo, qt_hi = qtilde_window(n, gamma, inv_q)
    sol.windows["qtilde"] = (qt_lo, qt_hi)
    if qt_hi < qt_lo - CLOSED_TOL:
        sol.collapsed = "qtilde_window"
        sol.message = f"1/q~ window [{qt_lo:.6g}, {qt_hi:.6g}] is empty"
        sol.constraint_report = _report_nan(n, gamma, sigma)
        return sol
    inv_qt = max(qt_hi, qt_lo)
    p_lo, p_hi = p_window(n, gamma, inv_q, inv_qt)
    sol.windows["p"] = (p_lo, p_hi)
    if p_hi < p_lo - CLOSED_TOL:
        sol.collapsed = "p_window"
        sol.message = f"1/p window [{p_lo:.6g}, {p_hi:.6g}] is empty"
        sol.constraint_report = _report_nan(n, gamma, sigma)
        return sol
    inv_p = max(p_hi, p_lo)
    sol.inv_q, sol.inv_qtilde, sol.inv_p = float(inv_q), float(inv_qt), float(inv_p)
    sol.inv_ptilde = float(1 - gamma * inv_p)
    sol.constraint_report = verify_exponents(n, gamma, sigma, *sol.quadruple)
    sol.feasible = all(c.satisfied for c in sol.constraint_report)
    if not sol.feasible:
        failed = [c.cid for c in sol.constraint_report if not c.satisfied]
        sol.collapsed = "verification"
        sol.message = "constructed quadruple violates " + ", ".join(failed)
    return sol


def _report_nan(n: int, gamma: float, sigma: float) -> list[ConstraintCheck]:
    return verify_exponents(n, gamma, sigma, math.nan, math.nan, math.nan, math.nan)


def sigma_min_from_solver(n: int, gamma: float) -> float:
    """Smallest ``σ`` accepted by the Strichartz hypothesis at the solver's ``1/q``.

    Independent of the closed-form curves; used to cross-check them.
    """
    lo, hi, _ = q_window(n, gamma)
    return (n + 1) / 2 * (0.5 - hi)
