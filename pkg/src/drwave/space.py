"""Damek–Ricci space parameters, volume density and the radial potential.

A Damek–Ricci space of dimension ``n = m + k + 1`` is described, for radial
analysis, by the pair ``(m, k)``: ``m`` is the (even) dimension of the
non-central part of the H-type algebra and ``k`` the dimension of its centre.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike


class SpaceValidationError(ValueError):
    """Raised when (m, k, Qtilde) do not describe a valid space."""


@dataclass(frozen=True)
class SpaceParams:
    """Radial geometry of a Damek–Ricci space.

    Attributes
    ----------
    m : int
        Even dimension (>= 2) of the non-central part.
    k : int
        Dimension (>= 1) of the centre.
    qtilde : float
        Shift parameter of the operator ``D~``; strictly larger than ``Q``.
    """

    m: int
    k: int
    qtilde: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if int(self.m) != self.m or int(self.k) != self.k:
            raise SpaceValidationError("m and k must be integers")
        if self.m % 2 != 0:
            raise SpaceValidationError("m must be even")
        if self.m < 2:
            raise SpaceValidationError("m must be at least 2")
        if self.k < 1:
            raise SpaceValidationError("k must be at least 1")
        q = self.m // 2 + self.k
        if self.qtilde is None:
            object.__setattr__(self, "qtilde", float(q + 1))
        elif not self.qtilde > q:
            raise SpaceValidationError(
                f"qtilde must exceed the homogeneous dimension Q={q}, got {self.qtilde}"
            )
        object.__setattr__(self, "qtilde", float(self.qtilde))

    @property
    def n(self) -> int:
        """Manifold dimension ``m + k + 1``."""
        return self.m + self.k + 1

    @property
    def Q_exact(self) -> Fraction:
        """Homogeneous dimension ``m/2 + k`` as an exact rational."""
        return Fraction(self.m, 2) + self.k

    @property
    def Q(self) -> int:
        """Homogeneous dimension as an integer (``m`` is even)."""
        return self.m // 2 + self.k

    @property
    def key(self) -> str:
        """Short stable identifier used in file names and caches."""
        return f"m{self.m}k{self.k}qt{self.qtilde:g}"


def new_space(m: int, k: int, qtilde_override: float | None = None) -> SpaceParams:
    """Validate ``(m, k)`` and build the corresponding :class:`SpaceParams`."""
    return SpaceParams(m, k, qtilde_override)


def _check_nonneg(r: np.ndarray, strict: bool) -> None:
    if strict and np.any(r <= 0):
        raise ValueError("r must be strictly positive (the expression has a pole at r = 0)")
    if not strict and np.any(r < 0):
        raise ValueError("r must be non-negative")


def density(space: SpaceParams, r: ArrayLike) -> np.ndarray | float:
    """Radial volume density ``V(r) = 2^{m+k} sinh(r/2)^{m+k} cosh(r/2)^k``.

    Evaluated in log form for large ``r`` so that it does not overflow before
    ``float`` does.
    """
    r = np.asarray(r, dtype=float)
    _check_nonneg(r, strict=False)
    with np.errstate(divide="ignore"):
        out = np.exp(log_density(space, r))
    out = np.where(r == 0, 0.0, out)
    return out if out.ndim else float(out)


def log_density(space: SpaceParams, r: ArrayLike) -> np.ndarray:
    """Natural log of :func:`density` (``-inf`` at ``r = 0``)."""
    r = np.asarray(r, dtype=float)
    m, k = space.m, space.k
    half = 0.5 * r
    # log sinh(x) = x + log(1 - e^{-2x}) - log 2 ; log cosh(x) = x + log(1 + e^{-2x}) - log 2
    with np.errstate(divide="ignore"):
        log_sinh = half + np.log(-np.expm1(-r)) - np.log(2.0)
    log_cosh = half + np.log1p(np.exp(-r)) - np.log(2.0)
    return (m + k) * np.log(2.0) + (m + k) * log_sinh + k * log_cosh


def log_density_derivative(space: SpaceParams, r: ArrayLike) -> np.ndarray | float:
    """``V'(r)/V(r) = ((m+k)/2) coth(r/2) + (k/2) tanh(r/2)`` for ``r > 0``."""
    r = np.asarray(r, dtype=float)
    _check_nonneg(r, strict=True)
    out = 0.5 * (space.m + space.k) / np.tanh(0.5 * r) + 0.5 * space.k * np.tanh(0.5 * r)
    return out if out.ndim else float(out)


def _omega_constants(space: SpaceParams) -> tuple[Fraction, Fraction]:
    a = Fraction(1, 4) * Fraction(space.m, 2) * (space.Q_exact - 1)
    b = Fraction(space.k, 2) * (Fraction(space.k, 2) - 1)
    return a, b


def omega(space: SpaceParams, r: ArrayLike) -> np.ndarray | float:
    """Potential ``ω(r) = V^{-1/2} (V^{1/2})'' - Q²/4`` in closed form."""
    r = np.asarray(r, dtype=float)
    _check_nonneg(r, strict=True)
    a, b = _omega_constants(space)
    out = float(a) / np.sinh(0.5 * r) ** 2 + float(b) / np.sinh(r) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class OmegaCoeffs:
    """Coefficients of ``ω(r) = Σ_{j≥1} ω_j e^{-jr}``.

    ``coeffs[j - 1]`` holds ``ω_j`` as an exact :class:`~fractions.Fraction`.
    """

    coeffs: tuple[Fraction, ...]
    jmax: int

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


def omega_coeffs(space: SpaceParams, jmax: int) -> OmegaCoeffs:
    """Exact exponential-series coefficients of :func:`omega`.

    Uses ``sinh(r/2)^{-2} = 4 Σ j e^{-jr}`` and ``sinh(r)^{-2} = 4 Σ j e^{-2jr}``.
    """
    if jmax < 1:
        raise ValueError("jmax must be at least 1")
    a, b = _omega_constants(space)
    coeffs = tuple(4 * a * j + (4 * b * (j // 2) if j % 2 == 0 else 0) for j in range(1, jmax + 1))
    return OmegaCoeffs(coeffs=coeffs, jmax=jmax)


def omega_growth_constant(space: SpaceParams) -> float:
    """A constant ``A`` with ``|ω_j| <= A j`` for every ``j``."""
    a, b = _omega_constants(space)
    return float(4 * abs(a) + 2 * abs(b))
