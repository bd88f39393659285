"""Composite Gauss–Legendre rules and a vectorized fixed-step RK8 stepper."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

NODES_PER_PANEL = 16


@lru_cache(maxsize=8)
def _gauss_legendre(npts: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(npts)
    return x, w


def panel_rule(edges: np.ndarray, npts: int = NODES_PER_PANEL) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on consecutive panels given by ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(npts)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def uniform_panels(a: float, b: float, width: float, npts: int = NODES_PER_PANEL) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on ``[a, b]`` with panels no wider than ``width``."""
    if b <= a:
        return np.empty(0), np.empty(0)
    npan = max(1, int(np.ceil((b - a) / width - 1e-12)))
    return panel_rule(np.linspace(a, b, npan + 1), npts)


def graded_panels(
    a: float, b: float, width: float, levels: int = 20, npts: int = NODES_PER_PANEL
) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`uniform_panels` but with the first panel split geometrically toward ``a``.

    Suited to integrands with an algebraic endpoint singularity at ``a``.
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    npan = max(1, int(np.ceil((b - a) / width - 1e-12)))
    edges = np.linspace(a, b, npan + 1)
    first = edges[1] - a
    inner = a + first * 2.0 ** -np.arange(levels, 0, -1)
    edges = np.concatenate([[a], inner, edges[1:]])
    return panel_rule(edges, npts)


def simple_weights(grid: np.ndarray) -> np.ndarray:
    """Trapezoid weights on an arbitrary increasing grid starting from 0.

    Used only for user-supplied grids that carry no quadrature rule of their own;
    the segment ``[0, grid[0]]`` is included with the left value taken as the
    first sample times zero (the radial measure vanishes at the origin).
    """
    grid = np.asarray(grid, dtype=float)
    w = np.zeros_like(grid)
    d = np.diff(grid)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    w[0] += 0.5 * grid[0]
    return w


def _dop853_tableau():
    # Dormand–Prince 8(5,3) coefficients as shipped with scipy; only the
    # 8th-order propagating weights are used (fixed step, no error control).
    from scipy.integrate._ivp import dop853_coefficients as tab

    s = tab.N_STAGES
    return tab.A[:s, :s], tab.B, tab.C[:s]


_A8, _B8, _C8 = _dop853_tableau()


def rk8_linear2(
    r_out: np.ndarray,
    y0: np.ndarray,
    r0: float,
    p_func,
    mu: np.ndarray,
    h_max: float,
    h_far: float | None = None,
    r_far: float = np.inf,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``y'' + p(r) y' + mu y = 0`` for many ``mu`` at once.

    Parameters
    ----------
    r_out : ndarray
        Increasing output abscissae, all ``>= r0``.
    y0 : ndarray, shape (2, N)
        ``(y, y')`` at ``r0`` for each of the ``N`` problems.
    p_func : callable
        Scalar coefficient ``p(r)`` shared by every problem.
    mu : ndarray, shape (N,)
        Frequencies.
    h_max : float
        Largest step; every segment between outputs is cut into equal steps.
    h_far, r_far : float, optional
        Larger step allowed on segments lying beyond ``r_far``.  Include
        ``r_far`` in ``r_out`` for an exact switch.

    Returns
    -------
    values : ndarray, shape (len(r_out), N)
        Values of ``y`` at ``r_out``.
    state : ndarray, shape (2, N)
        ``(y, y')`` at the last output point.
    """
    y = np.array(y0[0], dtype=float)
    dy = np.array(y0[1], dtype=float)
    out = np.empty((len(r_out), y.size))
    r = r0
    nst = len(_B8)
    ks_y = np.empty((nst, y.size))
    ks_d = np.empty((nst, y.size))
    for idx, target in enumerate(r_out):
        span = target - r
        hm = h_far if (h_far is not None and r >= r_far) else h_max
        nsteps = int(np.ceil(span / hm - 1e-9)) if span > 0 else 0
        if nsteps:
            h = span / nsteps
            for _ in range(nsteps):
                for i in range(nst):
                    if i == 0:
                        yi, di = y, dy
                    else:
                        a = _A8[i, :i]
                        yi = y + h * (a @ ks_y[:i])
                        di = dy + h * (a @ ks_d[:i])
                    ks_y[i] = di
                    ks_d[i] = -p_func(r + _C8[i] * h) * di - mu * yi
                y = y + h * (_B8 @ ks_y)
                dy = dy + h * (_B8 @ ks_d)
                r += h
            r = target
        out[idx] = y
    return out, np.vstack([y, dy])
