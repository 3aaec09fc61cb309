"""
HausdorffCS
Copyright (C) 2026 HausdorffCS developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expit

# tau ranges chosen so that node weights underflow before the integrand can blow up
TANH_SINH_TAU_MAX = 6.0
EXP_SINH_TAU_MIN = -6.5
EXP_SINH_TAU_MAX = 3.2


@lru_cache(maxsize=16)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [a, b] with `panels` equal panels of `order` nodes each."""
    x, w = _legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tau_grid(h: float, tau_min: float, tau_max: float) -> np.ndarray:
    lo = int(np.floor(tau_min / h))
    hi = int(np.ceil(tau_max / h))
    return h * np.arange(lo, hi + 1)


@lru_cache(maxsize=8)
def tanh_sinh_unit_log(
    h: float, tau_max: float = TANH_SINH_TAU_MAX
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Tanh-sinh rule on (0, 1) in logarithmic form: (u, 1 - u, ln u, ln(1 - u), ln weights).

    The complement is computed directly rather than as 1 - u, and the logs stay finite where u, 1 - u
    or the weights underflow, so integrands singular at either end can be evaluated without cancellation.
    """
    tau = _tau_grid(h, -tau_max, tau_max)
    s = np.pi * np.sinh(tau)
    log_u = -np.logaddexp(0.0, -s)
    log_uc = -np.logaddexp(0.0, s)
    log_w = np.log(h * np.pi * np.cosh(tau)) + log_u + log_uc
    return expit(s), expit(-s), log_u, log_uc, log_w


@lru_cache(maxsize=8)
def tanh_sinh_unit(h: float, tau_max: float = TANH_SINH_TAU_MAX) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh rule on (0, 1): (u, 1 - u, weights)."""
    u, uc, _, _, log_w = tanh_sinh_unit_log(h, tau_max)
    return u, uc, np.exp(log_w)


@lru_cache(maxsize=8)
def exp_sinh_half_line_log(
    h: float, tau_min: float = EXP_SINH_TAU_MIN, tau_max: float = EXP_SINH_TAU_MAX
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exp-sinh rule on (0, inf), v = exp(pi/2 sinh(tau)), as (v, ln v, ln weights)."""
    tau = _tau_grid(h, tau_min, tau_max)
    log_v = 0.5 * np.pi * np.sinh(tau)
    log_w = np.log(h * 0.5 * np.pi * np.cosh(tau)) + log_v
    with np.errstate(under="ignore"):
        v = np.exp(log_v)
    return v, log_v, log_w


@lru_cache(maxsize=8)
def exp_sinh_half_line(
    h: float, tau_min: float = EXP_SINH_TAU_MIN, tau_max: float = EXP_SINH_TAU_MAX
) -> tuple[np.ndarray, np.ndarray]:
    v, _, log_w = exp_sinh_half_line_log(h, tau_min, tau_max)
    with np.errstate(under="ignore"):
        return v, np.exp(log_w)


@lru_cache(maxsize=32)
def sinh_sinh_line_log(h: float, tau_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Sinh-sinh rule on the whole line, t = pi/2 sinh(tau) for |tau| <= tau_max, as (t, ln weights)."""
    tau = _tau_grid(h, -tau_max, tau_max)
    return 0.5 * np.pi * np.sinh(tau), np.log(h * 0.5 * np.pi * np.cosh(tau))


def trapezoid_even(h: float, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes on [0, t_max] for an even integrand over the whole line, folded onto t >= 0."""
    t = h * np.arange(int(np.ceil(t_max / h)) + 1)
    weights = np.full(t.shape, h)
    weights[0] = 0.5 * h
    return t, weights
