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

Bohr-Sommerfeld levels of the attractive potential V(x) = -|V0| |x|^-sigma, hbar = 1.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from hausdorffcs import log
from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.moments import theta_from_sigma

D_EPSREL = 1e-11


def _check_sigma(sigma: float):
    if not (math.isfinite(sigma) and 0.0 < sigma < 2.0):
        raise DomainError(f"potential exponent sigma must lie in (0, 2), got {sigma}")


@dataclass(frozen=True)
class PotentialSpec:
    sigma: float
    v0: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        _check_sigma(self.sigma)
        if not (math.isfinite(self.v0) and self.v0 > 0.0):
            raise DomainError(f"well depth v0 must be > 0, got {self.v0}")
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise DomainError(f"mass must be > 0, got {self.mass}")


def level_exponent(sigma):
    """2 sigma / (2 - sigma): E(n) falls off like n to minus this power."""
    _check_sigma(float(sigma))
    return theta_from_sigma(sigma)


def d_constant(sigma: float) -> float:
    """
    D(sigma) = int_0^1 sqrt(u^-sigma - 1) du.

    With u = v^beta, beta = 2 / (2 - sigma), the integrand becomes beta sqrt(1 - v^p), p = 2 sigma / (2 - sigma),
    which is left with a square-root zero at v = 1 only; that factor goes into the quadrature weight.
    """
    _check_sigma(sigma)
    beta = 2.0 / (2.0 - sigma)
    p = 2.0 * sigma / (2.0 - sigma)

    def smooth(v: float) -> float:
        # endpoint limits
        if v <= 0.0:
            return beta
        if v >= 1.0:
            return beta * math.sqrt(p)
        return beta * math.sqrt(-math.expm1(p * math.log(v)) / (1.0 - v))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error = quad(smooth, 0.0, 1.0, weight="alg", wvar=(0.0, 0.5), epsabs=0.0, epsrel=D_EPSREL, limit=200)
    if error > 1e-9 * abs(value):
        raise ConvergenceError(f"D({sigma}) quadrature reached only {error:.3g} absolute error", error)
    return value


def quasiclassical_level(spec: PotentialSpec, n) -> float:
    """E(n) = -((pi/2) (n + 1/2) |V0| / (sqrt(2m) D(sigma)))^(-2 sigma / (2 - sigma))."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0) or np.any(n_arr != np.floor(n_arr)):
        raise DomainError(f"level index n must be a nonnegative integer, got {n}")
    d = d_constant(spec.sigma)
    action = 0.5 * math.pi * (n_arr + 0.5) * spec.v0 / (math.sqrt(2.0 * spec.mass) * d)
    energy = -(action ** (-level_exponent(spec.sigma)))
    log.debug(f"quasiclassical levels for sigma={spec.sigma:g}: D={d:.12g}")
    return float(energy) if energy.ndim == 0 else energy
