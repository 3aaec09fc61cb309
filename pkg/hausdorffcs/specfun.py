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

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from hausdorffcs.errors import ConvergenceError, DomainError, PoleError
from hausdorffcs.quadrature import trapezoid_even

LOG_PI = math.log(math.pi)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2 ... B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)
_STIRLING = tuple(b / ((2 * k) * (2 * k - 1)) for k, b in enumerate(_BERNOULLI, start=1))
_STIRLING_MIN_RE = 15.0

# K_nu(x): integral representation below, asymptotic series above
_K_ASYMPTOTIC_X = 30.0
_K_STEP = 1.0 / 8.0
_K_CHUNK = 2048


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"ComplexPoint components must be finite, got ({self.re}, {self.im})")

    @classmethod
    def of(cls, value) -> "ComplexPoint":
        z = complex(value)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


ComplexLike = Union[ComplexPoint, complex, float, np.ndarray]


def _stirling(z: np.ndarray) -> np.ndarray:
    w = 1.0 / z
    w2 = w * w
    series = np.zeros_like(z)
    power = w
    for coeff in _STIRLING:
        series = series + coeff * power
        power = power * w2
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series


def _log_gamma_right(z: np.ndarray) -> np.ndarray:
    """ln Gamma for Re z >= 0.5, shifting upward until Stirling is accurate."""
    shift = np.ceil(np.maximum(0.0, _STIRLING_MIN_RE - z.real))
    steps = int(shift.max()) if shift.size else 0
    correction = np.zeros_like(z)
    for j in range(steps):
        correction = correction + np.where(shift > j, np.log(z + j), 0.0)
    return _stirling(z + shift) - correction


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """Principal ln sin(pi z) without overflow for large |Im z|."""
    out = np.empty_like(z)
    small = np.abs(z.imag) <= 20.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    zl = z[~small]
    if zl.size:
        s = np.sign(zl.imag)
        raw = -1j * s * np.pi * zl + np.log1p(-np.exp(2j * s * np.pi * zl)) - math.log(2.0) + 0.5j * s * np.pi
        out[~small] = raw.real + 1j * np.angle(np.exp(1j * raw.imag))
    return out


def log_gamma(z: ComplexLike):
    """
    Principal branch of ln Gamma(z), elementwise.

    Accepts a ComplexPoint (returns a ComplexPoint), a scalar (returns a complex) or an array.
    Raises PoleError at non-positive integers.
    """
    as_point = isinstance(z, ComplexPoint)
    arr = np.asarray(complex(z) if as_point else z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("log_gamma requires finite arguments")
    poles = (arr.imag == 0.0) & (arr.real <= 0.0) & (arr.real == np.floor(arr.real))
    if np.any(poles):
        raise PoleError(f"log_gamma has a pole at {arr[poles].ravel()[0].real:g}")

    flat = arr.ravel()
    out = np.empty_like(flat)
    right = flat.real >= 0.5
    if np.any(right):
        out[right] = _log_gamma_right(flat[right])
    left = ~right
    if np.any(left):
        zl = flat[left]
        branch = np.copysign(2.0 * np.pi, zl.imag) * np.floor(0.5 * zl.real + 0.25)
        out[left] = (LOG_PI + 1j * branch) - _log_sin_pi(zl) - _log_gamma_right(1.0 - zl)
    out = out.reshape(arr.shape)

    if as_point:
        return ComplexPoint.of(out.item())
    if out.ndim == 0:
        return complex(out)
    return out


def _log_gamma_real(x: float) -> float:
    return log_gamma(complex(x)).real


def _k_scaled_integral(nu: float, x: np.ndarray) -> np.ndarray:
    # e^x K_nu(x) = int_0^inf exp(-2x sinh^2(t/2)) cosh(nu t) dt, trapezoid in log form
    t_max = 2.0 * np.arcsinh(np.sqrt((800.0 + 60.0 * nu) / (2.0 * x.min())))
    t, w = trapezoid_even(_K_STEP, t_max)
    log_cosh = nu * t + np.log1p(np.exp(-2.0 * nu * t)) - math.log(2.0)
    expo = -2.0 * x[:, None] * np.sinh(0.5 * t)[None, :] ** 2 + log_cosh[None, :]
    peak = expo.max(axis=1, keepdims=True)
    total = (np.exp(expo - peak) * w[None, :]).sum(axis=1)
    return np.exp(peak[:, 0]) * total


def _k_scaled_asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return np.sqrt(np.pi / (2.0 * x)) * total


def bessel_k_scaled(nu: float, x):
    """e^x K_nu(x) for x > 0."""
    nu = abs(float(nu))
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)) or not np.all(np.isfinite(arr)):
        raise DomainError(f"bessel_k requires finite x > 0, got min {np.min(arr)!r}")

    flat = arr.ravel()
    out = np.empty_like(flat)
    large = flat > _K_ASYMPTOTIC_X
    if np.any(large):
        out[large] = _k_scaled_asymptotic(nu, flat[large])
    small = np.flatnonzero(~large)
    for start in range(0, small.size, _K_CHUNK):
        idx = small[start : start + _K_CHUNK]
        out[idx] = _k_scaled_integral(nu, flat[idx])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def bessel_k(nu: float, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    scaled = bessel_k_scaled(nu, x)
    return scaled * np.exp(-np.asarray(x, dtype=float)) if np.ndim(scaled) else scaled * math.exp(-float(x))


def log_bessel_k(nu: float, x):
    """ln K_nu(x); finite even where K_nu(x) underflows."""
    return np.log(bessel_k_scaled(nu, x)) - np.asarray(x, dtype=float)


def bessel_i(nu: float, x):
    """Modified Bessel function of the first kind I_nu(x) from its ascending series, nu >= 0, x >= 0."""
    nu = float(nu)
    if nu < 0.0:
        raise DomainError(f"bessel_i requires nu >= 0, got {nu}")
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0.0)) or not np.all(np.isfinite(arr)):
        raise DomainError(f"bessel_i requires finite x >= 0, got min {np.min(arr)!r}")

    half = 0.5 * arr
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.exp(nu * np.log(half) - _log_gamma_real(nu + 1.0))
    term = np.where(arr == 0.0, 1.0 if nu == 0.0 else 0.0, first)
    total = term.copy()
    q = half * half
    m = 0
    while True:
        term = term * q / ((m + 1.0) * (m + 1.0 + nu))
        total = total + term
        m += 1
        if np.all(term <= 1e-16 * total):
            break
        if m > 100_000:
            raise ConvergenceError("bessel_i series did not converge", float(np.max(term / total)))
    return float(total) if total.ndim == 0 else total
