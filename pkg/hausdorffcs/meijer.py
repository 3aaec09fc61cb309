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

Meijer G functions of the shape G^{k,0}_{l,k}(z | alpha ; beta), i.e. the inverse Mellin transform of
prod Gamma(beta_j + s) / prod Gamma(alpha_j + s). Two independent evaluators are provided:

* eval_mellin_barnes integrates along a vertical line Re s = c (the production path);
* eval_convolution nests the Mellin convolutions of positive beta- and gamma-type kernels whose
  transforms multiply to the same ratio (slow, but nonnegative by construction).
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from hausdorffcs import log
from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.quadrature import (
    exp_sinh_half_line_log,
    gauss_legendre_panels,
    sinh_sinh_line_log,
    tanh_sinh_unit_log,
)
from hausdorffcs.specfun import log_gamma

PANEL_ORDER = 32
MAX_PANELS = 4096
# relative rounding floor of the contour sum
ROUNDING = 64 * np.finfo(float).eps
# below this the whole contour integral is smaller than the least subnormal double
UNDERFLOW_LOG = -760.0
CONVOLUTION_STEPS = (1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0)
# width in ln t beyond the flat part of a convolution integrand over the whole line
LINE_MARGIN = 20.0
# rule length used only to size blocks
TYPICAL_LINE_TAU = 4.0
# element budget of one block of nested convolution nodes
MAX_TENSOR = 2_000_000
TINY = np.finfo(float).tiny


def delta_list(k: int, a: float) -> list[float]:
    """[a/k, (a+1)/k, ..., (a+k-1)/k]"""
    if int(k) != k or k < 1:
        raise DomainError(f"delta_list requires an integer k >= 1, got {k}")
    k = int(k)
    return [(a + j) / k for j in range(k)]


@dataclass(frozen=True)
class MeijerGSpec:
    upper_absent: tuple = ()
    upper_present: tuple = ()
    lower_present: tuple = ()
    lower_absent: tuple = ()
    argument: float = 1.0

    def __post_init__(self):
        for name in ("upper_absent", "upper_present", "lower_present", "lower_absent"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.upper_absent or self.lower_absent:
            raise DomainError("only G^{k,0}_{l,k} is supported: the first and fourth parameter lists must be empty")
        if len(self.lower_present) < 1:
            raise DomainError("at least one lower parameter is required")
        if len(self.lower_present) <= len(self.upper_present):
            raise DomainError(f"need k > l, got k={len(self.lower_present)}, l={len(self.upper_present)}")
        if not (math.isfinite(self.argument) and self.argument > 0.0):
            raise DomainError(f"Meijer G argument must be finite and > 0, got {self.argument}")

    @property
    def k(self) -> int:
        return len(self.lower_present)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.upper_present)

    @classmethod
    def of_family(cls, k: int, l: int, nu: float, z: float) -> "MeijerGSpec":
        """G^{k,0}_{l,k}(z | Delta(l, nu) ; Delta(k, 0))"""
        upper = tuple(delta_list(l, nu)) if l > 0 else ()
        return cls(upper_present=upper, lower_present=tuple(delta_list(k, 0.0)), argument=z)

    def reduced(self) -> tuple[tuple, tuple]:
        """Parameter lists with equal upper/lower pairs cancelled (their gamma factors divide out)."""
        lower = list(self.lower_present)
        upper = []
        for alpha in self.upper_present:
            match = next((i for i, beta in enumerate(lower) if abs(beta - alpha) <= 1e-15), None)
            if match is None:
                upper.append(alpha)
            else:
                lower.pop(match)
        return tuple(upper), tuple(lower)


@dataclass(frozen=True)
class ContourConfig:
    abscissa: float = 1.0
    half_height: float = 400.0
    nodes: int = 64
    tol: float = 1e-10
    adaptive: bool = True
    saddle: bool = True

    def __post_init__(self):
        if not self.abscissa > 0.0:
            raise DomainError(f"contour abscissa must be > 0, got {self.abscissa}")
        if not self.half_height > 0.0:
            raise DomainError(f"contour half_height must be > 0, got {self.half_height}")
        if self.nodes < 64:
            raise DomainError(f"contour needs at least 64 nodes, got {self.nodes}")
        if not self.tol > 0.0:
            raise DomainError(f"contour tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class ContourResult:
    value: float
    error: float
    abscissa: float = field(default=0.0)
    half_height: float = field(default=0.0)
    nodes: int = field(default=0)

    def __float__(self) -> float:
        return self.value


def _log_integrand(upper: Sequence[float], lower: Sequence[float], log_z: float, s: np.ndarray) -> np.ndarray:
    out = -s * log_z
    for beta in lower:
        out = out + log_gamma(beta + s)
    for alpha in upper:
        out = out - log_gamma(alpha + s)
    return out


def _truncation_height(log_modulus, ref: float, log_tol: float, scale: float, cap: float) -> float:
    """Smallest grid height beyond which the integrand stays below tol relative to its peak."""
    tau = scale * 1.25 ** np.arange(0, 200)
    tau = tau[tau < cap]
    tau = np.append(tau, cap)
    lm = log_modulus(tau)
    significant = np.flatnonzero(lm >= ref + log_tol - 4.0)
    if significant.size == 0:
        return float(tau[0])
    last = significant[-1]
    return float(tau[min(last + 1, tau.size - 1)])


def eval_mellin_barnes(spec: MeijerGSpec, cfg: Optional[ContourConfig] = None) -> ContourResult:
    """
    (1/2 pi i) int prod Gamma(beta_j + s) / prod Gamma(alpha_j + s) z^{-s} ds along Re s = c.

    The integrand is conjugate symmetric, so the value is (1/pi) int_0^T Re f(c + i tau) d tau. Returns the
    value with an error estimate (truncation tail plus the last panel-doubling difference).
    """
    cfg = cfg or ContourConfig()
    upper, lower = spec.reduced()
    z = spec.argument
    log_z = math.log(z)
    excess = len(lower) - len(upper)

    c = cfg.abscissa
    if cfg.saddle and z > 1.0:
        c = max(c, z ** (1.0 / excess))

    def log_f(tau):
        return _log_integrand(upper, lower, log_z, c + 1j * np.asarray(tau, dtype=float))

    scale = max(1.0, math.sqrt(c))
    probe = np.concatenate(([0.0], scale * 1.25 ** np.arange(0, 12)))
    ref = float(np.max(log_f(probe).real))
    if ref < UNDERFLOW_LOG:
        log.debug(f"mellin-barnes z={z:.6g}: integrand below underflow (log {ref:.1f}), value 0")
        return ContourResult(0.0, 0.0, c, 0.0, 0)

    log_tol = math.log(cfg.tol)
    if cfg.adaptive:
        height = _truncation_height(lambda t: log_f(t).real, ref, log_tol, scale, cfg.half_height)
    else:
        height = cfg.half_height

    decay = 0.5 * math.pi * excess
    tail = math.exp(float(log_f(np.array([height])).real[0]) - ref) / (math.pi * decay)

    panels = max(1, cfg.nodes // PANEL_ORDER)
    previous = None
    while panels <= MAX_PANELS:
        tau, w = gauss_legendre_panels(0.0, height, panels, PANEL_ORDER)
        f = np.exp(log_f(tau) - ref)
        current = float(np.sum(w * f.real)) / math.pi
        l1 = float(np.sum(w * np.abs(f))) / math.pi
        if previous is not None:
            diff = abs(current - previous)
            if diff <= cfg.tol * l1:
                if tail > cfg.tol * l1:
                    raise ConvergenceError(
                        f"Mellin-Barnes tail at T={height:g} is {tail / l1:.3g} relative (tol {cfg.tol:g})",
                        error_estimate=tail * math.exp(ref),
                    )
                scale_back = math.exp(ref)
                log.debug(
                    f"mellin-barnes k={len(lower)} l={len(upper)} z={z:.6g}: c={c:.6g} T={height:.6g} "
                    f"nodes={tau.size}"
                )
                error = (diff + tail + ROUNDING * l1) * scale_back
                return ContourResult(current * scale_back, error, c, height, int(tau.size))
        previous = current
        panels *= 2

    raise ConvergenceError(
        f"Mellin-Barnes contour for z={z:g} did not converge (T={height:g}, tail={tail:.3g})",
        error_estimate=tail * math.exp(ref),
    )


def mellin_barnes_values(k: int, l: int, nu: float, z, cfg: Optional[ContourConfig] = None) -> np.ndarray:
    """G^{k,0}_{l,k}(z | Delta(l, nu) ; Delta(k, 0)) over an array of arguments."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    for idx, value in np.ndenumerate(z):
        out[idx] = eval_mellin_barnes(MeijerGSpec.of_family(k, l, nu, float(value)), cfg).value
    return out


@dataclass(frozen=True)
class _Kernel:
    power: float
    order: Optional[float] = None  # beta kernels only

    @property
    def is_beta(self) -> bool:
        return self.order is not None

    @cached_property
    def log_norm(self) -> float:
        return float(np.real(log_gamma(self.order))) if self.is_beta else 0.0

    def log_density(self, X: np.ndarray, log_X: Optional[np.ndarray] = None) -> np.ndarray:
        """
        ln of the kernel at x = exp(-X).

        Beta kernels live on X > 0 and are singular like X^(order - 1) at X = 0; log_X carries ln X so that
        the singular factor stays exact after X itself has underflowed.
        """
        with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
            if not self.is_beta:
                return -self.power * X - np.exp(-X)
            if log_X is None:
                log_X = np.log(X)
            return -self.power * X + (self.order - 1.0) * _log1mexp(X, log_X) - self.log_norm


def _log1mexp(X: np.ndarray, log_X: np.ndarray) -> np.ndarray:
    """ln(1 - exp(-X)) for X > 0, written as ln X + ln((1 - exp(-X)) / X)."""
    positive = X > 0.0
    ratio = np.where(positive, -np.expm1(-X) / np.where(positive, X, 1.0), 1.0)
    return log_X + np.log(ratio)


def convolution_kernels(k: int, l: int, nu: float) -> list[_Kernel]:
    """
    Positive kernels whose Mellin transforms multiply to prod Gamma(s + j/k) / prod Gamma(s + (nu + j)/l).

    Beta kernels x^{j/k} (1 - x)^{mu_j - 1} / Gamma(mu_j) on (0, 1) for j < l, mu_j = (nu + j (k - l)/k) / l,
    then gamma kernels x^{j/k} e^{-x} for l <= j < k. A beta kernel with mu_j = 0 is the identity and is dropped.
    """
    betas = []
    for j in range(l):
        mu = (nu + j * (k - l) / k) / l
        if mu == 0.0:
            continue
        betas.append(_Kernel(j / k, mu))
    gammas = [_Kernel(j / k) for j in range(l, k)]
    return betas + gammas


def _line_tau_max(X: np.ndarray) -> float:
    # the integrand is flat over T in (0, X) and decays doubly exponentially LINE_MARGIN beyond it
    half_width = 0.5 * float(np.max(np.abs(X))) + LINE_MARGIN
    return math.ceil(4.0 * math.asinh(half_width / (0.5 * math.pi))) / 4.0


def _work(kernels: Sequence[_Kernel], h: float) -> int:
    """Nodes the nested rule evaluates per argument; sizes the blocks of the outer sums."""
    *inner, last = kernels
    if not inner:
        return 1
    if last.is_beta:
        return tanh_sinh_unit_log(h)[0].size * _work(inner, h)
    if all(kernel.is_beta for kernel in inner):
        return exp_sinh_half_line_log(h)[0].size
    return sinh_sinh_line_log(h, TYPICAL_LINE_TAU)[0].size * _work(inner, h)


def _log_chain(
    kernels: Sequence[_Kernel], X: np.ndarray, log_X: Optional[np.ndarray], h: float
) -> np.ndarray:
    """
    ln of the Mellin convolution of `kernels` at x = exp(-X).

    In T = -ln t the convolution int f(x/t) g(t) dt/t becomes int f(exp(-(X - T))) g(exp(-T)) dT. Kernel logs
    are added before anything is exponentiated and each sum is a logsumexp, so products of endpoint singularities
    never overflow. log_X is only needed while every kernel is a beta kernel (then X > 0).
    """
    *inner, last = kernels
    if not inner:
        return last.log_density(X, log_X)
    Xe = X[..., None]

    if last.is_beta:
        # both factors live on (0, 1): T = X u, X - T = X (1 - u)
        u, uc, log_u, log_uc, log_w = tanh_sinh_unit_log(h)
        log_Xe = log_X[..., None]
        inner_log = _log_chain(inner, Xe * uc, log_Xe + log_uc, h)
        return logsumexp(inner_log + last.log_density(Xe * u, log_Xe + log_u) + log_Xe + log_w, axis=-1)

    if all(kernel.is_beta for kernel in inner):
        # the beta chain needs S = X - T > 0 and does not depend on X
        S, log_S, log_w = exp_sinh_half_line_log(h)
        inner_log = _log_chain(inner, S, log_S, h)
        return logsumexp(inner_log + last.log_density(Xe - S) + log_w, axis=-1)

    offsets, log_w = sinh_sinh_line_log(h, _line_tau_max(X))
    block = max(1, MAX_TENSOR // max(1, X.size * _work(inner, h)))
    parts = []
    for start in range(0, offsets.size, block):
        T = 0.5 * Xe + offsets[start : start + block]
        terms = _log_chain(inner, Xe - T, None, h) + last.log_density(T) + log_w[start : start + block]
        parts.append(logsumexp(terms, axis=-1))
    return logsumexp(np.stack(parts, axis=-1), axis=-1)


def eval_convolution(k: int, l: int, nu: float, z, tol: float = 1e-8):
    """
    G^{k,0}_{l,k}(z | Delta(l, nu) ; Delta(k, 0)) as a nested Mellin convolution of positive kernels.

    Each convolution integral uses a double-exponential rule in the logarithmic variable; the step is halved
    until the estimated relative error is below `tol`. Accepts scalar or array z.
    """
    if int(k) != k or int(l) != l or not (k > l >= 0):
        raise DomainError(f"eval_convolution requires integers k > l >= 0, got k={k}, l={l}")
    if nu < 0.0:
        raise DomainError(f"eval_convolution requires nu >= 0 (the kernels are not positive otherwise), got {nu}")
    x = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(x > 0.0)) or not np.all(np.isfinite(x)):
        raise DomainError("eval_convolution requires finite z > 0")

    kernels = convolution_kernels(int(k), int(l), float(nu))
    log.debug(f"convolution k={k} l={l} nu={nu}: {len(kernels)} kernels, depth {len(kernels) - 1}")

    values = np.array([_converged_chain(kernels, float(xi), tol) for xi in x.ravel()])
    return float(values[0]) if np.ndim(z) == 0 else values.reshape(np.shape(z))


def _converged_chain(kernels: Sequence[_Kernel], x: float, tol: float) -> float:
    """
    Halve the step until the error estimate meets tol.

    Double-exponential rules square their error with each halving, so with successive relative differences
    d_prev > d the error of the finer result is about d^2 / d_prev.
    """
    X = np.array([-math.log(x)])
    previous, diff, estimate = None, math.inf, math.inf
    for h in CONVOLUTION_STEPS:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
            current = float(np.exp(_log_chain(kernels, X, None, h))[0])
        if previous is not None:
            last_diff, diff = diff, abs(current - previous) / max(current, TINY)
            estimate = diff * diff / last_diff if diff < last_diff < math.inf else diff
            if diff <= tol or estimate <= tol:
                log.debug(f"convolution at z={x:g}: h={h:g}, estimated error {estimate:.2g}")
                return current
        previous = current
    raise ConvergenceError(f"nested convolution at z={x:g} missed tol={tol:g}", estimate)
