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

Coherent states |J, gamma> = N(J)^-1/2 sum_n J^(n/2) exp(-i gamma e(n)) / sqrt(rho(n)) |n> over a moment family.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from hausdorffcs import log
from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.moments import MomentFamily
from hausdorffcs.weights import WeightFunction

SERIES_TOL = 1e-14
MAX_TERMS = 1_000_000
CHUNK = 512
MIN_TERMS = 10
RATIO_WINDOW = 10
# actions this close to the radius of convergence are rejected up front
J_LIMIT = 1.0 - 1e-9


@dataclass(frozen=True)
class CSParams:
    J: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.J) and 0.0 <= self.J < 1.0):
            raise DomainError(f"coherent-state action J must satisfy 0 <= J < 1, got {self.J}")
        if not math.isfinite(self.gamma):
            raise DomainError(f"coherent-state phase gamma must be finite, got {self.gamma}")


@dataclass(frozen=True)
class SeriesSummary:
    value: complex
    terms: int
    tail_bound: float


def _log_rho(family: MomentFamily, n: np.ndarray) -> np.ndarray:
    # rho(0) = 1 for every family
    return np.where(n == 0, 0.0, family.log_rho(n))


def _log_e(family: MomentFamily, n: np.ndarray) -> np.ndarray:
    safe = np.where(n == 0, 1, n)
    return np.where(n == 0, -np.inf, family.log_spectrum(safe))


def _check_action(J: float):
    if not (math.isfinite(J) and 0.0 <= J < 1.0):
        raise DomainError(f"J must satisfy 0 <= J < 1, got {J}")
    if J >= J_LIMIT:
        raise ConvergenceError(f"series in J={J} converges too slowly to sum within {MAX_TERMS} terms")


def _sum_series(
    family: MomentFamily,
    J: float,
    tol: float,
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    max_terms: int = MAX_TERMS,
) -> SeriesSummary:
    """
    sum_n J^n w(n) / rho(n) in log space, rescaled chunk by chunk.

    Stops at the first n >= 10 whose term is below tol * |partial sum| and whose geometric tail, with ratio the
    largest of the last 10 observed term ratios, is below the same bound.
    """
    _check_action(J)
    if not tol > 0.0:
        raise DomainError(f"series tolerance must be > 0, got {tol}")
    if J == 0.0:
        first = complex(weight(np.zeros(1, dtype=np.int64))[0]) if weight is not None else 1.0
        return SeriesSummary(first, 1, 0.0)

    log_j = math.log(J)
    total = 0.0 + 0.0j
    shift = -np.inf
    prev_log = None
    prev_ratios = np.full(RATIO_WINDOW - 1, np.inf)

    for start in range(0, max_terms, CHUNK):
        n = np.arange(start, min(start + CHUNK, max_terms), dtype=np.int64)
        log_terms = n * log_j - _log_rho(family, n)
        phase = np.ones(n.shape, dtype=complex) if weight is None else np.asarray(weight(n), dtype=complex)
        with np.errstate(divide="ignore"):
            log_mag = log_terms + np.log(np.abs(phase))

        # everything is stored relative to exp(shift), the largest log term seen so far
        new_shift = max(shift, float(np.max(log_mag)))
        total *= math.exp(shift - new_shift) if np.isfinite(shift) else 0.0
        shift = new_shift
        terms = np.exp(log_mag - shift)
        partial = total + np.cumsum(np.exp(log_terms - shift) * phase)

        # log ratios of successive terms; the window max bounds the tail geometrically
        with np.errstate(invalid="ignore"):
            back = np.diff(np.concatenate(([np.inf if prev_log is None else prev_log], log_mag)))
        back = np.where(np.isnan(back), np.inf, back)
        window = sliding_window_view(np.concatenate((prev_ratios, back)), RATIO_WINDOW).max(axis=1)
        ratio = np.exp(np.minimum(window, 0.0))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tail = np.where(window < 0.0, terms * ratio / (1.0 - ratio), np.inf)

        bound = tol * np.abs(partial)
        done = (n >= MIN_TERMS) & (terms <= bound) & (tail <= bound)
        if np.any(done):
            i = int(np.argmax(done))
            scale = math.exp(shift)
            log.debug(f"{family.label}: series in J={J:g} truncated after {int(n[i]) + 1} terms")
            return SeriesSummary(complex(partial[i]) * scale, int(n[i]) + 1, float(tail[i]) * scale)

        total = complex(partial[-1])
        prev_log = float(log_mag[-1])
        prev_ratios = np.concatenate((prev_ratios, back))[-(RATIO_WINDOW - 1) :]

    raise ConvergenceError(f"{family.label}: series in J={J} needs more than {max_terms} terms")


def normalization_terms(family: MomentFamily, J: float, tol: float = SERIES_TOL) -> SeriesSummary:
    summary = _sum_series(family, J, tol)
    return SeriesSummary(summary.value.real, summary.terms, summary.tail_bound)


def normalization(family: MomentFamily, J: float, tol: float = SERIES_TOL) -> float:
    """N(J) = sum_n J^n / rho(n)."""
    return float(normalization_terms(family, J, tol).value)


def action_identity_residual(family: MomentFamily, J: float, tol: float = SERIES_TOL) -> float:
    """<J|H|J> - J with H|n> = e(n)|n>; the series telescopes, so this vanishes to summation accuracy."""
    if J == 0.0:
        _check_action(J)
        return 0.0
    norm = normalization(family, J, tol)
    energy = _sum_series(family, J, tol, weight=lambda n: np.exp(_log_e(family, n))).value.real
    return energy / norm - J


def overlap(family: MomentFamily, p1: CSParams, p2: CSParams, tol: float = SERIES_TOL) -> complex:
    """<p1|p2>."""
    n1 = normalization(family, p1.J, tol)
    n2 = normalization(family, p2.J, tol)
    if p1.J * p2.J == 0.0:
        return complex(1.0 / math.sqrt(n1 * n2))
    d_gamma = p2.gamma - p1.gamma
    cross = _sum_series(
        family,
        math.sqrt(p1.J * p2.J),
        tol,
        weight=lambda n: np.exp(-1j * d_gamma * np.exp(_log_e(family, n))),
    )
    return cross.value / math.sqrt(n1 * n2)


@dataclass(frozen=True)
class CoherentState:
    family: MomentFamily
    params: CSParams

    def norm(self, tol: float = SERIES_TOL) -> float:
        return normalization(self.family, self.params.J, tol)

    def coefficients(self, n_max: int, tol: float = SERIES_TOL) -> np.ndarray:
        """Amplitudes <n|J, gamma> for n = 0..n_max."""
        if int(n_max) != n_max or n_max < 0:
            raise DomainError(f"n_max must be a nonnegative integer, got {n_max}")
        n = np.arange(int(n_max) + 1, dtype=np.int64)
        log_norm = math.log(self.norm(tol))
        if self.params.J == 0.0:
            out = np.zeros(n.shape, dtype=complex)
            out[0] = 1.0
            return out
        log_amp = 0.5 * (n * math.log(self.params.J) - _log_rho(self.family, n) - log_norm)
        phase = np.exp(-1j * self.params.gamma * np.exp(_log_e(self.family, n)))
        return np.exp(log_amp) * phase

    def overlap(self, other: "CoherentState", tol: float = SERIES_TOL) -> complex:
        if other.family != self.family:
            raise DomainError("overlap needs two states over the same moment family")
        return overlap(self.family, self.params, other.params, tol)


def resolution_weight(family: MomentFamily, x, tol: float = SERIES_TOL, epsilon: float = 1e-6):
    """W(x) = N(x) W~(x) on (0, 1 - epsilon]; the point mass of W~ at x = 1 is not part of it."""
    arr = np.asarray(x, dtype=float)
    if np.any(~((arr > 0.0) & (arr <= 1.0 - epsilon))):
        raise DomainError(f"resolution_weight is defined on (0, 1 - {epsilon:g}]")
    density = np.atleast_1d(WeightFunction(family).density(arr))
    norms = np.array([normalization(family, float(v), tol) for v in np.atleast_1d(arr)])
    values = (norms * density).reshape(arr.shape)
    return float(values) if values.ndim == 0 else values
