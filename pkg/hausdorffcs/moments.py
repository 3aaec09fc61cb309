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
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import ClassVar, Optional

import numpy as np

from hausdorffcs import log
from hausdorffcs.errors import DomainError, FitError, PositivityWaiverError
from hausdorffcs.specfun import bessel_k_scaled

# both published forms of the next-to-leading term for BesselK(4/3); nothing is fitted on them
BESSELK_SUBLEADING_FORMS = (
    "e(n) ~ 1 - 1/(2 n^(1/2)) - 1/(8 n)",
    "e(n) ~ 1 - 1/(2 n^(1/2)) + 1/(8 n)",
)


def _as_index(n) -> np.ndarray:
    arr = np.asarray(n)
    if arr.dtype.kind not in "iu":
        if not np.all(arr == np.floor(arr)):
            raise DomainError("moment index n must be an integer")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise DomainError(f"moment index n must be >= 0, got {arr.min()}")
    return arr


def _shaped(values: np.ndarray, n):
    return float(values) if np.ndim(n) == 0 else values


@dataclass(frozen=True)
class MomentFamily:
    """A moment sequence rho(n) with rho(0) = 1 and the spectrum e(n) = rho(n) / rho(n - 1) it induces."""

    kind: ClassVar[str] = "abstract"
    atom_at_one: ClassVar[float] = 0.0

    def log_rho(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_spectrum(self, n: np.ndarray) -> np.ndarray:
        """ln e(n) for n >= 1; subclasses override with cancellation-free forms."""
        n = np.asarray(n, dtype=float)
        return self.log_rho(n) - self.log_rho(n - 1.0)

    @property
    def label(self) -> str:
        return self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class GeneralPower(MomentFamily):
    """rho(n) = e^a (n+1)^(-nu) exp(-a (n+1)^(l/k)), k > l >= 1."""

    kind: ClassVar[str] = "general"

    a: float = 1.0
    nu: float = 0.0
    k: int = 2
    l: int = 1  # noqa: E741
    allow_negative_nu: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or int(self.l) != self.l:
            raise DomainError(f"k and l must be integers, got k={self.k}, l={self.l}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "l", int(self.l))
        if not (self.k > self.l >= 1):
            raise DomainError(f"GeneralPower requires k > l >= 1, got k={self.k}, l={self.l}")
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"GeneralPower requires a > 0, got a={self.a}")
        if not math.isfinite(self.nu):
            raise DomainError(f"nu must be finite, got {self.nu}")
        if self.nu < 0.0 and not self.allow_negative_nu:
            raise PositivityWaiverError(
                f"nu={self.nu} < 0 gives a weight that is not positive; pass allow_negative_nu=True to proceed"
            )

    @property
    def q(self) -> float:
        return self.l / self.k

    @property
    def label(self) -> str:
        return f"general(a={self.a:g}, nu={self.nu:g}, k={self.k}, l={self.l})"

    def log_rho(self, n):
        m = np.asarray(n, dtype=float) + 1.0
        return self.a - self.nu * np.log(m) - self.a * m**self.q

    def log_spectrum(self, n):
        n = np.asarray(n, dtype=float)
        step = np.log1p(1.0 / n)
        # (n+1)^q - n^q without cancellation
        return -self.nu * step - self.a * n**self.q * np.expm1(self.q * step)


@dataclass(frozen=True)
class BesselK(MomentFamily):
    """rho(n) = K_nu(sqrt(n+1)) / (K_nu(1) sqrt(n+1))."""

    kind: ClassVar[str] = "besselk"

    nu: float = 4.0 / 3.0
    log_k_at_one: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.nu) or abs(self.nu) > 5.0:
            raise DomainError(f"BesselK family supports |nu| <= 5, got {self.nu}")
        object.__setattr__(self, "log_k_at_one", math.log(bessel_k_scaled(self.nu, 1.0)) - 1.0)

    @property
    def label(self) -> str:
        return f"besselk(nu={self.nu:g})"

    def _log_k(self, x: np.ndarray) -> np.ndarray:
        return np.log(bessel_k_scaled(self.nu, x)) - x

    def log_rho(self, n):
        root = np.sqrt(np.asarray(n, dtype=float) + 1.0)
        return self._log_k(root) - self.log_k_at_one - np.log(root)

    def log_spectrum(self, n):
        n = np.asarray(n, dtype=float)
        upper, lower = np.sqrt(n + 1.0), np.sqrt(n)
        scaled = np.log(bessel_k_scaled(self.nu, upper)) - np.log(bessel_k_scaled(self.nu, lower))
        # sqrt(n+1) - sqrt(n) = 1 / (sqrt(n+1) + sqrt(n))
        return scaled - 1.0 / (upper + lower) - 0.5 * np.log1p(1.0 / n)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "nu": self.nu}


@dataclass(frozen=True)
class BesselIExp(MomentFamily):
    """rho(n) = e^{-1} e^{1/(n+1)} (n+1)^{-4/3}."""

    kind: ClassVar[str] = "besseli-exp"

    def log_rho(self, n):
        m = np.asarray(n, dtype=float) + 1.0
        return -1.0 + 1.0 / m - (4.0 / 3.0) * np.log(m)

    def log_spectrum(self, n):
        n = np.asarray(n, dtype=float)
        return -1.0 / (n * (n + 1.0)) - (4.0 / 3.0) * np.log1p(1.0 / n)


@dataclass(frozen=True)
class CoulombExact(MomentFamily):
    """rho(n) = (n+2) / (2(n+1)); e(n) = 1 - (n+1)^{-2}. Weight 1/2 on (0,1) plus an atom 1/2 at y = 1."""

    kind: ClassVar[str] = "coulomb-exact"
    atom_at_one: ClassVar[float] = 0.5

    def log_rho(self, n):
        n = np.asarray(n, dtype=float)
        return np.log1p(1.0 / (n + 1.0)) - math.log(2.0)

    def log_spectrum(self, n):
        n = np.asarray(n, dtype=float)
        return np.log1p(-1.0 / (n + 1.0) ** 2)


@dataclass(frozen=True)
class CoulombAlt(MomentFamily):
    """rho(n) = e^{-1} e^{1/(n+1)}, with an atom e^{-1} at y = 1."""

    kind: ClassVar[str] = "coulomb-alt"
    atom_at_one: ClassVar[float] = math.exp(-1.0)

    def log_rho(self, n):
        m = np.asarray(n, dtype=float) + 1.0
        return -1.0 + 1.0 / m

    def log_spectrum(self, n):
        n = np.asarray(n, dtype=float)
        return -1.0 / (n * (n + 1.0))


FAMILY_KINDS = {cls.kind: cls for cls in (GeneralPower, BesselK, BesselIExp, CoulombExact, CoulombAlt)}


def family_from_dict(data: dict) -> MomentFamily:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in FAMILY_KINDS:
        raise DomainError(f"unknown moment family kind {kind!r}; expected one of {sorted(FAMILY_KINDS)}")
    return FAMILY_KINDS[kind](**data)


def rho(family: MomentFamily, n):
    """rho(n), elementwise over integer n >= 0; rho(0) is exactly 1."""
    idx = _as_index(n)
    values = np.where(idx == 0, 1.0, np.exp(family.log_rho(idx)))
    return _shaped(values, n)


def log_spectrum(family: MomentFamily, n):
    """ln e(n), with ln e(0) = -inf."""
    idx = _as_index(n)
    safe = np.where(idx == 0, 1, idx)
    with np.errstate(divide="ignore"):
        values = np.where(idx == 0, -np.inf, family.log_spectrum(safe))
    return _shaped(values, n)


def spectrum(family: MomentFamily, n):
    """e(n) = rho(n) / rho(n-1) for n >= 1 and e(0) = 0."""
    values = np.exp(np.asarray(log_spectrum(family, n)))
    return _shaped(values, n)


def sigma_fraction(k: int, l: int) -> Fraction:  # noqa: E741
    if int(k) != k or int(l) != l or not (k > l >= 1):
        raise DomainError(f"sigma_from_kl requires integers k > l >= 1, got k={k}, l={l}")
    return Fraction(2 * (int(k) - int(l)), 3 * int(k) - int(l))


def sigma_from_kl(k: int, l: int) -> float:  # noqa: E741
    """sigma = 2(k - l) / (3k - l)"""
    return float(sigma_fraction(k, l))


def theta_from_sigma(sigma):
    """Exponent of 1 - e(n) for the potential exponent sigma: 2 sigma / (2 - sigma). Exact on Fractions."""
    return 2 * sigma / (2 - sigma)


def sigma_from_theta(theta):
    return 2 * theta / (2 + theta)


@dataclass(frozen=True)
class AsymptoticDescriptor:
    """1 - e(n) ~ c n^(-theta) with theta = 2 sigma / (2 - sigma)."""

    theta: float
    c: float
    sigma: Optional[float] = None
    raw_theta: Optional[float] = None
    theta_error: Optional[float] = None
    c_error: Optional[float] = None
    n_min: Optional[int] = None
    n_max: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise DomainError(f"theta must be > 0, got {self.theta}")
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise DomainError(f"c must be > 0, got {self.c}")
        if self.sigma is None:
            object.__setattr__(self, "sigma", sigma_from_theta(self.theta))
        elif not math.isclose(theta_from_sigma(self.sigma), self.theta, rel_tol=1e-9):
            raise DomainError(f"sigma={self.sigma} is inconsistent with theta={self.theta}")
        if not (0.0 < self.sigma <= 2.0):
            raise DomainError(f"sigma must lie in (0, 2], got {self.sigma}")

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "AsymptoticDescriptor":
        fields = ("theta", "c", "sigma", "raw_theta", "theta_error", "c_error", "n_min", "n_max")
        return cls(**{key: data[key] for key in fields if key in data})


def leading_asymptotics(family: MomentFamily) -> AsymptoticDescriptor:
    """The exact (theta, c) implied by the closed form of rho(n)."""
    if isinstance(family, GeneralPower):
        theta, c = (family.k - family.l) / family.k, family.a * family.l / family.k
    elif isinstance(family, BesselK):
        theta, c = 0.5, 0.5
    elif isinstance(family, BesselIExp):
        theta, c = 1.0, 4.0 / 3.0
    elif isinstance(family, (CoulombExact, CoulombAlt)):
        theta, c = 2.0, 1.0
    else:
        raise DomainError(f"no known asymptotics for {family!r}")
    return AsymptoticDescriptor(theta=theta, c=c)


def _correction_exponents(theta0: float) -> list[float]:
    exponents = []
    for gamma in (theta0, 1.0 - theta0, 1.0):
        if gamma < 0.05:
            continue
        if all(abs(gamma - other) > 0.05 for other in exponents):
            exponents.append(gamma)
    return exponents


def _refined_fit(n: np.ndarray, log_gap: np.ndarray, theta0: float) -> tuple[float, float]:
    log_n = np.log(n)
    rescaled = n / n[0]
    columns = [np.ones_like(log_n), -log_n]
    columns += [rescaled ** (-gamma) for gamma in _correction_exponents(theta0)]
    design = np.column_stack(columns)
    coeffs, *_ = np.linalg.lstsq(design, log_gap, rcond=None)
    return float(coeffs[1]), float(math.exp(coeffs[0]))


def _fit_range(n: np.ndarray, log_gap: np.ndarray) -> tuple[float, float, float]:
    slope, _ = np.polyfit(np.log(n), log_gap, 1)
    raw_theta = float(-slope)
    theta = raw_theta
    for _ in range(2):
        theta, c = _refined_fit(n, log_gap, theta)
    return theta, c, raw_theta


def fit_asymptotics(family: MomentFamily, n_min: int, n_max: int, points: int = 400) -> AsymptoticDescriptor:
    """
    Least-squares fit of ln(1 - e(n)) against ln n on a log-spaced grid in [n_min, n_max].

    The plain log-log slope is kept as raw_theta. theta and c come from a linear fit that adds
    correction terms n^-theta0, n^-(1 - theta0), n^-1 (two passes). theta_error and c_error compare the full
    range against its upper half.
    """
    if not (n_max >= 4 * n_min >= 400):
        raise DomainError(f"fit_asymptotics needs n_max >= 4 n_min >= 400, got n_min={n_min}, n_max={n_max}")
    n = np.unique(np.round(np.geomspace(n_min, n_max, points)).astype(np.int64))
    gap = -np.expm1(np.asarray(log_spectrum(family, n)))
    if np.any(~(gap > 0.0)) or not np.all(np.isfinite(gap)):
        bad = int(n[np.flatnonzero(~(gap > 0.0))[0]]) if np.any(~(gap > 0.0)) else -1
        raise FitError(f"1 - e(n) must be positive on [{n_min}, {n_max}] (fails at n={bad})")
    log_gap = np.log(gap)

    theta, c, raw_theta = _fit_range(n, log_gap)
    upper = n >= math.sqrt(n_min * n_max)
    theta_hi, c_hi, _ = _fit_range(n[upper], log_gap[upper])
    log.debug(f"fit {family.label} on [{n_min}, {n_max}]: theta={theta:.6g} (raw {raw_theta:.6g}) c={c:.6g}")

    return AsymptoticDescriptor(
        theta=theta,
        c=c,
        raw_theta=raw_theta,
        theta_error=abs(theta - theta_hi),
        c_error=abs(c - c_hi),
        n_min=int(n_min),
        n_max=int(n_max),
    )
