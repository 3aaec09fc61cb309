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

Weight functions W(y) on (0, 1) whose power moments are the moment families of hausdorffcs.moments.
Every density is evaluated in L = ln(1/y).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from hausdorffcs import log
from hausdorffcs.errors import DomainError, UnknownFigureError
from hausdorffcs.meijer import ContourConfig, eval_convolution, mellin_barnes_values
from hausdorffcs.moments import BesselIExp, BesselK, CoulombAlt, CoulombExact, GeneralPower, MomentFamily
from hausdorffcs.specfun import bessel_i, bessel_k_scaled

POSITIVITY_FLOOR = -1e-12


class Backend(str, Enum):
    CLOSED_FORM = "closed-form"
    MELLIN_BARNES = "mellin-barnes"
    CONVOLUTION = "convolution"


def log_of_inverse(y) -> np.ndarray:
    """L = ln(1/y) for 0 < y < 1, exact near y = 1 (y - 1 is exact there)."""
    y = np.asarray(y, dtype=float)
    if np.any(~((y > 0.0) & (y < 1.0))):
        raise DomainError("weights are defined for 0 < y < 1; use one-sided limits at the endpoints")
    return np.where(y > 0.5, -np.log1p(y - 1.0), -np.log(np.where(y > 0.5, 0.5, y)))


def _log_k(nu: float, x: np.ndarray) -> np.ndarray:
    # ln K_nu(x) without overflow for small x or underflow for large x
    return np.log(bessel_k_scaled(nu, x)) - x


def _general_log_prefactor(family: GeneralPower, L: np.ndarray) -> np.ndarray:
    k, l, nu = family.k, family.l, family.nu
    return (
        family.a
        + 0.5 * math.log(k)
        + (0.5 - nu) * math.log(l)
        - 0.5 * (k - l) * math.log(2.0 * math.pi)
        + (nu - 1.0) * np.log(L)
    )


def _general_log_argument(family: GeneralPower, L: np.ndarray) -> np.ndarray:
    k, l = family.k, family.l
    return k * math.log(family.a) + l * math.log(l) - k * math.log(k) - l * np.log(L)


def _closed_log_g(family: GeneralPower, log_z: np.ndarray) -> Optional[np.ndarray]:
    """ln G^{k,0}_{l,k}(z) for the parameter sets that reduce to exponentials and K Bessel functions."""
    key = (family.k, family.l)
    z = np.exp(log_z)
    if key == (2, 1) and family.nu == 0.0:
        return 0.5 * log_z - z
    if key == (3, 1) and family.nu == 0.0:
        root = np.exp(0.5 * log_z)
        return math.log(2.0) + 0.5 * log_z + _log_k(1.0 / 3.0, 2.0 * root)
    # nu = 1/2 factors into two K functions of half the argument
    if key == (3, 1) and math.isclose(family.nu, 0.5, abs_tol=1e-15):
        root = np.exp(0.5 * log_z)
        return (
            math.log(2.0 / math.sqrt(math.pi))
            + 0.5 * log_z
            + _log_k(1.0 / 3.0, root)
            + _log_k(2.0 / 3.0, root)
        )
    if key == (3, 2) and family.nu == 0.0:
        half = 0.5 * z
        bracket = bessel_k_scaled(1.0 / 3.0, half) + bessel_k_scaled(2.0 / 3.0, half)
        return log_z - math.log(2.0 * math.sqrt(math.pi)) - z + np.log(bracket)
    return None


def has_closed_form(family: MomentFamily) -> bool:
    if not isinstance(family, GeneralPower):
        return True
    return _closed_log_g(family, np.zeros(1)) is not None


@dataclass(frozen=True)
class WeightFunction:
    """Density on (0, 1) plus an optional point mass at y = 1; moments are those of `family`."""

    family: MomentFamily
    backend: Backend = Backend.CLOSED_FORM
    contour: ContourConfig = field(default_factory=ContourConfig)

    def __post_init__(self):
        backend = Backend(self.backend)
        if backend is Backend.CLOSED_FORM and not has_closed_form(self.family):
            log.info(f"No closed form for {self.family.label}; using the Mellin-Barnes backend")
            backend = Backend.MELLIN_BARNES
        object.__setattr__(self, "backend", backend)

    @property
    def atom_at_one(self) -> float:
        return self.family.atom_at_one

    def density_at_log(self, L):
        """Density as a function of L = ln(1/y) > 0."""
        L_arr = np.asarray(L, dtype=float)
        if np.any(~(L_arr > 0.0)) or not np.all(np.isfinite(L_arr)):
            raise DomainError("density_at_log requires finite L > 0")
        values = self._density(np.atleast_1d(L_arr)).reshape(L_arr.shape)
        return float(values) if values.ndim == 0 else values

    def density(self, y):
        """Density at 0 < y < 1."""
        L = log_of_inverse(y)
        values = self._density(np.atleast_1d(L)).reshape(L.shape)
        return float(values) if values.ndim == 0 else values

    __call__ = density

    def _density(self, L: np.ndarray) -> np.ndarray:
        family = self.family
        if isinstance(family, GeneralPower):
            return self._general(family, L)
        if isinstance(family, BesselK):
            # K_{nu/2}(1/(8L)) grows like exp(1/(8L)) as L -> 0, hence the scaled form
            x = 1.0 / (8.0 * L)
            log_value = (
                -math.log(2.0)
                - family.log_k_at_one
                - 0.5 * np.log(math.pi * L)
                - x
                + _log_k(0.5 * family.nu, x)
            )
            return np.exp(log_value)
        if isinstance(family, BesselIExp):
            return math.exp(-1.0) * L ** (1.0 / 6.0) * bessel_i(1.0 / 3.0, 2.0 * np.sqrt(L))
        if isinstance(family, CoulombExact):
            # the other half of the mass is the atom at y = 1
            return np.full(L.shape, 0.5)
        if isinstance(family, CoulombAlt):
            root = np.sqrt(L)
            return math.exp(-1.0) * bessel_i(1.0, 2.0 * root) / root
        raise DomainError(f"no weight function known for {family!r}")

    def _general(self, family: GeneralPower, L: np.ndarray) -> np.ndarray:
        log_prefactor = _general_log_prefactor(family, L)
        log_z = _general_log_argument(family, L)
        if self.backend is Backend.CLOSED_FORM:
            with np.errstate(under="ignore"):
                return np.exp(log_prefactor + _closed_log_g(family, log_z))
        # generic backends take G at z itself and only the prefactor in log form
        z = np.exp(log_z)
        if self.backend is Backend.MELLIN_BARNES:
            g = mellin_barnes_values(family.k, family.l, family.nu, z, self.contour)
        else:
            g = np.asarray(eval_convolution(family.k, family.l, family.nu, z))
        return np.exp(log_prefactor) * g


def weight_general(a: float, nu: float, k: int, l: int, y, backend=Backend.CLOSED_FORM, allow_negative_nu=False):
    """Density of the weight whose moments are e^a (n+1)^-nu exp(-a (n+1)^(l/k)), evaluated at y."""
    family = GeneralPower(a=a, nu=nu, k=k, l=l, allow_negative_nu=allow_negative_nu)
    return WeightFunction(family, backend).density(y)


def weight_named(family: MomentFamily, y):
    return WeightFunction(family).density(y)


def levy_stable_density(gamma: float, x):
    """One-sided Levy stable density sqrt(gamma / 2 pi) x^-3/2 exp(-gamma / 2x), x > 0."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(gamma / (2.0 * np.pi)) * x**-1.5 * np.exp(-gamma / (2.0 * x))


@dataclass(frozen=True)
class PositivityReport:
    family: str
    backend: str
    grid_size: int
    min_value: float
    at_log: float
    at_y: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "backend": self.backend,
            "grid_size": self.grid_size,
            "min_value": self.min_value,
            "at_log": self.at_log,
            "at_y": self.at_y,
            "pass": self.passed,
        }


def positivity_scan(wf: WeightFunction, grid_size: int = 1000) -> PositivityReport:
    """Sample the density on a grid log-spaced in L = ln(1/y) over [1e-4, 1e4] and report its minimum."""
    if grid_size < 1000:
        raise DomainError(f"positivity_scan needs grid_size >= 1000, got {grid_size}")
    L = np.geomspace(1e-4, 1e4, int(grid_size))
    values = np.asarray(wf.density_at_log(L))
    worst = int(np.argmin(values))
    report = PositivityReport(
        family=wf.family.label,
        backend=wf.backend.value,
        grid_size=int(grid_size),
        min_value=float(values[worst]),
        at_log=float(L[worst]),
        at_y=float(np.exp(-L[worst])),
        passed=bool(values[worst] >= POSITIVITY_FLOOR),
    )
    if not report.passed:
        log.warning(f"{report.family}: density {report.min_value:.3g} < 0 at y={report.at_y:.6g}")
    return report


@dataclass(frozen=True)
class FigureTable:
    figure_id: int
    y: np.ndarray
    curves: dict
    weights: dict
    atoms: dict

    @property
    def columns(self) -> tuple:
        return ("y",) + tuple(self.curves)

    def rows(self):
        """Data rows (y, curve values...) followed by one annotation row of atom masses when there are atoms."""
        stacked = np.column_stack([self.y] + [self.curves[name] for name in self.curves])
        for row in stacked:
            yield tuple(float(v) for v in row)
        if any(self.atoms.values()):
            yield ("atom",) + tuple(float(self.atoms[name]) for name in self.curves)


FIGURES = {
    1: (
        WeightFunction(GeneralPower(nu=0.0, k=3, l=1)),
        WeightFunction(GeneralPower(nu=0.5, k=3, l=1)),
    ),
    2: (
        WeightFunction(GeneralPower(nu=0.0, k=3, l=2)),
        WeightFunction(GeneralPower(nu=0.25, k=3, l=2), Backend.MELLIN_BARNES),
    ),
    3: (
        WeightFunction(GeneralPower(nu=0.0, k=2, l=1)),
        WeightFunction(BesselK(nu=4.0 / 3.0)),
    ),
    4: (
        WeightFunction(CoulombExact()),
        WeightFunction(CoulombAlt()),
    ),
}


def figure_data(figure_id: int, grid_size: int = 1000) -> FigureTable:
    """The two weight curves of figure 1-4 on the uniform grid y_i = i / (grid_size + 1)."""
    if figure_id not in FIGURES:
        raise UnknownFigureError(f"unknown figure id {figure_id}; expected one of {sorted(FIGURES)}")
    if grid_size < 100:
        raise DomainError(f"figure_data needs grid_size >= 100, got {grid_size}")
    y = np.arange(1, grid_size + 1) / (grid_size + 1.0)
    weights = dict(zip(("curve_I", "curve_II"), FIGURES[figure_id]))
    curves = {name: np.asarray(wf.density(y)) for name, wf in weights.items()}
    atoms = {name: wf.atom_at_one for name, wf in weights.items()}
    return FigureTable(figure_id=figure_id, y=y, curves=curves, weights=weights, atoms=atoms)
