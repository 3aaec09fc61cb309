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

Moment reconstruction: every moment of a weight on (0, 1) is a Laplace transform in t = ln(1/y),

    int_0^1 y^n W(y) dy = int_0^inf exp(-(n+1) t) W(exp(-t)) dt,

which is smooth and exponentially damped where the y-form is not.
"""

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from hausdorffcs import log
from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.meijer import ContourConfig
from hausdorffcs.moments import GeneralPower, MomentFamily, family_from_dict, rho
from hausdorffcs.weights import Backend, WeightFunction

DEFAULT_EPSREL = 1e-9
MIN_TOLERANCE = 1e-12
CLOSED_FORM_TOLERANCE = 1e-8
GENERIC_TOLERANCE = 1e-6
QUAD_LIMIT = 200
# the achieved error may exceed the requested epsrel by this factor before it counts as a failure
ERROR_SLACK = 100.0

_SCAN = np.geomspace(1e-8, 1e3, 400)


class LaplaceIntegrator:
    """
    int_0^inf exp(-p t) F(t) dt for a density F given in the Laplace variable.

    The integration range is split at the mode t* of exp(-p t) F(t), found on a coarse log-spaced scan:
    adaptive Gauss-Kronrod on [0, t*] and the substitution u = exp(-p (t - t*)) on [t*, inf).
    """

    def __init__(self, density: Callable, epsrel: float = DEFAULT_EPSREL):
        self.epsrel = float(epsrel)
        self._scalar = lru_cache(maxsize=None)(lambda t: float(density(t)))
        with np.errstate(divide="ignore", under="ignore"):
            self._log_scan = np.log(np.maximum(np.asarray(density(_SCAN), dtype=float), 0.0))

    def mode(self, p: float) -> float:
        profile = self._log_scan - p * _SCAN
        peak = int(np.argmax(profile))
        return 0.0 if peak == 0 else float(_SCAN[peak])

    def _quad(self, f, a: float, b: float) -> tuple[float, float]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            value, error = quad(f, a, b, epsabs=0.0, epsrel=self.epsrel, limit=QUAD_LIMIT)
        return value, error

    def transform(self, p: float) -> tuple[float, float]:
        """(value, error estimate) of the Laplace transform at p > 0."""
        if not p > 0.0:
            raise DomainError(f"Laplace transform needs p > 0, got {p}")
        f = self._scalar
        t_star = self.mode(p)
        head, head_err = (0.0, 0.0) if t_star == 0.0 else self._quad(lambda t: math.exp(-p * t) * f(t), 0.0, t_star)
        # u = exp(-p (t - t*)) maps [t*, inf) onto (0, 1]
        tail, tail_err = self._quad(lambda u: f(t_star - math.log(u) / p), 0.0, 1.0)
        scale = math.exp(-p * t_star) / p
        value = head + scale * tail
        error = head_err + scale * tail_err
        log.debug(f"Laplace transform at p={p:g}: split t*={t_star:.4g}, value={value:.17g}, err={error:.3g}")
        if error > ERROR_SLACK * self.epsrel * abs(value) and error > 1e-300:
            raise ConvergenceError(
                f"Laplace quadrature at p={p:g} reached only {error:.3g} absolute error on {value:.6g}", error
            )
        return value, error


def _integrator(wf: WeightFunction, epsrel: float) -> LaplaceIntegrator:
    return LaplaceIntegrator(wf.density_at_log, epsrel)


def reconstruct_moment_with_error(wf: WeightFunction, n: int, epsrel: float = DEFAULT_EPSREL) -> tuple[float, float]:
    """(int_0^1 y^n W(y) dy + atom, error estimate)."""
    if int(n) != n or n < 0:
        raise DomainError(f"moment index n must be a nonnegative integer, got {n}")
    value, error = _integrator(wf, epsrel).transform(n + 1.0)
    return value + wf.atom_at_one, error


def reconstruct_moment(wf: WeightFunction, n: int, epsrel: float = DEFAULT_EPSREL) -> float:
    return reconstruct_moment_with_error(wf, n, epsrel)[0]


@dataclass(frozen=True)
class MomentRow:
    n: int
    rho_exact: float
    rho_quadrature: float

    @property
    def abs_err(self) -> float:
        return abs(self.rho_quadrature - self.rho_exact)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.rho_exact)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho_exact": self.rho_exact,
            "rho_quadrature": self.rho_quadrature,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
        }


@dataclass(frozen=True)
class VerificationReport:
    family: dict
    backend: str
    n_max: int
    tolerance: float
    rows: tuple

    @property
    def max_rel_err(self) -> float:
        return max(row.rel_err for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.max_rel_err <= self.tolerance

    def header(self) -> dict:
        return {
            "family": self.family,
            "backend": self.backend,
            "n_max": self.n_max,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "max_rel_err": self.max_rel_err,
        }

    def to_dict(self) -> dict:
        return {**self.header(), "rows": [row.to_dict() for row in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_jsonl(self) -> str:
        """Header object on the first line, then one row object per n."""
        lines = [json.dumps(self.header())] + [json.dumps(row.to_dict()) for row in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        rows = tuple(MomentRow(int(r["n"]), float(r["rho_exact"]), float(r["rho_quadrature"])) for r in data["rows"])
        return cls(
            family=dict(data["family"]),
            backend=str(data["backend"]),
            n_max=int(data["n_max"]),
            tolerance=float(data["tolerance"]),
            rows=rows,
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "VerificationReport":
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not records:
            raise DomainError("empty verification report")
        return cls.from_dict({**records[0], "rows": records[1:]})

    def to_family(self) -> MomentFamily:
        return family_from_dict(self.family)


def default_tolerance(wf: WeightFunction) -> float:
    return CLOSED_FORM_TOLERANCE if wf.backend is Backend.CLOSED_FORM else GENERIC_TOLERANCE


def _reconstruct_block(wf: WeightFunction, epsrel: float, indices: list[int]) -> list[float]:
    """Reconstructed moments for `indices`; module level so that worker processes can unpickle it."""
    integrator = _integrator(wf, epsrel)
    values = []
    for n in indices:
        try:
            value, _ = integrator.transform(n + 1.0)
        except ConvergenceError as exc:
            log.error(f"Quadrature failed for {wf.family.label} at n={n}: {exc}")
            raise ConvergenceError(f"n={n}: {exc}", exc.error_estimate) from exc
        values.append(value + wf.atom_at_one)
    return values


def verify_family(
    family: MomentFamily,
    n_max: int,
    tol: Optional[float] = None,
    backend=Backend.CLOSED_FORM,
    workers: int = 1,
    contour: Optional[ContourConfig] = None,
    epsrel: float = DEFAULT_EPSREL,
) -> VerificationReport:
    """Compare reconstructed moments against rho(n) for n = 0..n_max; quadrature runs at min(tol / 10, epsrel)."""
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a nonnegative integer, got {n_max}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    wf = WeightFunction(family, backend, contour or ContourConfig())
    tol = default_tolerance(wf) if tol is None else float(tol)
    if not tol >= MIN_TOLERANCE:
        raise DomainError(f"verification tolerance must be >= {MIN_TOLERANCE:g}, got {tol}")
    quad_epsrel = min(tol / 10.0, epsrel)
    exact = np.atleast_1d(rho(family, np.arange(int(n_max) + 1)))

    log.debug(f"Verifying {family.label} for n <= {n_max} with {wf.backend.value}, tol={tol:g}, workers={workers}")
    indices = list(range(int(n_max) + 1))
    if workers == 1 or len(indices) < 2:
        values = _reconstruct_block(wf, quad_epsrel, indices)
    else:
        # block i holds n = i, i + workers, i + 2 workers, ...
        blocks = [indices[start::workers] for start in range(min(workers, len(indices)))]
        values = [0.0] * len(indices)
        with ProcessPoolExecutor(max_workers=len(blocks)) as pool:
            for block, block_values in zip(blocks, pool.map(partial(_reconstruct_block, wf, quad_epsrel), blocks)):
                for n, value in zip(block, block_values):
                    values[n] = value
    rows = tuple(MomentRow(n, float(exact[n]), values[n]) for n in indices)
    report = VerificationReport(family.to_dict(), wf.backend.value, int(n_max), tol, rows)
    if not report.passed:
        log.warning(f"{family.label}: max relative error {report.max_rel_err:.3g} exceeds {tol:g}")
    return report


def laplace_identity(
    k: int, l: int, a: float, nu: float, p: float, backend=Backend.CLOSED_FORM  # noqa: E741
) -> tuple[float, float]:
    """
    (numeric, exact) for the Laplace transform of the Meijer-G kernel at p.

    The kernel is the weight density in L with its e^a factor removed; exact is p^-nu exp(-a p^(l/k)).
    """
    family = GeneralPower(a=a, nu=nu, k=k, l=l)
    value, _ = _integrator(WeightFunction(family, backend), DEFAULT_EPSREL).transform(p)
    return math.exp(-a) * value, p ** (-nu) * math.exp(-a * p ** (l / k))
