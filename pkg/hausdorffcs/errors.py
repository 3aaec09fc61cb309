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

from typing import Optional


class HausdorffError(Exception):
    """Base class for every failure raised by hausdorffcs."""


class DomainError(HausdorffError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """log_gamma was asked for a value at a non-positive integer."""


class PositivityWaiverError(DomainError):
    """A negative nu was requested without explicitly waiving positivity."""


class UnknownFigureError(DomainError):
    pass


class ConvergenceError(HausdorffError, ArithmeticError):
    """A quadrature, contour integral or series did not reach its tolerance."""

    def __init__(self, message: str, error_estimate: Optional[float] = None):
        super().__init__(message)
        self.error_estimate = error_estimate

    def __reduce__(self):
        # keep the estimate when the error crosses a process boundary
        return type(self), (str(self), self.error_estimate)


class FitError(HausdorffError, ArithmeticError):
    """The power-law fit of 1 - e(n) is impossible on the requested range."""
