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

from importlib import metadata

PACKAGE = "hausdorffcs"
# packages whose versions change numerical results at the last digits
NUMERICAL_STACK = ("numpy", "scipy")
UNKNOWN = "unknown"


def get_version(distribution: str = PACKAGE) -> str:
    try:
        return metadata.version(distribution)
    except metadata.PackageNotFoundError:
        return UNKNOWN


def stack_versions() -> dict:
    """Installed versions of the numerical dependencies, keyed by distribution name."""
    return {name: get_version(name) for name in NUMERICAL_STACK}


def version_message() -> str:
    """Template for `--version`: click fills in %(prog)s and %(version)s."""
    stack = ", ".join(f"{name} {ver}" for name, ver in stack_versions().items())
    return f"%(prog)s %(version)s ({stack})"


__version__ = get_version()
