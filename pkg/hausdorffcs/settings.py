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

import configparser
import os
from dataclasses import dataclass
from typing import Optional

from hausdorffcs import log
from hausdorffcs.quicknumbers import try_float, try_int
from hausdorffcs.resource import get_resource

EXPECTED_OPTIONS = (
    "closed_form_tol",
    "generic_tol",
    "quad_epsrel",
    "contour_abscissa",
    "contour_half_height",
    "contour_nodes",
    "contour_tol",
    "series_tol",
    "grid_size",
    "fit_points",
    "workers",
)

FALLBACK_VALUES = {
    "closed_form_tol": "1e-8",
    "generic_tol": "1e-6",
    "quad_epsrel": "1e-9",
    "contour_abscissa": "1.0",
    "contour_half_height": "400",
    "contour_nodes": "64",
    "contour_tol": "1e-10",
    "series_tol": "1e-14",
    "grid_size": "1000",
    "fit_points": "400",
    "workers": "1",
}


def default_config() -> configparser.ConfigParser:
    """
    Return the default settings for hausdorffcs.

    Values come from the packaged defaults.ini; if that cannot be read the built-in fallbacks are used.
    """
    config = configparser.ConfigParser()
    try:
        config.read(get_resource("defaults.ini"))
    except (FileNotFoundError, RuntimeError) as e:
        log.warning(f"Packaged defaults unavailable, using built-in values: {e}")

    for option, value in FALLBACK_VALUES.items():
        if not config.has_option("DEFAULT", option):
            config.set("DEFAULT", option, value)

    if not config.has_section("USER"):
        config.add_section("USER")
    for option in EXPECTED_OPTIONS:
        config.set("USER", option, config.get("DEFAULT", option))

    return config


def load_config_file(config_file: Optional[str], section: str = "USER", expected=EXPECTED_OPTIONS):
    """
    Load the numerical settings from an INI file, otherwise the packaged defaults.

    A user file is only used when it is readable, has `section` and sets every tolerance and size in
    `expected`. A partial file is refused as a whole.
    """
    if not config_file:
        return default_config()

    # the file has to exist and actually parse
    config = configparser.ConfigParser()
    if not (os.path.isfile(config_file) and config.read(config_file, encoding="utf-8")):
        log.warning(f"Config file [{config_file}] could not be read, falling back to defaults.")
        return default_config()

    # every option in [USER] (or whichever section was asked for)
    if section not in config.sections():
        log.warning(f"Config file [{config_file}] has no [{section}] section, falling back to defaults.")
        return default_config()
    missing = [option for option in expected if not config.has_option(section, option)]
    if missing:
        log.warning(f"Config file [{config_file}] lacks {', '.join(missing)}, falling back to defaults.")
        return default_config()

    log.debug(f"Settings read from [{config_file}]")
    return config


@dataclass(frozen=True)
class Settings:
    closed_form_tol: float = 1e-8
    generic_tol: float = 1e-6
    quad_epsrel: float = 1e-9
    contour_abscissa: float = 1.0
    contour_half_height: float = 400.0
    contour_nodes: int = 64
    contour_tol: float = 1e-10
    series_tol: float = 1e-14
    grid_size: int = 1000
    fit_points: int = 400
    workers: int = 1

    @classmethod
    def from_config(cls, config: configparser.ConfigParser, section: str = "USER") -> "Settings":
        defaults = cls()
        values = {}
        for option in EXPECTED_OPTIONS:
            raw = config.get(section, option, fallback=None)
            fallback = getattr(defaults, option)
            # counts must be whole numbers; tolerances may be written as fractions like 1/1000
            parsed = try_int(raw) if isinstance(fallback, int) else try_float(raw)
            if not isinstance(parsed, (int, float)) or isinstance(parsed, bool):
                log.warning(f"Ignoring unparsable value {option}={raw!r}")
                parsed = fallback
            values[option] = parsed
        return cls(**values)


def load_settings(config_file: Optional[str] = None) -> Settings:
    return Settings.from_config(load_config_file(config_file))
