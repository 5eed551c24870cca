"""Versioned cut-off table used for every pass/fail verdict."""

import configparser
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigInvalid

THRESHOLDS_VERSION = "1"


@dataclass(frozen=True)
class Thresholds:
    version: str = THRESHOLDS_VERSION
    # sampling adequacy
    kmo_min: float = 0.5
    bartlett_alpha: float = 0.05
    # dimensionality
    cfi_min: float = 0.95
    tli_min: float = 0.95
    rmsea_max: float = 0.06
    srmr_max: float = 0.08
    # reliability
    reliability_min: float = 0.7
    avg_loading_min: float = 0.7
    loading_dev_max: float = 0.2
    # validity
    ave_min: float = 0.5
    cr_min: float = 0.7
    htmt_strict: float = 0.85
    htmt_liberal: float = 0.9
    criterion_alpha: float = 0.05

    def to_dict(self):
        return asdict(self)

    def override(self, **values):
        known = {f.name: f.type for f in fields(self)}
        clean = {}
        for key, value in values.items():
            if key not in known:
                raise ConfigInvalid(f"unknown threshold {key!r}")
            try:
                clean[key] = str(value) if key == "version" else float(value)
            except ValueError as exc:
                raise ConfigInvalid(f"threshold {key!r} is not a number") from exc
        return replace(self, **clean)


DEFAULT_THRESHOLDS = Thresholds()


def load_thresholds(path):
    """Read overrides from the ``[thresholds]`` section of an INI file."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigInvalid(f"cannot read thresholds from {path}: {exc}") from exc
    if not cp.has_section("thresholds"):
        raise ConfigInvalid(f"{path} has no [thresholds] section")
    return DEFAULT_THRESHOLDS.override(**dict(cp["thresholds"]))
