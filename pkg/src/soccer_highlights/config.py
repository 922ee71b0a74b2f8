"""INI configuration for the pipeline.

Every analysis section lists its keys with a type and default; unknown
sections or keys are rejected so a typo never silently falls back to a
default.  Advanced filters are declared one per ``[filter:<name>]`` section:
``percentage`` is the summary share and every other key is a weight term
(``persons@+1 = 1.5``).  Without any filter section the goal preset gets the
whole summary.

Example::

    [summary]
    duration = 180

    [filter:goal]
    percentage = 60
    A.Power.VH = 2
    A.IntraInc.100 = 2
    persons@+1 = 1.5

    [filter:whistles]
    percentage = 40
    whistle = 1
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exceptions import ConfigError
from .highlights import AdvancedFilterSpec, goal_filter_preset


def _bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _opt_float(raw: str):
    return None if raw.strip().lower() in ("", "auto", "none") else float(raw)


def _opt_str(raw: str):
    return raw.strip() or None


SCHEMA = {
    "input": {
        "video": (_opt_str, None), "audio": (_opt_str, None), "width": (int, 360), "height": (int, 288),
        "fps": (Fraction, Fraction(25)), "pixfmt": (str, "yuv420p"), "sample_rate": (int, 48000),
        "logo_template": (_opt_str, None), "persons_sidecar": (_opt_str, None),
        "motion_sidecar": (_opt_str, None), "out": (_opt_str, None),
    },
    "pipeline": {"threads": (int, 1)},
    "segmentation": {
        "n_bins": (int, 64), "cut_threshold": (float, 0.25), "window": (int, 10), "rank_tol": (float, 0.1),
        "min_shot_len": (int, 12), "min_dissolve_len": (int, 6),
        # "all": every frame is in-game; "whistles": in-game spans the first to last whistle
        "phases": (str, "all"), "out_of_game": (_opt_str, None),
    },
    "keyframes": {
        "alpha": (float, 2.0), "max_keyframes": (int, 10), "min_length": (int, 2), "dup_threshold": (float, 0.3),
        "block_size": (int, 16), "search_radius": (int, 4),
    },
    "whistle": {
        "energy_threshold": (_opt_float, None), "margin_db": (float, 20.0), "percentile": (float, 10.0),
        "entropy_threshold": (float, 3.0), "peak_threshold": (float, 0.2),
    },
    "audio": {"high": (float, 0.95), "very_high": (float, 0.97), "inc_50": (float, 1.5), "inc_100": (float, 2.0)},
    "longshot": {"green_fraction": (float, 0.45), "var_threshold": (float, 25.0)},
    "zoom": {"focal_threshold": (float, 2.0), "min_frames": (int, 5), "min_vectors": (int, 6),
             "parallel_deg": (float, 20.0)},
    "skin": {"skin_threshold": (float, 0.08)},
    "replay": {
        "luma_threshold": (float, 20.0), "boundary_margin": (int, 2), "n_clusters": (int, 4),
        "match_threshold": (float, 12.0), "max_logo_seconds": (float, 2.0), "min_gap": (float, 2.0),
        "max_gap": (float, 60.0), "pairing": (_bool, True), "single_logo_seconds": (float, 10.0),
    },
    "highlights": {"motion_threshold": (float, 1.5), "very_short": (float, 2.0), "short": (float, 6.0),
                   "long": (float, 15.0)},
    "summary": {"duration": (float, 180.0)},
}

FILTER_PREFIX = "filter:"


@dataclass
class PipelineConfig:
    sections: dict = field(default_factory=dict)
    filters: list = field(default_factory=list)  # [(AdvancedFilterSpec, percentage)]

    def __getitem__(self, section) -> dict:
        return self.sections[section]

    @property
    def specs(self):
        return [spec for spec, _ in self.filters]

    @property
    def allocations(self):
        return [(spec.name, pct) for spec, pct in self.filters]

    def with_overrides(self, section, **values) -> "PipelineConfig":
        """Copy with non-``None`` values replacing keys of ``section``."""
        sections = {k: dict(v) for k, v in self.sections.items()}
        for key, value in values.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if value is not None:
                sections[section][key] = value
        return PipelineConfig(sections, list(self.filters))

    def check_paths(self, *keys):
        """Raise :class:`ConfigError` unless each named ``[input]`` path exists."""
        for key in keys:
            path = self.sections["input"].get(key)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{key} file not found: {path}")


def default_config() -> PipelineConfig:
    sections = {name: {k: d for k, (_, d) in keys.items()} for name, keys in SCHEMA.items()}
    return PipelineConfig(sections, [(goal_filter_preset(), 100.0)])


def parse_config(text: str) -> PipelineConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str  # weight terms are case sensitive (A.Power.VH)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    cfg = default_config()
    filters = []
    for name in cp.sections():
        if name.startswith(FILTER_PREFIX):
            filters.append(_parse_filter(name[len(FILTER_PREFIX):].strip(), cp[name]))
            continue
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        for key, raw in cp[name].items():
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            conv = SCHEMA[name][key][0]
            try:
                cfg.sections[name][key] = conv(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"[{name}] {key} = {raw!r}: {exc}") from exc
    if filters:
        cfg.filters = filters
    _validate(cfg)
    return cfg


def _parse_filter(name, section):
    if not name:
        raise ConfigError("filter section needs a name: [filter:<name>]")
    if "percentage" not in section:
        raise ConfigError(f"[filter:{name}] lacks a percentage")
    weights = {}
    try:
        pct = float(section["percentage"])
        for key, raw in section.items():
            if key != "percentage":
                weights[key] = float(raw)
        return AdvancedFilterSpec(name, weights), pct
    except ValueError as exc:
        raise ConfigError(f"[filter:{name}]: {exc}") from exc


def _validate(cfg: PipelineConfig):
    pcts = [p for _, p in cfg.filters]
    if any(p < 0 for p in pcts) or abs(sum(pcts) - 100.0) > 1e-9:
        raise ConfigError(f"filter percentages must be non-negative and sum to 100, got {sum(pcts)}")
    names = [s.name for s, _ in cfg.filters]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate filter names")
    if cfg["summary"]["duration"] <= 0:
        raise ConfigError("[summary] duration must be positive")
    if cfg["segmentation"]["phases"] not in ("all", "whistles"):
        raise ConfigError("[segmentation] phases must be 'all' or 'whistles'")
    h = cfg["highlights"]
    if not 0 < h["very_short"] <= h["short"] <= h["long"]:
        raise ConfigError("[highlights] duration thresholds must satisfy 0 < very_short <= short <= long")
    if cfg["pipeline"]["threads"] < 1:
        raise ConfigError("[pipeline] threads must be at least 1")


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return default_config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
