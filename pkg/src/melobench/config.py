"""Analysis configuration: one declarative object for the whole pipeline.

Serialized as commented `key = value` text with dotted keys, so the CLI, the
HTTP service, and the UI parameter panel all speak the same flat namespace.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .tracking import TrackingParams
from .twm import TwmParams


class InvalidConfigKeyError(ValueError):
    def __init__(self, key: str, valid_keys):
        self.key = key
        self.valid_keys = list(valid_keys)
        super().__init__(f"unknown config key {key!r}; valid keys: {', '.join(self.valid_keys)}")


@dataclass
class VoicingConfig:
    enabled: bool = False
    model_path: str = ""  # empty = packaged default model
    bias: float = 0.0
    smooth_frames: int = 11
    band_hz: float = 5000.0
    instability_half_window: int = 10

    def validate(self) -> None:
        if self.smooth_frames < 1 or self.smooth_frames % 2 == 0:
            raise ValueError("voicing.smooth_frames must be a positive odd integer")
        if self.band_hz <= 0:
            raise ValueError("voicing.band_hz must be positive")
        if self.instability_half_window < 1:
            raise ValueError("voicing.instability_half_window must be >= 1")


@dataclass
class AnalysisConfig:
    window_seconds: float = 0.04
    hop_seconds: float = 0.01
    window_kind: str = "hann"
    zero_pad_factor: int = 4
    sinusoidality_threshold: float = 0.8
    noise_floor_db: float = -100.0
    max_peak_freq_hz: float = 5000.0
    top_candidates: int = 5
    tracking_mode: str = "single"
    twm: TwmParams = field(default_factory=TwmParams)
    tracking: TrackingParams = field(default_factory=TrackingParams)
    voicing: VoicingConfig = field(default_factory=VoicingConfig)

    def validate(self) -> None:
        if self.window_seconds <= 0 or self.hop_seconds <= 0:
            raise ValueError("window_seconds and hop_seconds must be positive")
        if self.window_kind not in ("hann", "rectangular"):
            raise ValueError("window_kind must be 'hann' or 'rectangular'")
        if self.zero_pad_factor < 1:
            raise ValueError("zero_pad_factor must be >= 1")
        if not 0.0 <= self.sinusoidality_threshold <= 1.0:
            raise ValueError("sinusoidality_threshold must be in [0, 1]")
        if self.max_peak_freq_hz <= 0:
            raise ValueError("max_peak_freq_hz must be positive")
        if self.top_candidates < 1:
            raise ValueError("top_candidates must be >= 1")
        if self.tracking_mode not in ("single", "dual"):
            raise ValueError("tracking_mode must be 'single' or 'dual'")
        self.twm.validate()
        self.tracking.validate()
        self.voicing.validate()

    def copy(self) -> "AnalysisConfig":
        return replace(
            self,
            twm=replace(self.twm),
            tracking=replace(self.tracking),
            voicing=replace(self.voicing),
        )


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (attribute path, type); insertion order is the canonical file order
CONFIG_KEYS: dict[str, tuple[str, type]] = {
    "window_seconds": ("window_seconds", float),
    "hop_seconds": ("hop_seconds", float),
    "window_kind": ("window_kind", str),
    "zero_pad_factor": ("zero_pad_factor", int),
    "sinusoidality_threshold": ("sinusoidality_threshold", float),
    "noise_floor_db": ("noise_floor_db", float),
    "max_peak_freq_hz": ("max_peak_freq_hz", float),
    "top_candidates": ("top_candidates", int),
    "tracking_mode": ("tracking_mode", str),
    "twm.p": ("twm.p", float),
    "twm.q": ("twm.q", float),
    "twm.r": ("twm.r", float),
    "twm.rho": ("twm.rho", float),
    "twm.max_harmonic_freq": ("twm.max_harmonic_freq", float),
    "twm.f0_min": ("twm.f0_min", float),
    "twm.f0_max": ("twm.f0_max", float),
    "twm.grid_resolution_cents": ("twm.grid_resolution_cents", float),
    "twm.no_evidence_error": ("twm.no_evidence_error", float),
    "tracking.smoothness_weight": ("tracking.smoothness_weight", float),
    "tracking.max_jump_cents": ("tracking.max_jump_cents", float),
    "tracking.harmonic_tolerance_cents": ("tracking.harmonic_tolerance_cents", float),
    "tracking.allow_unpaired": ("tracking.allow_unpaired", bool),
    "tracking.unpaired_cost": ("tracking.unpaired_cost", float),
    "voicing.enabled": ("voicing.enabled", bool),
    "voicing.model_path": ("voicing.model_path", str),
    "voicing.bias": ("voicing.bias", float),
    "voicing.smooth_frames": ("voicing.smooth_frames", int),
    "voicing.band_hz": ("voicing.band_hz", float),
    "voicing.instability_half_window": ("voicing.instability_half_window", int),
}


def _get(config: AnalysisConfig, path: str):
    obj = config
    for part in path.split("."):
        obj = getattr(obj, part)
    return obj


def _set(config: AnalysisConfig, path: str, value) -> None:
    parts = path.split(".")
    obj = config
    for part in parts[:-1]:
        obj = getattr(obj, part)
    setattr(obj, parts[-1], value)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(key: str, raw) -> object:
    _, typ = CONFIG_KEYS[key]
    if typ is bool:
        if isinstance(raw, bool):
            return raw
        return _parse_bool(str(raw))
    if typ is int:
        value = int(str(raw).strip()) if not isinstance(raw, (int, float)) else int(raw)
        return value
    if typ is float:
        return float(raw)
    return str(raw).strip()


def config_to_flat_dict(config: AnalysisConfig) -> dict:
    return {key: _get(config, path) for key, (path, _) in CONFIG_KEYS.items()}


def apply_overrides(config: AnalysisConfig, overrides: dict) -> AnalysisConfig:
    """New config with the given flat-key overrides applied and validated."""
    out = config.copy()
    for key, raw in overrides.items():
        if key not in CONFIG_KEYS:
            raise InvalidConfigKeyError(key, CONFIG_KEYS)
        _set(out, CONFIG_KEYS[key][0], _coerce(key, raw))
    out.validate()
    return out


def render_config(config: AnalysisConfig) -> str:
    lines = ["# melody analysis configuration"]
    lines += [
        f"{key} = {_format_value(_get(config, path))}" for key, (path, _) in CONFIG_KEYS.items()
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: AnalysisConfig | None = None) -> AnalysisConfig:
    """Parse `key = value` lines on top of `base` (defaults when omitted)."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        overrides[key.strip()] = raw.strip()
    return apply_overrides(base if base is not None else AnalysisConfig(), overrides)


def load_config(path) -> AnalysisConfig:
    from pathlib import Path

    return parse_config(Path(path).read_text())


def save_config(config: AnalysisConfig, path) -> None:
    from pathlib import Path

    Path(path).write_text(render_config(config))
