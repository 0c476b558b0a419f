"""
Cascade Motif Toolkit - Pipeline Configuration
Run parameters, config-file layering and the run fingerprint.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

from cascade_model import DEFAULT_MIN_CASCADE_SIZE, DEFAULT_WINDOW_SIZE
from motif_engine import MAX_ORDER
from phase_comparison import DEFAULT_ALPHA
from phase_detector import DEFAULT_QUIESCENCE, DEFAULT_RESOLUTION, DEFAULT_SMOOTH_WIDTH, MIN_RESOLUTION

load_dotenv()

DEFAULT_BANDWIDTH_GRID = (1.0, 5.0, 15.0, 60.0, 300.0, 900.0, 3600.0, 14400.0)

GOOGLE_SHEET_ID = os.getenv('GOOGLE_SHEET_ID')
GOOGLE_CREDENTIALS_FILE = os.getenv('GOOGLE_CREDENTIALS_FILE', 'google_credentials.json')


class ConfigError(ValueError):
    """Invalid or unknown configuration value"""


@dataclass(frozen=True)
class PipelineConfig:
    window_size: int = DEFAULT_WINDOW_SIZE
    k: int = 5
    min_cascade: int = DEFAULT_MIN_CASCADE_SIZE
    alpha: float = DEFAULT_ALPHA
    restarts: int = 1
    bandwidth: Optional[float] = None
    bandwidth_grid: Tuple[float, ...] = DEFAULT_BANDWIDTH_GRID
    quiescence: float = DEFAULT_QUIESCENCE
    smooth_width: int = DEFAULT_SMOOTH_WIDTH
    grid_resolution: int = DEFAULT_RESOLUTION
    seed: int = 0
    strict_pseudocode: bool = False
    absent_as_zero: bool = True
    all_windows: bool = False
    workers: int = 1
    depth_probabilities: Optional[Tuple[float, ...]] = None
    steep_window: Optional[int] = None
    inhib_window: Optional[int] = None
    events_path: Optional[str] = None
    social_path: Optional[str] = None
    output_dir: str = field(default="report")

    def __post_init__(self):
        self.validate()

    def validate(self):
        def fail(name, message):
            raise ConfigError(f"{name}: {message}")

        if not 3 <= self.k <= MAX_ORDER:
            fail("k", f"motif size must be in [3, {MAX_ORDER}], got {self.k}")
        if self.window_size < self.k:
            fail("window_size", f"window size {self.window_size} is smaller than motif size {self.k}")
        if self.min_cascade < self.window_size:
            fail("min_cascade", f"minimum cascade size {self.min_cascade} is below window size {self.window_size}")
        if not 0 < self.alpha < 1:
            fail("alpha", f"must be in (0, 1), got {self.alpha}")
        if self.restarts < 1:
            fail("restarts", f"must be at least 1, got {self.restarts}")
        if not 0 < self.quiescence < 1:
            fail("quiescence", f"must be in (0, 1), got {self.quiescence}")
        if self.smooth_width < 1 or self.smooth_width % 2 == 0:
            fail("smooth_width", f"must be a positive odd integer, got {self.smooth_width}")
        if self.grid_resolution < MIN_RESOLUTION:
            fail("grid_resolution", f"must be at least {MIN_RESOLUTION}, got {self.grid_resolution}")
        if self.bandwidth is not None and not self.bandwidth > 0:
            fail("bandwidth", f"must be positive, got {self.bandwidth}")
        if not self.bandwidth_grid or any(not theta > 0 for theta in self.bandwidth_grid):
            fail("bandwidth_grid", f"needs positive values, got {list(self.bandwidth_grid)}")
        if self.workers < 1:
            fail("workers", f"must be at least 1, got {self.workers}")
        if self.depth_probabilities is not None:
            if len(self.depth_probabilities) != self.k:
                fail("depth_probabilities", f"need {self.k} values, got {len(self.depth_probabilities)}")
            if any(not 0 < p <= 1 for p in self.depth_probabilities):
                fail("depth_probabilities", "values must lie in (0, 1]")
        for name in ("steep_window", "inhib_window"):
            value = getattr(self, name)
            if value is not None and value < 0:
                fail(name, f"must be non-negative, got {value}")
        if (self.steep_window is None) != (self.inhib_window is None):
            fail("steep_window", "steep and inhibition overrides must be given together")
        if self.steep_window is not None and self.steep_window > self.inhib_window:
            fail("steep_window", "steep window comes after inhibition window")

    @property
    def overrides_phases(self) -> bool:
        return self.steep_window is not None

    def to_dict(self) -> Dict:
        data = asdict(self)
        for name in ("bandwidth_grid", "depth_probabilities"):
            if data[name] is not None:
                data[name] = list(data[name])
        return data


def _coerce(name: str, raw: str):
    """Parse a config-file string into the field's type"""
    text = raw.strip()
    if name in ("bandwidth_grid", "depth_probabilities"):
        try:
            return tuple(float(x) for x in text.replace(",", " ").split())
        except ValueError:
            raise ConfigError(f"{name}: expected numbers, got '{raw}'") from None
    if name in ("strict_pseudocode", "absent_as_zero", "all_windows"):
        lowered = text.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got '{raw}'")
    if name in ("events_path", "social_path", "output_dir"):
        return text
    kind = float if name in ("alpha", "bandwidth", "quiescence") else int
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{name}: expected {kind.__name__}, got '{raw}'") from None


def read_config_file(path) -> Dict:
    """
    Read key=value settings; keys may be spelled `window-size` or `window_size`

    Returns:
        Field name to typed value
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")

    known = {f.name for f in fields(PipelineConfig)}
    settings = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        if name not in known:
            raise ConfigError(f"Unknown config key '{key}' in {path}")
        if raw is None or raw.strip() == "":
            continue
        settings[name] = _coerce(name, raw)
    return settings


def load_config(path=None, **overrides) -> PipelineConfig:
    """
    Defaults, then the config file, then explicit overrides (CLI flags).
    Overrides equal to None are ignored.
    """
    settings = read_config_file(path) if path else {}
    settings.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PipelineConfig(**settings)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def config_hash(config: PipelineConfig) -> str:
    """SHA-256 over the canonical JSON of the config"""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
