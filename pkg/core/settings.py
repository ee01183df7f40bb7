"""
Settings for PyShatter
Size limits for the exhaustive searches and the per-run configuration record
"""

import os
from dataclasses import dataclass, field, asdict
from typing import Dict, Optional

SHATTER_LIMIT_ENV = "PYSHATTER_SHATTER_LIMIT"
ABSTRACT_LIMIT_ENV = "PYSHATTER_ABSTRACT_LIMIT"
AFFINE_LIMIT_ENV = "PYSHATTER_AFFINE_LIMIT"


def _positive_int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


@dataclass
class Settings:
    """Limits for the exhaustive searches"""
    shatter_size_limit: int = 16
    abstract_size_limit: int = 16
    affine_element_limit: int = 12

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")

    @classmethod
    def from_env(cls) -> 'Settings':
        """Build settings from defaults overridden by environment variables"""
        defaults = cls()
        return cls(
            shatter_size_limit=_positive_int_from_env(SHATTER_LIMIT_ENV, defaults.shatter_size_limit),
            abstract_size_limit=_positive_int_from_env(ABSTRACT_LIMIT_ENV, defaults.abstract_size_limit),
            affine_element_limit=_positive_int_from_env(AFFINE_LIMIT_ENV, defaults.affine_element_limit),
        )

    def to_dict(self) -> dict:
        return asdict(self)


def get_settings() -> Settings:
    """Current settings; the environment is read on every call"""
    return Settings.from_env()


@dataclass
class RunConfig:
    """Everything one CLI invocation was run with; echoed into its output"""
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    k: Optional[int] = None
    seed: int = 0
    samples: int = 0
    workers: int = 0
    height: int = 64
    flags: Dict[str, object] = field(default_factory=dict)
    settings: Settings = field(default_factory=get_settings)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"Seed must fit in 64 bits, got {self.seed}")
        if self.samples < 0:
            raise ValueError(f"Sample count must be non-negative, got {self.samples}")
        if self.height <= 0:
            raise ValueError(f"Coordinate height bound must be positive, got {self.height}")

    def to_dict(self) -> dict:
        return {
            'command': self.command,
            'input_path': self.input_path,
            'output_path': self.output_path,
            'k': self.k,
            'seed': self.seed,
            'samples': self.samples,
            'workers': self.workers,
            'height': self.height,
            'flags': dict(sorted(self.flags.items())),
            'settings': self.settings.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'RunConfig':
        data = dict(data)
        settings = Settings(**data.pop('settings', {})) if 'settings' in data else get_settings()
        return cls(settings=settings, **data)
