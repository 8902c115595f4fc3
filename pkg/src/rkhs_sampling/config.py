"""Run configuration for the command-line tool."""

import json
from dataclasses import dataclass, field

from .kernels import kernel_from_dict

DEFAULT_SEED = 0xC0FFEE

# Engineering policy, not derived from theory: how close numerical results
# must come to the exact identities before a run reports them as holding.
DEFAULT_TOLERANCES = {
    "interpolation": 1e-8,
    "biorthogonality": 1e-8,
    "stability_slack": 1e-10,
    "stable_margin": 1e3,
}

_CONFIG_KEYS = {"kernel", "tolerances", "seed"}


@dataclass
class RunConfig:
    kernel: object = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = DEFAULT_SEED

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        unknown = sorted(set(data) - _CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls()
        if data.get("kernel") is not None:
            cfg.kernel = kernel_from_dict(data["kernel"])
        for name, value in (data.get("tolerances") or {}).items():
            cfg.set_tolerance(name, value)
        if "seed" in data:
            cfg.seed = check_seed(data["seed"])
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def set_tolerance(self, name, value):
        if name not in DEFAULT_TOLERANCES:
            raise ValueError(
                f"unknown tolerance {name!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}"
            )
        value = float(value)
        if not value > 0:
            raise ValueError(f"tolerance {name} must be positive")
        self.tolerances[name] = value


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed
