"""Experiment configuration: plain key = value text files, strictly keyed.

The schema is exactly the keys below; unknown keys are rejected with the
offending line number.  norm_pairs is a comma-separated list of qt:rx
pairs, or "auto" for the scattering pair of the configured power.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError, ParseError

SCENARIOS = (
    "scale_sweep",
    "two_bump",
    "monotonicity",
    "dispersive_decay",
    "local_bound",
    "scattering_extraction",
    "polynomial_sweep",
)

_DEFAULTS = {
    "p": 3.0,
    "r_max": 128.0,
    "n": 4096,
    "dt": 1e-3,
    "t_end": 8.0,
    "c1": 1.0,
    "c2": 0.0,
    "lambda": 1.0,
    "epsilon": 1e-3,
    "delta": 0.1,
    "norm_pairs": "auto",
    "seed": 0,
}

_KEYS = ("scenario",) + tuple(_DEFAULTS)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated scenario parameters; recipe is deterministic given these."""

    scenario: str
    p: float = 3.0
    r_max: float = 128.0
    n: int = 4096
    dt: float = 1e-3
    t_end: float = 8.0
    c1: float = 1.0
    c2: float = 0.0
    lam: float = 1.0
    epsilon: float = 1e-3
    delta: float = 0.1
    norm_pairs: str = "auto"
    seed: int = 0
    explicit: frozenset = field(default_factory=frozenset, compare=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(
                f"unknown scenario {self.scenario!r}; valid: {', '.join(SCENARIOS)}"
            )
        if self.p <= 1.0:
            raise ConfigurationError(
                f"p = {self.p:g} outside the admissible range (need p > 1)"
            )
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.epsilon <= 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.lam <= 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")
        parse_norm_pairs(self.norm_pairs, self.p)  # validate eagerly

    def canonical_text(self) -> str:
        rows = [f"scenario = {self.scenario}"]
        for key in _DEFAULTS:
            rows.append(f"{key} = {getattr(self, _attr(key))!r}")
        return "\n".join(rows) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _attr(key: str) -> str:
    return "lam" if key == "lambda" else key


def parse_norm_pairs(text: str, p: float) -> list[tuple[float, float]]:
    """\"auto\" or \"8:4,4.2:3.5\" -> [(q_t, r_x), ...]."""
    if text.strip() == "auto":
        from .evolution import scattering_pair

        return [scattering_pair(p)]
    pairs = []
    for chunk in text.split(","):
        bits = chunk.strip().split(":")
        if len(bits) != 2:
            raise ConfigurationError(f"bad norm pair {chunk!r}; expected qt:rx")
        try:
            qt, rx = float(bits[0]), float(bits[1])
        except ValueError as exc:
            raise ConfigurationError(f"bad norm pair {chunk!r}: {exc}") from exc
        if qt < 1 or rx < 1:
            raise ConfigurationError(f"norm pair exponents must be >= 1: {chunk!r}")
        pairs.append((qt, rx))
    return pairs


_CASTS = {
    "scenario": str,
    "p": float,
    "r_max": float,
    "n": int,
    "dt": float,
    "t_end": float,
    "c1": float,
    "c2": float,
    "lambda": float,
    "epsilon": float,
    "delta": float,
    "norm_pairs": str,
    "seed": int,
}


def parse_config(path) -> ExperimentConfig:
    """Read a key = value config file; defaults fill the absent keys."""
    values: dict = {}
    explicit = set()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected key = value, got {line!r}", lineno)
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _KEYS:
                raise ParseError(f"unknown key {key!r}", lineno)
            if key in explicit:
                raise ParseError(f"duplicate key {key!r}", lineno)
            cast = _CASTS[key]
            try:
                parsed = cast(val)
            except ValueError:
                raise ParseError(
                    f"key {key!r} expects {cast.__name__}, got {val!r}", lineno
                ) from None
            values[_attr(key)] = parsed
            explicit.add(key)
    if "scenario" not in values:
        raise ParseError("missing required key 'scenario'")
    try:
        return ExperimentConfig(explicit=frozenset(explicit), **values)
    except ConfigurationError:
        raise
