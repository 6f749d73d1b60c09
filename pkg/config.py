from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from pathlib import Path
from typing import Any
from typing import Optional

import numpy as np

from constants import CONTINUITY_DELTAS
from constants import DEFAULT_ALPHA
from constants import DEFAULT_BETA
from constants import DEFAULT_EPSILON
from constants import DEFAULT_GAMMA
from constants import DEFAULT_GRID
from constants import DEFAULT_LAMBDA
from constants import DEFAULT_OMEGA
from constants import DEFAULT_REL_TOL
from constants import DEFAULT_S_VALUES
from constants import DEFAULT_SHAPE_VALUES
from constants import DILATION_ACTIONS
from constants import DILATION_PROBES
from constants import EVOLUTION_TIMES
from constants import MAX_SCAN_POINTS
from constants import TRANSLATION_ACTIONS
from constants import TRANSLATION_PROBES

logger = logging.getLogger(__name__)


class Family(str, Enum):
    translation = "translation"
    dilation = "dilation"


class Convention(str, Enum):
    paper = "paper"
    kernel = "kernel"
    auto = "auto"


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


def parse_grid(text: str) -> tuple[float, float, int]:
    """Parses "start:stop:num" into a grid triple."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:num, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ValueError(f"invalid grid {text!r}: {e}") from e


@dataclass
class RunConfig:
    """Holds processed and validated run settings."""

    family: Family = Family.translation
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    lam: float = DEFAULT_LAMBDA
    epsilon: float = DEFAULT_EPSILON
    omega: float = DEFAULT_OMEGA
    gamma: float = DEFAULT_GAMMA
    s_values: list[float] = field(
        default_factory=lambda: list(DEFAULT_S_VALUES)
    )
    shape_values: list[float] = field(
        default_factory=lambda: list(DEFAULT_SHAPE_VALUES)
    )
    grid: tuple[float, float, int] = DEFAULT_GRID
    rel_tol: float = DEFAULT_REL_TOL
    convention: Convention = Convention.auto
    output_format: OutputFormat = OutputFormat.json
    out: Optional[Path] = None
    jobs: int = 1
    probes: Optional[list[float]] = None
    actions: Optional[list[float]] = None
    times: list[float] = field(default_factory=lambda: list(EVOLUTION_TIMES))
    deltas: list[float] = field(default_factory=lambda: list(CONTINUITY_DELTAS))

    @property
    def shape_param(self) -> float:
        if self.family is Family.translation:
            return self.alpha
        return self.beta

    def probe_values(self) -> list[float]:
        if self.probes is not None:
            return list(self.probes)
        if self.family is Family.translation:
            return list(TRANSLATION_PROBES)
        return list(DILATION_PROBES)

    def action_values(self) -> list[float]:
        if self.actions is not None:
            return list(self.actions)
        if self.family is Family.translation:
            return list(TRANSLATION_ACTIONS)
        return list(DILATION_ACTIONS)

    def grid_values(self) -> np.ndarray:
        start, stop, num = self.grid
        return np.linspace(start, stop, num)

    def validate(self) -> RunConfig:
        """Raises ValueError naming the first violated invariant."""
        checks = [
            (self.alpha > 0, f"alpha must be > 0, got {self.alpha}"),
            (self.beta > 0, f"beta must be > 0, got {self.beta}"),
            (0 < self.lam < 1, f"lambda must lie in (0, 1), got {self.lam}"),
            (self.epsilon > 0, f"epsilon must be > 0, got {self.epsilon}"),
            (self.omega > 0, f"omega must be > 0, got {self.omega}"),
            (len(self.s_values) > 0, "s values must be non-empty"),
            (all(s > 0 for s in self.s_values), "s values must be > 0"),
            (len(self.shape_values) > 0, "shape values must be non-empty"),
            (
                all(a > 0 for a in self.shape_values),
                "shape values must be > 0",
            ),
            (self.rel_tol > 0, f"tolerance must be > 0, got {self.rel_tol}"),
            (self.jobs >= 1, f"jobs must be >= 1, got {self.jobs}"),
            (len(self.times) > 0, "times must be non-empty"),
            (len(self.deltas) > 0, "deltas must be non-empty"),
            (all(d > 0 for d in self.deltas), "deltas must be > 0"),
            (
                all(a > b for a, b in zip(self.deltas, self.deltas[1:])),
                "deltas must be strictly decreasing",
            ),
            (len(self.probe_values()) > 0, "probes must be non-empty"),
            (len(self.action_values()) > 0, "actions must be non-empty"),
            (
                all(j > 0 for j in self.action_values()),
                "actions must be > 0",
            ),
        ]
        start, stop, num = self.grid
        checks += [
            (num >= 1, f"grid needs at least one point, got {num}"),
            (
                num <= MAX_SCAN_POINTS,
                f"grid size {num} exceeds {MAX_SCAN_POINTS}",
            ),
            (start <= stop, f"grid start {start} exceeds stop {stop}"),
            (
                len(self.s_values) * len(self.shape_values) <= MAX_SCAN_POINTS,
                f"scan grid exceeds {MAX_SCAN_POINTS} points",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)
        return self

    @classmethod
    def from_file(cls, path: Path) -> dict[str, Any]:
        """Reads config overrides from a JSON object file."""
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ValueError(f"config {path} must hold a JSON object")

        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        if "grid" in data and isinstance(data["grid"], str):
            data["grid"] = parse_grid(data["grid"])
        return data

    @classmethod
    def from_args(
        cls, config_path: Optional[Path] = None, **flags: Any
    ) -> RunConfig:
        """Merges defaults, an optional JSON file and explicit flags.

        Flags left at None do not override the file.
        """
        values: dict[str, Any] = {}
        if config_path is not None:
            values.update(cls.from_file(config_path))
        values.update({k: v for k, v in flags.items() if v is not None})

        if isinstance(values.get("grid"), str):
            values["grid"] = parse_grid(values["grid"])
        if "grid" in values:
            start, stop, num = values["grid"]
            values["grid"] = (float(start), float(stop), int(num))
        for key, enum in (
            ("family", Family),
            ("convention", Convention),
            ("output_format", OutputFormat),
        ):
            if key in values:
                try:
                    values[key] = enum(values[key])
                except ValueError as e:
                    raise ValueError(f"invalid {key}: {values[key]!r}") from e
        if values.get("out") is not None:
            values["out"] = Path(values["out"])
        for key in ("s_values", "shape_values", "times", "deltas"):
            if key in values:
                values[key] = [float(v) for v in values[key]]

        config = cls(**values).validate()
        logger.debug(f"run config: {config}")
        return config
