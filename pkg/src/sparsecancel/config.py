"""
Scenario configuration.

A scenario is a TOML document whose top-level keys are exactly the field
names of :class:`ScenarioConfig`; solvers are given as an array of tables::

    scenario = "IMD"
    p = 2
    q = -1
    L1 = 3
    L2 = 3
    P = 520
    distortion_dbm = -85.0
    inr_db = 0.0
    sweep_axis = "P_s"
    sweep_values = [-110, -105, -100, -95, -90, -85, -80]
    trials = 100
    seed = 2024

    [[solvers]]
    name = "sparse"
    J = 9

Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .dictionary import exact_count, prior_count
from .distortion import HD, IMD, DistortionSpec
from .errors import ConfigError, SparseCancelError
from .signal import SIGNAL_KINDS

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SOLVER_NAMES = ("sparse", "full", "prior", "hammerstein")
CHANNEL_POLICIES = ("per-trial", "fixed")
SWEEP_AXES = ("P_s", "J")


@dataclass(frozen=True)
class SolverConfig:
    """A canceller to run.

    ``sparse``
        OMP on the exact dictionary with ``J`` selected atoms.
    ``full``
        least squares on the whole exact dictionary (``J`` is implied).
    ``prior``
        least squares on the per-source-lag-pair dictionary (IMD only).
    ``hammerstein``
        least squares on ``J`` delayed copies of the memoryless distortion.
    """

    name: str
    J: Optional[int] = None


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    solvers: tuple[SolverConfig, ...]
    sweep_values: tuple[float, ...]
    Q: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    L: Optional[int] = None
    L1: Optional[int] = None
    L2: Optional[int] = None
    decay: float = 0.6
    channel_policy: str = "per-trial"
    model_L: Optional[int] = None
    model_L1: Optional[int] = None
    model_L2: Optional[int] = None
    P: int = 520
    distortion_dbm: float = -85.0
    inr_db: float = 0.0
    signal_kind: str = "gaussian"
    sweep_axis: str = "P_s"
    P_s_dbm: float = -95.0
    paired_sweep: bool = True
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        try:
            self._validate()
        except SparseCancelError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def _validate(self):
        if self.scenario not in (HD, IMD):
            raise ConfigError(f"scenario must be 'HD' or 'IMD', got {self.scenario!r}")
        if self.scenario == HD:
            _require(self, "Q", "L")
            _forbid(self, "HD", "p", "q", "L1", "L2", "model_L1", "model_L2")
        else:
            _require(self, "p", "q", "L1", "L2")
            _forbid(self, "IMD", "Q", "L", "model_L")
        spec = self.spec  # validates the exponents
        true_lengths = self.true_lengths
        if any(L < 1 for L in true_lengths + self.model_lengths):
            raise ConfigError("channel and model lengths must be positive")
        if not 0.0 < self.decay <= 1.0:
            raise ConfigError(f"decay must lie in (0, 1], got {self.decay}")
        if self.channel_policy not in CHANNEL_POLICIES:
            raise ConfigError(f"channel_policy must be one of {CHANNEL_POLICIES}")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ConfigError(f"signal_kind must be one of {SIGNAL_KINDS}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.P < 1:
            raise ConfigError("P must be positive")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"sweep_axis must be one of {SWEEP_AXES}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must not be empty")
        if self.sweep_axis == "J" and any(int(v) != v or v < 1 for v in self.sweep_values):
            raise ConfigError("J sweep values must be positive integers")
        if not self.solvers:
            raise ConfigError("at least one solver is required")
        names = [s.name for s in self.solvers]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate solver names: {names}")
        n_exact = exact_count(spec, self.model_lengths)
        for point in range(len(self.sweep_values)):
            for s in self.solvers:
                J = self.solver_J(s, point)
                if J > self.P:
                    raise ConfigError(f"solver {s.name} needs J={J} > P={self.P}")
                if s.name == "sparse" and J > n_exact:
                    raise ConfigError(f"sparse J={J} exceeds the {n_exact} exact terms")

    @property
    def spec(self) -> DistortionSpec:
        if self.scenario == HD:
            return DistortionSpec.hd(self.Q)
        return DistortionSpec.imd(self.p, self.q)

    @property
    def true_lengths(self) -> tuple[int, ...]:
        if self.scenario == HD:
            return (self.L,)
        return (self.L1, self.L2)

    @property
    def model_lengths(self) -> tuple[int, ...]:
        if self.scenario == HD:
            return (self.model_L if self.model_L is not None else self.L,)
        return (
            self.model_L1 if self.model_L1 is not None else self.L1,
            self.model_L2 if self.model_L2 is not None else self.L2,
        )

    def sweep_point(self, index: int) -> tuple[float, Optional[int]]:
        """``(P_s_dbm, J_override)`` at sweep position ``index``."""
        value = self.sweep_values[index]
        if self.sweep_axis == "P_s":
            return float(value), None
        return float(self.P_s_dbm), int(value)

    def solver_J(self, solver: SolverConfig, index: int) -> int:
        """Tap count used by ``solver`` at sweep position ``index``.

        On a J sweep the swept value replaces the configured ``J`` of the
        ``sparse`` and ``hammerstein`` solvers; ``full`` and ``prior`` have a
        structurally fixed size.
        """
        _, J_override = self.sweep_point(index)
        spec = self.spec
        if solver.name == "full":
            fixed = exact_count(spec, self.model_lengths)
        elif solver.name == "prior":
            fixed = prior_count(spec, self.model_lengths)
        else:
            J = J_override if J_override is not None else solver.J
            if J is None or J < 1:
                raise ConfigError(f"solver {solver.name} needs a positive J")
            return int(J)
        if solver.J is not None and solver.J != fixed:
            raise ConfigError(f"solver {solver.name} has J={fixed}, configured {solver.J}")
        return fixed

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration key(s): {unknown}")
        data = dict(data)
        solvers = []
        for entry in data.pop("solvers", ()):
            if not isinstance(entry, dict):
                raise ConfigError("each solver must be a table with 'name' and optional 'J'")
            extra = sorted(set(entry) - {"name", "J"})
            if extra:
                raise ConfigError(f"unknown solver key(s): {extra}")
            if entry.get("name") not in SOLVER_NAMES:
                raise ConfigError(f"solver name must be one of {SOLVER_NAMES}, got {entry.get('name')!r}")
            solvers.append(SolverConfig(entry["name"], entry.get("J")))
        data["solvers"] = tuple(solvers)
        data["sweep_values"] = tuple(data.get("sweep_values", ()))
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _require(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"{cfg.scenario} scenario requires {missing}")


def _forbid(cfg, scenario, *names):
    given = [n for n in names if getattr(cfg, n) is not None]
    if given:
        raise ConfigError(f"keys {given} do not apply to the {scenario} scenario")


def load_config(path) -> ScenarioConfig:
    with open(Path(path), "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return ScenarioConfig.from_dict(data)
