"""
Experiment Configuration

An experiment is one system configuration, one protocol and one schedule
source. Its file form is flat ``key = value`` text, one key per line, sorted,
with ``#`` comments; the SHA-256 of the canonical text is the config hash
embedded in reports.
"""

import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .automata import get_protocol
from .automata.base import ProtocolFamily
from .chains.builders import DOUBLEPRIME, PRIME, build_chain_alpha, build_chain_beta
from .core.config import SystemConfig
from .exceptions import ConfigValidationError, QuorumLabError
from .settings import get_settings
from .simnet.schedule import Schedule, parse_workload, random_schedule, random_workload
from .simnet.trace_io import TraceLoader

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one run."""

    model_config = ConfigDict(extra="forbid")

    version: int = CONFIG_VERSION
    servers: int = 5
    writers: int = 2
    readers: int = 2
    tolerance: int = 1
    protocol: str = "w2r1"
    seed: Optional[int] = None
    schedule_mode: Literal["random", "file", "chain"] = "random"

    workload: Optional[str] = None
    ops: int = Field(default=10, ge=0)
    write_ratio: float = Field(default=0.5, ge=0.0, le=1.0)
    spacing: int = Field(default=3, ge=0)

    max_delay: int = Field(default_factory=lambda: get_settings().max_delay, ge=1)
    skip_probability: float = Field(default=0.1, ge=0.0, le=1.0)
    crashes: Optional[int] = Field(default=None, ge=0)

    schedule_file: Optional[Path] = None
    chain_family: Literal["alpha", "beta-prime", "beta-doubleprime"] = "alpha"
    chain_index: int = Field(default=0, ge=0)
    chain_critical: int = Field(default=1, ge=1)
    chain_skip: bool = False

    out_dir: Optional[Path] = None

    @field_validator("version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {v}")
        return v

    @field_validator("protocol")
    @classmethod
    def _known_protocol(cls, v: str) -> str:
        get_protocol(v)
        return v

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        self.system_config()
        if self.schedule_mode == "random" and self.seed is None:
            raise ValueError("seed is mandatory in random schedule mode")
        if self.schedule_mode == "file" and self.schedule_file is None:
            raise ValueError("schedule_file is required in file schedule mode")
        if self.schedule_mode == "chain":
            if self.writers != 2 or self.readers != 2:
                raise ValueError("chain mode runs with exactly 2 writers and 2 readers")
            if self.servers < 3:
                raise ValueError(f"chain mode needs at least 3 servers, got {self.servers}")
            if self.chain_index > self.servers:
                raise ValueError(f"chain_index {self.chain_index} exceeds S={self.servers}")
        return self

    def system_config(self) -> SystemConfig:
        return SystemConfig(S=self.servers, W=self.writers, R=self.readers, t=self.tolerance)

    def protocol_family(self) -> ProtocolFamily:
        return get_protocol(self.protocol)

    def build_schedule(self) -> Schedule:
        """
        Build the schedule this experiment runs.

        Raises:
            ConfigValidationError: if the workload text or chain parameters are
                invalid, or a schedule file was recorded for another system
            TraceFormatError: if the schedule file cannot be read
        """
        cfg = self.system_config()
        if self.schedule_mode == "file":
            return self._file_schedule(cfg)

        if self.schedule_mode == "chain":
            return self._chain_schedule()

        if self.workload:
            workload = parse_workload(self.workload, cfg)
        else:
            workload = random_workload(cfg, self.seed, self.ops, self.write_ratio, self.spacing)
        return random_schedule(
            cfg,
            workload,
            self.seed,
            max_delay=self.max_delay,
            skip_probability=self.skip_probability,
            max_crashes=self.crashes,
            round_trips=max(self.protocol_family().write_round_trips, self.protocol_family().read_round_trips),
        )

    def _file_schedule(self, cfg: SystemConfig) -> Schedule:
        loader = TraceLoader(self.schedule_file).load()
        meta = loader.meta
        if meta.schedule is None:
            raise ConfigValidationError(f"{self.schedule_file} carries no schedule")
        recorded = loader.config()
        if recorded is not None and recorded != cfg:
            raise ConfigValidationError(
                f"{self.schedule_file} was recorded with S={recorded.S} W={recorded.W} R={recorded.R} t={recorded.t}, "
                f"experiment has S={cfg.S} W={cfg.W} R={cfg.R} t={cfg.t}"
            )
        if meta.protocol is not None and meta.protocol != self.protocol:
            raise ConfigValidationError(f"{self.schedule_file} was recorded with {meta.protocol}, experiment runs {self.protocol}")
        return Schedule.from_wire(meta.schedule)

    def _chain_schedule(self) -> Schedule:
        try:
            alpha = build_chain_alpha(self.servers, self.tolerance)
            if self.chain_family == "alpha":
                return alpha[self.chain_index]
            i1 = self.chain_critical
            if i1 > self.servers:
                raise ValueError(f"chain_critical {i1} exceeds S={self.servers}")
            variant = PRIME if self.chain_family == "beta-prime" else DOUBLEPRIME
            beta = build_chain_beta(alpha.cfg, (alpha[i1 - 1], alpha[i1]), i1, variant, self.chain_skip)
            return beta[self.chain_index]
        except ValueError as exc:
            raise ConfigValidationError(f"invalid chain schedule: {exc}") from exc

    def to_text(self) -> str:
        """Canonical file form: sorted keys, unset keys omitted."""
        lines = []
        for key, value in sorted(self.model_dump().items()):
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, Path):
                value = value.as_posix()
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")
        return path

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """
        Validate a mapping of raw values.

        Raises:
            ConfigValidationError: on any validation failure
        """
        cleaned = {k: v for k, v in data.items() if v is not None and v != ""}
        try:
            return cls.model_validate(cleaned)
        except ValidationError as exc:
            problems = "; ".join(f"{'.'.join(str(p) for p in e['loc']) or 'config'}: {e['msg']}" for e in exc.errors())
            raise ConfigValidationError(f"invalid experiment config: {problems}") from exc
        except QuorumLabError as exc:
            raise ConfigValidationError(str(exc)) from exc

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigValidationError(f"config file not found: {path}")
        values = dotenv_values(path, interpolate=False)
        logger.debug(f"loaded {len(values)} config keys from {path}")
        return cls.from_mapping(dict(values))
