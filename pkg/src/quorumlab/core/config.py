"""
System Configuration

Process ids live in one dense integer space: writers first, then readers,
then servers. A writer's client id doubles as its writer id in values.
"""

from dataclasses import dataclass
from fractions import Fraction

from ..exceptions import ConfigValidationError


@dataclass(frozen=True)
class SystemConfig:
    """Sizes of the emulated system and its crash tolerance."""

    S: int
    W: int
    R: int
    t: int

    def __post_init__(self):
        if self.S < 2:
            raise ConfigValidationError(f"need at least 2 servers, got S={self.S}")
        if self.W < 1 or self.R < 1:
            raise ConfigValidationError(f"need at least one writer and one reader, got W={self.W}, R={self.R}")
        if self.t < 1:
            raise ConfigValidationError(f"crash tolerance must be >= 1, got t={self.t}")
        if self.t >= self.S:
            raise ConfigValidationError(f"t={self.t} leaves no live server out of S={self.S}")

    @property
    def quorum(self) -> int:
        """Replies needed to close a round-trip."""
        return self.S - self.t

    @property
    def writers(self) -> range:
        return range(0, self.W)

    @property
    def readers(self) -> range:
        return range(self.W, self.W + self.R)

    @property
    def clients(self) -> range:
        return range(0, self.W + self.R)

    @property
    def servers(self) -> range:
        return range(self.W + self.R, self.W + self.R + self.S)

    def is_writer(self, pid: int) -> bool:
        return pid in self.writers

    def is_reader(self, pid: int) -> bool:
        return pid in self.readers

    def is_server(self, pid: int) -> bool:
        return pid in self.servers

    def server(self, index: int) -> int:
        """Process id of the ``index``-th server (1-based, as in s_1..s_S)."""
        if not 1 <= index <= self.S:
            raise ValueError(f"server index {index} outside 1..{self.S}")
        return self.servers[index - 1]

    def server_index(self, pid: int) -> int:
        return pid - self.servers.start + 1

    def label(self, pid: int) -> str:
        if self.is_writer(pid):
            return f"w{pid}"
        if self.is_reader(pid):
            return f"r{pid - self.W}"
        if self.is_server(pid):
            return f"s{self.server_index(pid)}"
        raise ValueError(f"unknown process id {pid}")

    def parse_label(self, label: str) -> int:
        """Inverse of :meth:`label` for client and server labels."""
        kind, number = label[0], label[1:]
        if not number.isdigit():
            raise ValueError(f"bad process label {label!r}")
        n = int(number)
        if kind == "w" and n in self.writers:
            return n
        if kind == "r" and 0 <= n < self.R:
            return self.W + n
        if kind == "s" and 1 <= n <= self.S:
            return self.server(n)
        raise ValueError(f"process label {label!r} does not exist in {self}")


def feasible_w2r1(cfg: SystemConfig) -> bool:
    """True iff a fast-read (W2R1) emulation exists: R < S/t - 2 over the rationals."""
    return Fraction(cfg.R) < Fraction(cfg.S, cfg.t) - 2


def feasible_w2r2(cfg: SystemConfig) -> bool:
    """True iff the two-round baseline is atomic: t < S/2."""
    return 2 * cfg.t < cfg.S
