"""Reset controllers: cautious, bold with fixed boldness, bold with a schedule.

A monitor never sees the model.  It is fed tracker observations one step at
a time and answers Continue or Reset.  On Reset the caller starts a fresh
path (and a fresh tracker).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from .core import Verdict
from .errors import ConfigurationError, ProtocolError
from .tracker import Observation


class MonitorKind(enum.Enum):
    CAUTIOUS = "cautious"
    BOLD_FIXED = "bold"
    BOLD_GENERAL = "bold-general"


class Schedule(enum.Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exp"


class Action(enum.Enum):
    CONTINUE = "continue"
    RESET = "reset"


def alpha0(p_min: float) -> float:
    """Smallest safe boldness ``max(1, -1/log2(1 - p_min))``."""
    if not 0.0 < p_min <= 1.0:
        raise ConfigurationError(f"p_min must lie in (0,1], got {p_min}")
    if p_min == 1.0:
        return 1.0
    return max(1.0, -1.0 / math.log2(1.0 - p_min))


def threshold(i: int, alpha: float, epsilon: float) -> float:
    return alpha * (i - math.log2(epsilon))


def schedule_alpha(schedule: Schedule, j: int) -> float:
    if j < 1:
        raise ValueError("sample numbers start at 1")
    if schedule is Schedule.LINEAR:
        return float(j)
    return float(2 ** j) if j < 1024 else math.inf


@dataclass(frozen=True)
class MonitorConfig:
    kind: MonitorKind
    alpha: float | None = None
    epsilon: float | None = None
    schedule: Schedule | None = None
    p_min: float | None = None

    def __post_init__(self):
        if self.kind is MonitorKind.CAUTIOUS:
            return
        if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"epsilon must lie strictly between 0 and 1, got {self.epsilon}")
        if self.kind is MonitorKind.BOLD_FIXED:
            if self.alpha is None or not self.alpha > 0:
                raise ConfigurationError(f"bold monitor needs a positive alpha, got {self.alpha}")
            if self.p_min is None:
                warnings.warn("p_min unknown: cannot check alpha >= alpha0", stacklevel=3)
            elif self.alpha < alpha0(self.p_min):
                raise ConfigurationError(
                    f"alpha={self.alpha} is below alpha0={alpha0(self.p_min):.6g} for p_min={self.p_min}")
        elif self.schedule is None:
            raise ConfigurationError("bold-general monitor needs a schedule")

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "schedule": self.schedule.value if self.schedule else None,
            "p_min": self.p_min,
        }


class MonitorVerdict(NamedTuple):
    action: Action
    candidate_index: int
    strength: int
    threshold: float | None


class Monitor:
    """Step-driven reset controller.

    ``sample`` is the 1-based number of the current sample (path since the
    last reset); the general bold monitor uses ``alpha_j`` for sample ``j``.
    """

    def __init__(self, config: MonitorConfig):
        self.config = config
        self.sample = 1
        self._alpha = self._alpha_for(1)
        self._log_eps = math.log2(config.epsilon) if config.epsilon is not None else 0.0

    def _alpha_for(self, j):
        cfg = self.config
        if cfg.kind is MonitorKind.BOLD_FIXED:
            return cfg.alpha
        if cfg.kind is MonitorKind.BOLD_GENERAL:
            return schedule_alpha(cfg.schedule, j)
        return None

    @property
    def alpha(self) -> float | None:
        return self._alpha

    def current_threshold(self, i: int) -> float | None:
        if self._alpha is None:
            return None
        return self._alpha * (i - self._log_eps)

    def step(self, obs: Observation) -> MonitorVerdict:
        if obs.defined and obs.index < 1:
            raise ProtocolError("a defined candidate must have index >= 1")
        if not obs.defined:
            return MonitorVerdict(Action.CONTINUE, obs.index, 0, None)
        if obs.verdict is None:
            raise ProtocolError("observation carries a candidate without a verdict")
        th = self.current_threshold(obs.index)
        bad = obs.verdict is Verdict.BAD
        fire = bad if th is None else bad and obs.strength >= th
        return MonitorVerdict(Action.RESET if fire else Action.CONTINUE, obs.index, obs.strength, th)

    def reset(self):
        """Record a reset: the next sample begins."""
        self.sample += 1
        self._alpha = self._alpha_for(self.sample)
