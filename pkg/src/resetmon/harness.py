"""Trial orchestration: sample the product under a monitor until the oracle
confirms a good bottom SCC, and aggregate the per-trial statistics.

Step accounting: every call to the sampler (the initial state included)
is one step.  ``T`` counts the steps of samples that ended in a reset, so
it is the number of steps up to the last reset.
"""
from __future__ import annotations

import enum
import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .core import ProductChain, Verdict
from .graph import (Bounds, SccDecomposition, scc_decompose, good_bottoms,
                    satisfaction_probability, structural_params, theoretical_bounds)
from .monitors import Action, Monitor, MonitorConfig, MonitorKind
from .tracker import IncrementalTracker

DEFAULT_MAX_STEPS = 10_000_000
_BATCH = 4096


class Outcome(enum.Enum):
    ACCEPTED_GOOD = "AcceptedGood"
    CUTOFF = "Cutoff"


@dataclass
class TrialStats:
    trial: int
    resets: int
    steps: int
    sample_steps: list[int]
    sample_undefined: list[int]
    sample_candidate: list[int]
    outcome: Outcome
    final_candidate_size: int
    final_steps: int
    # members of the accepted candidate; kept in memory only, never emitted
    final_members: frozenset | None = field(default=None, compare=False, repr=False)

    @property
    def t_per_r(self) -> float | None:
        return self.steps / self.resets if self.resets else None


class Oracle:
    """Ground truth the harness (never the monitor) uses to stop a trial."""

    def __init__(self, product: ProductChain, dec: SccDecomposition | None = None):
        self.dec = dec or scc_decompose(product)
        good = set(good_bottoms(product, self.dec))
        self.comp_of = self.dec.component_of
        self.good_size = [len(c) if k in good else -1 for k, c in enumerate(self.dec.components)]
        self.bottom_size = [len(c) if b else -1 for c, b in zip(self.dec.components, self.dec.is_bottom)]

    def trapped_good(self, tracker: IncrementalTracker) -> bool:
        """The candidate is a whole good BSCC of the product with strength at least 1."""
        if tracker.birthday is None or tracker.verdict is not Verdict.GOOD:
            return False
        # the candidate lies inside the SCC of the last state, so equal sizes mean equal sets
        if tracker.candidate_size != self.good_size[self.comp_of[tracker.last]]:
            return False
        return tracker.strength() >= 1

    def trapped(self, tracker: IncrementalTracker) -> bool:
        """The candidate is a whole BSCC of the product, good or bad."""
        return (tracker.birthday is not None
                and tracker.candidate_size == self.bottom_size[self.comp_of[tracker.last]])


class Sampler:
    """Draws product states with pre-drawn uniform batches from one RNG stream."""

    def __init__(self, product: ProductChain, rng: np.random.Generator):
        self.rng = rng
        self.succ = product.succ
        self.cum = [list(accumulate(row)) for row in product.probs]
        self.init_states = [i for i, p in enumerate(product.initial) if p > 0]
        self.init_cum = list(accumulate(product.initial[i] for i in self.init_states))
        self._buf: list[float] = []
        self._pos = 0

    def _uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self.rng.random(_BATCH).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def initial(self) -> int:
        u = self._uniform() * self.init_cum[-1]
        k = bisect_right(self.init_cum, u)
        return self.init_states[min(k, len(self.init_states) - 1)]

    def next(self, s: int) -> int:
        cum = self.cum[s]
        k = bisect_right(cum, self._uniform() * cum[-1])
        row = self.succ[s]
        return row[min(k, len(row) - 1)]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def run_trial(product: ProductChain, config: MonitorConfig, oracle: Oracle, seed: int, trial: int,
              max_steps: int = DEFAULT_MAX_STEPS) -> TrialStats:
    sampler = Sampler(product, trial_rng(seed, trial))
    monitor = Monitor(config)
    lengths, undef, cand = [], [], []
    total = 0
    while True:
        tracker = IncrementalTracker(product)
        n_undef = n_cand = 0
        s = sampler.initial()
        tracker.step(None, s)
        while True:
            total += 1
            if tracker.birthday is None:
                n_undef += 1
            else:
                n_cand += 1
            if oracle.trapped_good(tracker):
                return TrialStats(trial, len(lengths), sum(lengths), lengths, undef, cand,
                                  Outcome.ACCEPTED_GOOD, tracker.candidate_size, n_undef + n_cand,
                                  tracker.candidate().members)
            if monitor.step(tracker.observe()).action is Action.RESET:
                break
            if total >= max_steps:
                return TrialStats(trial, len(lengths), sum(lengths), lengths, undef, cand,
                                  Outcome.CUTOFF, tracker.candidate_size, n_undef + n_cand)
            s2 = sampler.next(s)
            tracker.step(s, s2)
            s = s2
        lengths.append(n_undef + n_cand)
        undef.append(n_undef)
        cand.append(n_cand)
        monitor.reset()
        if total >= max_steps:
            return TrialStats(trial, len(lengths), sum(lengths), lengths, undef, cand,
                              Outcome.CUTOFF, 0, 0)


@dataclass(frozen=True)
class ShadowResult:
    """One run sampled without ever resetting.

    ``good`` tells whether the run got trapped in a good BSCC; ``fired``
    whether the monitor asked for a reset at some step along the way.
    ``None`` outcomes mean the step cutoff was hit first.
    """

    good: bool | None
    fired: bool
    steps: int


def run_shadow_trial(product: ProductChain, config: MonitorConfig, oracle: Oracle, seed: int,
                     trial: int, max_steps: int = DEFAULT_MAX_STEPS) -> ShadowResult:
    sampler = Sampler(product, trial_rng(seed, trial))
    monitor = Monitor(config)
    tracker = IncrementalTracker(product)
    s = sampler.initial()
    tracker.step(None, s)
    fired = False
    for step in range(1, max_steps + 1):
        if not fired and monitor.step(tracker.observe()).action is Action.RESET:
            fired = True
        if oracle.trapped(tracker) and tracker.strength() >= 1:
            return ShadowResult(tracker.verdict is Verdict.GOOD, fired, step)
        s2 = sampler.next(s)
        tracker.step(s, s2)
        s = s2
    return ShadowResult(None, fired, max_steps)


@dataclass
class ExperimentConfig:
    model: str
    prop: str
    monitor: MonitorConfig
    trials: int
    seed: int
    max_steps: int = DEFAULT_MAX_STEPS

    def echo(self) -> dict:
        return {"model": self.model, "prop": self.prop, "monitor": self.monitor.describe(),
                "trials": self.trials, "seed": self.seed, "max_steps": self.max_steps}


@dataclass
class ExperimentReport:
    config: dict
    trials: list[TrialStats]
    p_phi: float
    params: dict
    bounds: dict | None
    aggregates: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.aggregates:
            self.aggregates = aggregate(self.trials)

    @property
    def degenerate(self) -> bool:
        return self.aggregates["cutoff_fraction"] is not None and self.aggregates["cutoff_fraction"] > 0.5


def _mean_var(xs):
    if not xs:
        return None, None
    mean = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return mean, None
    return mean, math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


def aggregate(trials: list[TrialStats]) -> dict:
    """Means and sample variances of R and T, and the ratio of total T to total R."""
    rs = [t.resets for t in trials]
    ts = [t.steps for t in trials]
    mean_r, var_r = _mean_var(rs)
    mean_t, var_t = _mean_var(ts)
    total_r = sum(rs)
    return {
        "n_trials": len(trials),
        "mean_R": mean_r,
        "var_R": var_r,
        "mean_T": mean_t,
        "var_T": var_t,
        "T_per_R": sum(ts) / total_r if total_r else None,
        "accepted_good": sum(t.outcome is Outcome.ACCEPTED_GOOD for t in trials),
        "cutoff_fraction": (sum(t.outcome is Outcome.CUTOFF for t in trials) / len(trials)) if trials else None,
    }


def _chunk_worker(args):
    product, config, seed, lo, hi, max_steps = args
    oracle = Oracle(product)
    return [run_trial(product, config, oracle, seed, k, max_steps) for k in range(lo, hi)]


def run_trials(product: ProductChain, config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Run ``config.trials`` independent trials; the result does not depend on ``workers``."""
    dec = scc_decompose(product)
    oracle = Oracle(product, dec)
    p_phi = satisfaction_probability(product, dec)
    params = structural_params(product, dec)
    if config.trials <= 0:
        stats: list[TrialStats] = []
    elif workers <= 1:
        stats = [run_trial(product, config.monitor, oracle, config.seed, k, config.max_steps)
                 for k in range(config.trials)]
    else:
        step = math.ceil(config.trials / workers)
        jobs = [(product, config.monitor, config.seed, lo, min(lo + step, config.trials), config.max_steps)
                for lo in range(0, config.trials, step)]
        with ProcessPoolExecutor(workers) as pool:
            stats = [t for chunk in pool.map(_chunk_worker, jobs) for t in chunk]
    bounds = None
    if p_phi > 0 and config.monitor.kind is not MonitorKind.CAUTIOUS:
        alpha = config.monitor.alpha if config.monitor.kind is MonitorKind.BOLD_FIXED else None
        eps = config.monitor.epsilon
        bounds = theoretical_bounds(params, p_phi, alpha, eps)._asdict()
    return ExperimentReport(config.echo(), stats, p_phi, params._asdict(), bounds)


def run_shadow_trials(product: ProductChain, config: MonitorConfig, trials: int, seed: int,
                      max_steps: int = DEFAULT_MAX_STEPS) -> list[ShadowResult]:
    oracle = Oracle(product)
    return [run_shadow_trial(product, config, oracle, seed, k, max_steps) for k in range(trials)]


def bounds_for(product: ProductChain, config: MonitorConfig) -> Bounds | None:
    dec = scc_decompose(product)
    p_phi = satisfaction_probability(product, dec)
    if p_phi == 0 or config.kind is MonitorKind.CAUTIOUS:
        return None
    alpha = config.alpha if config.kind is MonitorKind.BOLD_FIXED else None
    return theoretical_bounds(structural_params(product, dec), p_phi, alpha, config.epsilon)


def log2_slope(ns, means) -> float:
    """Least-squares slope of log2(mean) against n."""
    return float(np.polyfit(np.asarray(ns, float), np.log2(np.asarray(means, float)), 1)[0])
