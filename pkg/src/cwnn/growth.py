"""Constructive network growth: seed at the estimated resolution, train to
a plateau, then expand capacity where the energy sits.

Each growth phase selects the highest-energy detail elements at the
current resolution (an increasing energy fraction mu, 2*mu, ..., 1 across
phases), adds the next-resolution elements nearest to their centers, and
retrains.  Once the fraction schedule is exhausted the whole next level is
seeded and the schedule restarts there.  A non-constructive baseline that
escalates full detail grids level by level is included for comparison, as
is a windowed online variant that triggers the same growth phases on a
sustained loss plateau.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .model import TrainLog, TrainStatus, WaveletModel, train_to_plateau
from .wavelets import (BasisIndex, BasisKind, MotherWavelet, basis_matrix,
                       build_center_grid, children_centers, _grid_from_bounds)


@dataclass
class GrowthConfig:
    """Knobs for a growth run.  ``epsilon`` is the loss target, ``zeta``
    the plateau threshold, ``mu`` the per-phase energy fraction (must be a
    reciprocal of a positive integer)."""

    epsilon: float
    zeta: float
    mu: float
    learning_rate: float
    m_init: int
    domain_low: tuple = (0.0,)
    domain_high: tuple = (1.0,)
    margin: float = 1.0
    clamp_low: tuple | None = None
    clamp_high: tuple | None = None
    max_resolution: int = 10
    max_iters: int = 50_000
    seed: int | None = None
    baseline_start_m: int = 1
    baseline_seed_fraction: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0 or self.zeta <= 0 or self.learning_rate <= 0:
            raise ValueError("epsilon, zeta and learning_rate must be positive")
        inv = 1.0 / self.mu
        if abs(inv - round(inv)) > 1e-9:
            raise ValueError(f"mu must be the reciprocal of a positive "
                             f"integer, got {self.mu}")
        if self.m_init > self.max_resolution:
            raise ValueError("m_init exceeds max_resolution")

    @property
    def n_phases(self) -> int:
        return int(round(1.0 / self.mu))


class WaveletPool:
    """The active basis set of a growing model plus expansion bookkeeping.

    Tracks which detail elements have already served as expansion parents
    at each resolution so repeated phases pick fresh ones.
    """

    def __init__(self, mother: MotherWavelet, low, high):
        self.model = WaveletModel.zeros(mother, [])
        self.low = tuple(float(v) for v in np.atleast_1d(low))
        self.high = tuple(float(v) for v in np.atleast_1d(high))
        self.expanded = defaultdict(set)
        self._pos = {}

    def __contains__(self, b: BasisIndex) -> bool:
        return b in self._pos

    def grid(self, m: int):
        return _grid_from_bounds(m, self.low, self.high)

    def add_bases(self, bases) -> list:
        new = []
        start = self.model.n_params
        for b in bases:
            if b not in self._pos:
                self._pos[b] = start + len(new)
                new.append(b)
        self.model.append_bases(new)
        return new

    def ensure_level(self, m: int) -> int:
        """Add the full scaling and detail grids at resolution ``m``;
        returns how many elements were new."""
        grid = self.grid(m)
        added = self.add_bases(grid.bases(BasisKind.SCALING))
        added += self.add_bases(grid.bases(BasisKind.WAVELET))
        return len(added)

    def detail_items(self, m: int):
        """(index, coefficient) pairs for detail elements at resolution m."""
        out = []
        for b, pos in self._pos.items():
            if b.kind is BasisKind.WAVELET and b.m == m:
                out.append((b, float(self.model.coeffs[pos])))
        return out

    def top_resolution(self):
        """Finest resolution present in the pool, or None when empty."""
        return max((b.m for b in self._pos), default=None)


def select_high_energy(pool: WaveletPool, m: int, mu_up: float, exclude=frozenset()):
    """Highest-energy detail elements at resolution ``m`` holding a
    ``mu_up`` fraction of the level's total energy.

    Elements already used as parents (``exclude``) are skipped but still
    count toward the total, so successive phases with growing ``mu_up``
    reach deeper into the energy ranking.  Zero-energy elements are never
    selected.  Ordering ties break on the index itself, so selection is
    deterministic.
    """
    items = pool.detail_items(m)
    norm = pool.model.mother.norm_sq
    energies = {b: c * c * norm for b, c in items}
    total = sum(energies.values())
    target = mu_up * total
    ranked = sorted(items, key=lambda bc: (-energies[bc[0]], bc[0].sort_key()))
    chosen = []
    acc = 0.0
    for b, _ in ranked:
        if acc >= target - 1e-12 * max(total, 1e-300):
            break
        e = energies[b]
        if e == 0.0 or b in exclude:
            continue
        chosen.append(b)
        acc += e
    return chosen


def expand_into_next(pool: WaveletPool, parents, rng=None):
    """Add the children of each parent one resolution finer; returns the
    newly created elements (zero coefficients, predictions unchanged)."""
    if not parents:
        return []
    m_next = parents[0].m + 1
    if any(p.m != parents[0].m for p in parents):
        raise ValueError("parents must share one resolution")
    fine = pool.grid(m_next)
    children = []
    seen = set()
    for p in parents:
        for ch in children_centers(p, fine, rng=rng):
            if ch not in seen:
                seen.add(ch)
                children.append(ch)
    return pool.add_bases(children)


@dataclass
class GrowthResult:
    model: WaveletModel
    log: TrainLog
    status: TrainStatus
    final_resolution: int
    pool: "WaveletPool | None" = None

    @property
    def n_params(self) -> int:
        return self.model.n_params

    @property
    def final_loss(self) -> float:
        return self.log.records[-1][1] if self.log.records else float("nan")


def _effective_bounds(config: GrowthConfig):
    grid = build_center_grid(max(config.m_init, 0), config.domain_low,
                             config.domain_high, config.margin,
                             config.clamp_low, config.clamp_high)
    return grid.low, grid.high


def run_growth(mother: MotherWavelet, X, y, config: GrowthConfig,
               log: TrainLog | None = None,
               pool: WaveletPool | None = None) -> GrowthResult:
    """Grow and train until the loss target is met (Achieved) or the
    iteration/resolution budget runs out (Budget).

    Passing an existing ``pool`` continues a previous run (e.g. after new
    data arrives) instead of seeding afresh: training resumes at the
    pool's finest resolution with a fresh expansion-phase schedule.
    """
    log = log if log is not None else TrainLog()
    start_iter = log.last_iteration
    if pool is None:
        low, high = _effective_bounds(config)
        pool = WaveletPool(mother, low, high)
        m = config.m_init
        added = pool.ensure_level(m)
        log.add_event(log.last_iteration, "seed", m, added)
    else:
        m = pool.top_resolution()
        if m is None:
            raise ValueError("cannot resume from an empty pool")
    sweep = 0
    while True:
        remaining = config.max_iters - (log.last_iteration - start_iter)
        if remaining <= 0:
            return GrowthResult(pool.model, log, TrainStatus.BUDGET, m, pool)
        st = train_to_plateau(pool.model, X, y, config.learning_rate,
                              config.zeta, config.epsilon, remaining, log)
        if st is TrainStatus.ACHIEVED:
            return GrowthResult(pool.model, log, TrainStatus.ACHIEVED, m, pool)
        if st is TrainStatus.BUDGET:
            return GrowthResult(pool.model, log, TrainStatus.BUDGET, m, pool)
        if sweep < config.n_phases:
            sweep += 1
            mu_up = 1.0 if sweep == config.n_phases else sweep * config.mu
            parents = select_high_energy(pool, m, mu_up, pool.expanded[m])
            new = expand_into_next(pool, parents)
            pool.expanded[m].update(parents)
            log.add_event(log.last_iteration, "expand", m, len(new))
        else:
            m += 1
            if m > config.max_resolution:
                return GrowthResult(pool.model, log, TrainStatus.BUDGET, m - 1, pool)
            new = pool.ensure_level(m)
            sweep = 0
            log.add_event(log.last_iteration, "escalate", m, new)


def run_baseline_wnn(mother: MotherWavelet, X, y, config: GrowthConfig,
                     log: TrainLog | None = None) -> GrowthResult:
    """Non-constructive reference: seed scaling + detail grids at the
    start resolution, then add whole detail grids level by level whenever
    training plateaus above the target."""
    log = log if log is not None else TrainLog()
    start_iter = log.last_iteration
    low, high = _effective_bounds(config)
    pool = WaveletPool(mother, low, high)
    m = config.baseline_start_m
    grid = pool.grid(m)
    seed_bases = grid.bases(BasisKind.SCALING) + grid.bases(BasisKind.WAVELET)
    frac = config.baseline_seed_fraction
    if frac < 1.0:
        rng = np.random.default_rng(config.seed)
        keep = rng.choice(len(seed_bases), size=max(1, int(round(frac * len(seed_bases)))),
                          replace=False)
        seed_bases = [seed_bases[i] for i in sorted(keep)]
    pool.add_bases(seed_bases)
    log.add_event(log.last_iteration, "seed", m, len(seed_bases))
    while True:
        remaining = config.max_iters - (log.last_iteration - start_iter)
        if remaining <= 0:
            return GrowthResult(pool.model, log, TrainStatus.BUDGET, m, pool)
        st = train_to_plateau(pool.model, X, y, config.learning_rate,
                              config.zeta, config.epsilon, remaining, log)
        if st is TrainStatus.ACHIEVED:
            return GrowthResult(pool.model, log, TrainStatus.ACHIEVED, m, pool)
        if st is TrainStatus.BUDGET:
            return GrowthResult(pool.model, log, TrainStatus.BUDGET, m, pool)
        m += 1
        if m > config.max_resolution:
            return GrowthResult(pool.model, log, TrainStatus.BUDGET, m - 1, pool)
        new = pool.add_bases(pool.grid(m).bases(BasisKind.WAVELET))
        log.add_event(log.last_iteration, "escalate", m, len(new))


@dataclass
class OnlineResult:
    model: WaveletModel
    log: TrainLog
    window_losses: list
    growth_iterations: list = field(default_factory=list)

    @property
    def n_params(self) -> int:
        return self.model.n_params


def run_online(mother: MotherWavelet, X, y, config: GrowthConfig,
               window: int = 10, steps_per_window: int = 1,
               patience: int = 40, improvement: float = 0.02,
               log: TrainLog | None = None) -> OnlineResult:
    """Windowed streaming variant: consume ``window`` samples per cycle,
    apply ``steps_per_window`` gradient updates on that window, and run
    one growth phase whenever the rolling window loss sits above the loss
    target without improving for ``patience`` cycles.

    Improvement means the rolling loss dropped below its best by more
    than ``zeta`` absolutely or by the relative ``improvement`` fraction
    (the relative branch keeps slow-but-real recovery after a regime
    switch from firing growth on every patience interval).

    The post-update loss of each window is logged as one record, so the
    iteration column counts update cycles.
    """
    log = log if log is not None else TrainLog()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    low, high = _effective_bounds(config)
    pool = WaveletPool(mother, low, high)
    m = config.m_init
    added = pool.ensure_level(m)
    log.add_event(log.last_iteration, "seed", m, added)
    sweep = 0
    losses = []
    best_roll = np.inf
    best_at = 0
    growth_iters = []
    step = 0
    n_windows = len(y) // window
    for w in range(n_windows):
        sl = slice(w * window, (w + 1) * window)
        Xw, yw = X[sl], y[sl]
        psi = basis_matrix(mother, pool.model.bases, Xw)
        for _ in range(steps_per_window):
            resid = yw - psi @ pool.model.coeffs
            pool.model.coeffs += config.learning_rate * (2.0 / len(yw)) * (psi.T @ resid)
            step += 1
        resid = yw - psi @ pool.model.coeffs
        lw = float(np.mean(resid * resid))
        losses.append(lw)
        log.append(step, lw, pool.model.n_params)
        roll = float(np.mean(losses[-patience:]))
        if np.isinf(best_roll):
            best_roll = roll
            best_at = w
        elif roll < best_roll - max(config.zeta, improvement * best_roll):
            best_roll = roll
            best_at = w
        if roll > config.epsilon and (w - best_at) >= patience:
            # sustained plateau above target: one growth phase
            if sweep < config.n_phases:
                sweep += 1
                mu_up = 1.0 if sweep == config.n_phases else sweep * config.mu
                parents = select_high_energy(pool, m, mu_up, pool.expanded[m])
                new = expand_into_next(pool, parents)
                pool.expanded[m].update(parents)
                log.add_event(step, "expand", m, len(new))
                growth_iters.append(step)
            elif m < config.max_resolution:
                m += 1
                new = pool.ensure_level(m)
                sweep = 0
                log.add_event(step, "escalate", m, new)
                growth_iters.append(step)
            # at the resolution cap with all phases spent: keep streaming
            # plain updates, just restart the patience clock
            best_roll = roll
            best_at = w
    rem = len(y) - n_windows * window
    if rem:
        # leftover samples form one last partial window (updates + record
        # only; no growth trigger on a boundary fragment)
        Xw, yw = X[n_windows * window:], y[n_windows * window:]
        psi = basis_matrix(mother, pool.model.bases, Xw)
        for _ in range(steps_per_window):
            resid = yw - psi @ pool.model.coeffs
            pool.model.coeffs += config.learning_rate * (2.0 / len(yw)) * (psi.T @ resid)
            step += 1
        resid = yw - psi @ pool.model.coeffs
        losses.append(float(np.mean(resid * resid)))
        log.append(step, losses[-1], pool.model.n_params)
    return OnlineResult(pool.model, log, losses, growth_iters)
