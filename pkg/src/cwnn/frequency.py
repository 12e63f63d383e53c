"""Dominant-frequency-band probing for an unknown mapping.

Starting from a coarse detail subspace, each resolution is probed with a
cheap energy estimate (coefficients after a small number of gradient
updates from zero, weighted by the element norm).  A debiased exponential
moving average smooths the sequence; probing stops once the smoothed
energy at the current resolution is no longer exceeded by the raw
estimate one level finer, and that resolution seeds the network build.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .wavelets import (BasisIndex, BasisKind, CenterGrid, MotherWavelet,
                       basis_matrix, children_centers)


def alpha_from_epsilon(epsilon: float) -> float:
    """Smoothing weight tied to the accuracy target: stricter targets put
    more weight on history.  Defined for 0 < epsilon <= 1."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    return 2.0 * math.atan(-math.log10(epsilon)) / math.pi


def ema_update(prev_bar: float, current_hat: float, alpha: float, m: int) -> float:
    """Debiased EMA step: (alpha*prev + (1-alpha)*current) / (1 - alpha**m).

    ``m`` is the 1-based position in the sequence and must be >= 2 (the
    first position simply takes the raw value).
    """
    if m < 2:
        raise ValueError("ema_update applies from the second position on")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    return (alpha * prev_bar + (1.0 - alpha) * current_hat) / (1.0 - alpha ** m)


def estimate_subspace_energy(mother: MotherWavelet, bases, X, y, lr: float,
                             n_updates: int = 1):
    """Energy held by a set of elements after a short fit from zero.

    Runs ``n_updates`` full-batch gradient updates starting at zero
    coefficients and returns ``(sum_j c_j**2 * ||psi||**2, coeffs)``.
    """
    if not bases:
        return 0.0, np.zeros(0)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    psi = basis_matrix(mother, bases, X)
    coeffs = np.zeros(len(bases))
    scale = lr * 2.0 / y.size
    for _ in range(n_updates):
        resid = y - psi @ coeffs
        coeffs += scale * (psi.T @ resid)
    energy = float(np.sum(coeffs * coeffs) * mother.norm_sq)
    return energy, coeffs


def subsample_centers(grid: CenterGrid, kappa: float):
    """Uniform stride subsample of a grid keeping per-dimension endpoints.

    The stride (shared by all dimensions) is chosen so the kept fraction
    matches ``kappa`` as closely as possible from above, where the kept
    fraction may be read per dimension or over the whole grid — an exact
    match under either reading wins, otherwise the smallest whole-grid
    fraction at or above ``kappa`` is used.
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must be in (0, 1], got {kappa}")
    spans = [hi - lo for lo, hi in zip(grid.n_lo, grid.n_hi)]
    max_span = max(spans)
    strides = [s for s in range(1, max(2, max_span + 1))
               if all(sp % s == 0 for sp in spans)]
    cands = []
    for s in strides:
        kept = [sp // s + 1 for sp in spans]
        total = math.prod(kept) / grid.count
        per_dim = total ** (1.0 / grid.dim)
        cands.append((s, total, per_dim))
    chosen = None
    for s, total, per_dim in cands:
        if abs(total - kappa) <= 1e-9 or abs(per_dim - kappa) <= 1e-9:
            chosen = s
            break
    if chosen is None:
        above = [(total, s) for s, total, _ in cands if total >= kappa - 1e-12]
        chosen = min(above)[1]
    kept_axes = [range(lo, hi + 1, chosen) for lo, hi in zip(grid.n_lo, grid.n_hi)]
    shape = tuple(len(r) for r in kept_axes)
    out = []
    for idx in np.ndindex(shape):
        n = tuple(kept_axes[i][k] for i, k in enumerate(idx))
        out.append(BasisIndex(grid.m, n, BasisKind.WAVELET))
    return out


@dataclass
class EnergyTrace:
    """Per-resolution raw and smoothed energy estimates from probing."""

    alpha: float
    rows: list = field(default_factory=list)  # (m, e_hat, e_bar, n_bases)

    def append(self, m: int, e_hat: float, e_bar: float, n_bases: int) -> None:
        self.rows.append((m, e_hat, e_bar, n_bases))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "E_hat", "E_bar", "n_bases"])
            for m, eh, eb, nb in self.rows:
                w.writerow([m, repr(eh), repr(eb), nb])


@dataclass
class EstimateResult:
    m_init: int
    trace: EnergyTrace
    # resolution under the alternative "previous level" reading of the
    # stopping rule; reported for diagnostics only
    m_init_alt: int = 0
    warning: str | None = None


def estimate_initial_resolution(mother: MotherWavelet, X, y,
                                start_grid: CenterGrid, kappa: float,
                                lr: float, epsilon: float, m_cap: int = 10,
                                n_updates: int = 1, stop_early: bool = True
                                ) -> EstimateResult:
    """Probe detail subspaces upward in resolution until energy peaks.

    The starting grid is stride-subsampled by ``kappa``; each following
    resolution probes the children of every element probed at the level
    before.  Because the probe count multiplies by up to 2**dim per level,
    levels are compared by energy *per probed element* (the summed
    estimate divided by the probe count) — the summed estimate alone grows
    with the probe set and has no peak to find.  Probing continues while
    the smoothed per-element energy at the current level lies strictly
    below the raw value one level finer; the exit level seeds the build.

    With ``stop_early=False`` the chain records the full trace up to
    ``m_cap`` (band diagnostics) while still reporting where the stop rule
    first fired.
    """
    alpha = alpha_from_epsilon(epsilon)
    trace = EnergyTrace(alpha=alpha)
    probes = subsample_centers(start_grid, kappa)
    e_sum, _ = estimate_subspace_energy(mother, probes, X, y, lr, n_updates)
    degenerate = ("zero probe energy at the start resolution; the stop rule "
                  "fires immediately" if e_sum == 0.0 else None)
    e_hat = e_sum / len(probes)
    e_bar = e_hat
    grid = start_grid
    m = start_grid.m
    trace.append(m, e_hat, e_bar, len(probes))
    position = 1
    exit_m = None
    while m < m_cap:
        fine = grid.refine()
        next_probes = []
        seen = set()
        for parent in probes:
            for child in children_centers(parent, fine):
                if child.n not in seen:
                    seen.add(child.n)
                    next_probes.append(child)
        e_sum_next, _ = estimate_subspace_energy(mother, next_probes, X, y,
                                                 lr, n_updates)
        e_hat_next = e_sum_next / len(next_probes)
        position += 1
        e_bar_next = ema_update(e_bar, e_hat_next, alpha, position)
        trace.append(fine.m, e_hat_next, e_bar_next, len(next_probes))
        if e_bar >= e_hat_next and exit_m is None:
            exit_m = m
            if stop_early:
                return EstimateResult(m, trace, m_init_alt=m - 1,
                                      warning=degenerate)
        probes, grid, m = next_probes, fine, fine.m
        e_bar = e_bar_next
    if exit_m is not None:
        return EstimateResult(exit_m, trace, m_init_alt=exit_m - 1,
                              warning=degenerate)
    return EstimateResult(m_cap, trace, m_init_alt=m_cap - 1,
                          warning=f"no energy peak found up to m={m_cap}")
