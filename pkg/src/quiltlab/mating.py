"""Desk-scale simulator of the Poissonized mating-of-trees discretization.

Pipeline: sample a correlated two-dimensional Gaussian bridge from (0, 1)
to (0, 0) conditioned (by rejection) to stay in the closed quadrant, cut
its time axis by a Poisson process, read off per-cell boundary lengths from
increments and running infima, and assemble the quilt.

Conventions and proxies, documented once:

* variance: a^2 = 2 / sin(pi gamma^2 / 4); correlation -cos(pi gamma^2 / 4).
* the duration prior over total time is improper in the idealized model; we
  fix a configurable total duration (default 1.0) as a bounded proxy and
  treat the walk as a discrete bridge with ``steps`` increments.
* endpoint pinning is exact (Gaussian bridge construction), so rejection
  only enforces quadrant positivity; this replaces endpoint-ball rejection,
  which is infeasible at these step counts, and is unbiased for the bridge.
* infima are taken over grid points only; refinement error scales with the
  step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._builder import build_quilt_from_cells
from .errors import (
    GammaOutOfRange,
    MatingError,
    PartitionMismatch,
    RejectionBudgetExceeded,
)

CONSERVATION_TOL = 1e-9


@dataclass(frozen=True)
class MotParams:
    """Simulation parameters with the derived mating-of-trees constants."""

    gamma: float
    variance: float
    correlation: float
    epsilon: float
    steps: int
    seed: int
    duration: float = 1.0

    @property
    def near_degenerate(self):
        """Correlation close to +-1 (gamma near 0 or 2); sampling gets hard."""
        return abs(self.correlation) > 0.995


def mot_params(gamma, epsilon, steps, seed, duration=1.0) -> MotParams:
    if not 0 < gamma < 2:
        raise GammaOutOfRange(f"gamma must lie in (0, 2), got {gamma}")
    if epsilon <= 0 or steps < 2 or duration <= 0:
        raise MatingError("epsilon, duration must be positive and steps >= 2")
    angle = math.pi * gamma * gamma / 4.0
    return MotParams(
        gamma=gamma,
        variance=2.0 / math.sin(angle),
        correlation=-math.cos(angle),
        epsilon=epsilon,
        steps=int(steps),
        seed=int(seed),
        duration=float(duration),
    )


@dataclass
class ConeWalk:
    """Discrete bridge (L_t, R_t) from (0, 1) to (0, 0) in the quadrant."""

    times: np.ndarray
    L: np.ndarray
    R: np.ndarray
    rejections: int = 0

    @property
    def duration(self):
        return float(self.times[-1])

    def in_quadrant(self, through=None):
        """min(L) >= 0 and min(R) >= 0 up to grid index ``through`` (inclusive)."""
        sl = slice(None) if through is None else slice(0, through + 1)
        return bool(self.L[sl].min() >= 0.0 and self.R[sl].min() >= 0.0)


def _bridge_batch(p: MotParams, count, rng, start=(0.0, 1.0), end=(0.0, 0.0)):
    """Exact Gaussian bridges from start to end: shape (count, steps+1, 2)."""
    n = p.steps
    dt = p.duration / n
    cov = p.variance * dt * np.array(
        [[1.0, p.correlation], [p.correlation, 1.0]]
    )
    chol = np.linalg.cholesky(cov)
    incs = rng.standard_normal((count, n, 2)) @ chol.T
    paths = np.zeros((count, n + 1, 2))
    paths[:, 1:, :] = np.cumsum(incs, axis=1)
    paths += np.asarray(start, dtype=float)
    drift = paths[:, -1, :] - np.asarray(end, dtype=float)
    frac = (np.arange(n + 1) / n)[None, :, None]
    paths -= frac * drift[:, None, :]  # exact endpoint pinning
    return paths


def sample_cone_walk(p: MotParams, rng=None, max_proposals=2_000_000,
                     batch=512) -> ConeWalk:
    """First quadrant-positive bridge from a rejection stream.

    Raises RejectionBudgetExceeded after ``max_proposals`` attempts; the
    number of rejected proposals is recorded on the walk.
    """
    if rng is None:
        rng = np.random.default_rng(p.seed)
    times = np.linspace(0.0, p.duration, p.steps + 1)
    tried = 0
    while tried < max_proposals:
        take = min(batch, max_proposals - tried)
        paths = _bridge_batch(p, take, rng)
        ok = (paths.min(axis=1) >= 0.0).all(axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            i = int(hits[0])
            return ConeWalk(
                times=times,
                L=paths[i, :, 0].copy(),
                R=paths[i, :, 1].copy(),
                rejections=tried + i,
            )
        tried += take
    raise RejectionBudgetExceeded(
        f"no quadrant-positive bridge in {max_proposals} proposals "
        f"(gamma={p.gamma}, steps={p.steps})"
    )


def sample_walk_proposals(p: MotParams, count, rng=None,
                          start=(0.0, 1.0), end=(0.0, 0.0)):
    """Unconditioned bridges (for calibration and for rejected-walk tests)."""
    if rng is None:
        rng = np.random.default_rng(p.seed)
    return _bridge_batch(p, count, rng, start=start, end=end)


def poisson_partition(t, epsilon, seed=None, rng=None) -> np.ndarray:
    """Durations cut from [0, t] by a rate-1/epsilon Poisson process.

    The part count is (number of Poisson points) + 1 and the parts sum to t
    exactly.
    """
    if t <= 0 or epsilon <= 0:
        raise MatingError("t and epsilon must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    n_points = rng.poisson(t / epsilon)
    cuts = np.sort(rng.uniform(0.0, t, size=n_points))
    knots = np.concatenate(([0.0], cuts, [t]))
    return np.diff(knots)


@dataclass
class CellLengths:
    """Per-cell boundary lengths of the discretized disk.

    The initial cell contributes (l0+, r0-, r0+); each interior cell a
    quadruple (l-, l+, r-, r+); the final cell's lengths are the conserved
    quantities (l_end-, r_end-).  Boundary-cell conventions l0- = 0 and
    l_end+ = r_end+ = 0 are stored as observed deficits: they vanish exactly
    when the walk stays in the quadrant on the first and last parts.
    """

    l0_plus: float
    r0_minus: float
    r0_plus: float
    interior: np.ndarray  # (n, 4) columns l-, l+, r-, r+
    l_end_minus: float
    r_end_minus: float
    first_l_deficit: float = 0.0
    last_l_deficit: float = 0.0
    last_r_deficit: float = 0.0

    @property
    def n_cells(self):
        return len(self.interior) + 2

    def conservation_residual(self):
        """Telescoping identities for the closing lengths."""
        l = self.l0_plus + float(np.sum(self.interior[:, 1] - self.interior[:, 0]))
        r = 1.0 + (self.r0_plus - self.r0_minus) + float(
            np.sum(self.interior[:, 3] - self.interior[:, 2])
        )
        return max(abs(l - self.l_end_minus), abs(r - self.r_end_minus))

    def sn2_margins(self):
        """The 2n+1 strict cone sums (positive iff the constraints hold)."""
        lm = self.interior[:, 0]
        lp = self.interior[:, 1]
        rm = self.interior[:, 2]
        rp = self.interior[:, 3]
        run_l = self.l0_plus + np.concatenate(([0.0], np.cumsum(lp - lm)[:-1]))
        margins = list(run_l - lm)
        run_r = 1.0 + np.concatenate(
            ([0.0], np.cumsum(np.concatenate(([self.r0_plus - self.r0_minus], rp - rm)))[:-1])
        )
        margins.append(1.0 - self.r0_minus)
        margins.extend(run_r[1:] - rm)
        return np.array(margins)

    def sn2_satisfied(self, strict=True):
        """Cone constraints plus the boundary-cell zero conventions.

        The strict sums only see the interior parts; the first part's L dip
        and the last part's dips are covered by the stored deficits, which
        must vanish for the walk to stay in the quadrant.
        """
        margins = self.sn2_margins()
        ok = bool((margins > 0).all()) if strict else bool((margins >= 0).all())
        deficits = (self.first_l_deficit, self.last_l_deficit, self.last_r_deficit)
        return ok and all(d <= 0.0 for d in deficits)

    def degenerate(self):
        """A zero cell side or zero cone margin: probability zero in the
        continuum, a grid artifact here; the partition is resampled."""
        vals = [self.l0_plus, self.r0_minus, self.r0_plus,
                self.l_end_minus, self.r_end_minus]
        if self.interior.size:
            vals.append(float(self.interior.min()))
        return min(vals) <= 0.0 or float(self.sn2_margins().min()) <= 0.0


def _snap_parts_to_grid(walk: ConeWalk, parts):
    """Poisson cut times mapped to interior grid indices (duplicates merged)."""
    parts = np.asarray(parts, dtype=float)
    total = float(parts.sum())
    if abs(total - walk.duration) > 1e-9 * max(1.0, walk.duration):
        raise PartitionMismatch(
            f"parts sum to {total}, walk duration is {walk.duration}"
        )
    cuts = np.cumsum(parts)[:-1]
    n = len(walk.times) - 1
    dt = walk.duration / n
    idx = np.rint(cuts / dt).astype(int)
    idx = np.clip(idx, 1, n - 1)
    idx = np.unique(idx)
    merged = (len(cuts) - len(idx))
    return idx, merged


def extract_cell_lengths(walk: ConeWalk, parts) -> CellLengths:
    """Cell boundary lengths from increments and running infima.

    Part boundaries snap to the walk grid (collisions merge parts and are
    counted by the caller via :func:`_snap_parts_to_grid`).
    """
    idx, _merged = _snap_parts_to_grid(walk, parts)
    return cell_lengths_at(walk, idx)


def cell_lengths_at(walk: ConeWalk, cut_indices) -> CellLengths:
    """Cell lengths with the cuts at the given interior grid indices."""
    L, R = walk.L, walk.R
    n_grid = len(L) - 1
    idx = [0] + [int(i) for i in cut_indices] + [n_grid]
    if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
        raise PartitionMismatch("cut indices must be strictly increasing")
    k1 = idx[1]
    l0p = float(L[k1] - L[0])
    r0m = float(R[0] - R[: k1 + 1].min())
    r0p = float(R[k1] - R[: k1 + 1].min())
    rows = []
    for a, b in zip(idx[1:-2], idx[2:-1]):
        lm = float(L[a] - L[a : b + 1].min())
        lp = float(L[b] - L[a : b + 1].min())
        rm = float(R[a] - R[a : b + 1].min())
        rp = float(R[b] - R[a : b + 1].min())
        rows.append((lm, lp, rm, rp))
    klast = idx[-2]
    interior = np.array(rows, dtype=float).reshape(len(rows), 4)
    return CellLengths(
        l0_plus=l0p,
        r0_minus=r0m,
        r0_plus=r0p,
        interior=interior,
        l_end_minus=float(L[klast] - L[-1]),
        r_end_minus=float(R[klast] - R[-1]),
        first_l_deficit=float(L[0] - L[: k1 + 1].min()),
        last_l_deficit=float(L[-1] - L[klast:].min()),
        last_r_deficit=float(R[-1] - R[klast:].min()),
    )


def build_quilt(cells: CellLengths):
    """Quilt of the cell decomposition; template passes the validity report."""
    return build_quilt_from_cells(cells)


@dataclass
class SimulationResult:
    quilt: object
    cells: CellLengths
    walk: ConeWalk
    provenance: dict


def simulate_discretized_disk(p: MotParams, rng=None) -> SimulationResult:
    """End-to-end pipeline: walk -> Poisson parts -> cell lengths -> quilt.

    Deterministic given (params, seed): all randomness flows from one
    generator seeded by ``p.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(p.seed)
    resamples = 0
    rejections = 0
    cells = None
    for _ in range(200):
        walk = sample_cone_walk(p, rng=rng)
        rejections += walk.rejections
        for _ in range(50):
            parts = poisson_partition(walk.duration, p.epsilon, rng=rng)
            if len(parts) < 2:
                resamples += 1
                continue
            idx, merged = _snap_parts_to_grid(walk, parts)
            candidate = cell_lengths_at(walk, idx)
            if not candidate.degenerate():
                cells = candidate
                break
            resamples += 1
        if cells is not None:
            break
    if cells is None:
        raise RejectionBudgetExceeded("could not draw a nondegenerate partition")
    quilt, collisions = build_quilt(cells)
    provenance = {
        "gamma": p.gamma,
        "epsilon": p.epsilon,
        "steps": p.steps,
        "seed": p.seed,
        "duration": p.duration,
        "rejections": rejections,
        "poisson_parts": int(len(parts)),
        "partition_resamples": int(resamples),
        "snap_merges": int(merged),
        "length_collisions": int(collisions),
    }
    return SimulationResult(quilt=quilt, cells=cells, walk=walk, provenance=provenance)


@dataclass(frozen=True)
class CovarianceReport:
    target: tuple
    empirical: tuple
    max_rel_dev: float


def calibrate_covariance(p: MotParams, n_steps=10_000, rng=None) -> CovarianceReport:
    """Empirical per-step covariance of the increment generator vs target.

    Measured on unconditioned increments: quadrant conditioning reweights
    accepted paths, so the generator, not the accepted ensemble, is what the
    covariance target specifies.
    """
    if rng is None:
        rng = np.random.default_rng(p.seed)
    dt = p.duration / p.steps
    cov = p.variance * dt * np.array([[1.0, p.correlation], [p.correlation, 1.0]])
    chol = np.linalg.cholesky(cov)
    incs = rng.standard_normal((n_steps, 2)) @ chol.T
    emp = (incs.T @ incs) / n_steps
    var_target = p.variance * dt
    cov_target = p.correlation * p.variance * dt
    devs = [
        abs(emp[0, 0] - var_target) / var_target,
        abs(emp[1, 1] - var_target) / var_target,
        abs(emp[0, 1] - cov_target) / var_target,
    ]
    return CovarianceReport(
        target=(var_target, cov_target),
        empirical=(float(emp[0, 0]), float(emp[1, 1]), float(emp[0, 1])),
        max_rel_dev=float(max(devs)),
    )
