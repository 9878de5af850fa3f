"""Quality indicators for sets of objective vectors.

All indicators assume minimization in every objective.  Hypervolume is exact
only (2-D sweep, 3-D slice sweep); higher dimensions raise instead of
silently approximating.  Normalization maps objectives into the unit box so
indicator values are comparable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


# ---------- dominance filtering ----------


def non_dominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of the maximal non-dominated subset.

    A point is kept unless some other point is <= in every objective and <
    in at least one.  Exact duplicates never dominate each other, so every
    copy of a non-dominated point is kept.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D (N, m) array")
    n, m = pts.shape
    if n == 0:
        return np.zeros(0, dtype=bool)
    if m == 2:
        return _non_dominated_mask_2d(pts)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        le = np.all(pts <= pts[i], axis=1)
        lt = np.any(pts < pts[i], axis=1)
        if np.any(le & lt):
            mask[i] = False
    return mask


def _non_dominated_mask_2d(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    mask = np.zeros(pts.shape[0], dtype=bool)
    best_before = np.inf  # min f2 among points with strictly smaller f1
    i = 0
    n = order.size
    while i < n:
        j = i
        x = pts[order[i], 0]
        while j < n and pts[order[j], 0] == x:
            j += 1
        group = order[i:j]  # equal f1, sorted by f2
        group_min = pts[group[0], 1]
        for idx in group:
            y = pts[idx, 1]
            dominated = best_before <= y or y > group_min
            mask[idx] = not dominated
        best_before = min(best_before, group_min)
        i = j
    return mask


def non_dominated_filter(points: np.ndarray) -> np.ndarray:
    """Return the maximal non-dominated subset, preserving input order."""
    pts = np.asarray(points, dtype=float)
    return pts[non_dominated_mask(pts)]


# ---------- hypervolume ----------


def hypervolume(front: np.ndarray, reference: np.ndarray) -> float:
    """Exact hypervolume dominated by `front` up to `reference`.

    Args:
        front: (N, m) objective vectors, m in {2, 3}, minimization.
        reference: point weakly dominated by every front member.

    Returns:
        Lebesgue measure of the union of boxes [point, reference].

    Raises:
        ValueError: on m > 3 (exact computation only), empty front, or a
            front point beyond the reference in any objective.
    """
    pts = np.asarray(front, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("front must be a non-empty 2-D array")
    m = pts.shape[1]
    if ref.shape != (m,):
        raise ValueError("reference dimension mismatch")
    if m not in (2, 3):
        raise ValueError(f"hypervolume supports m in {{2, 3}}, got m={m}")
    if np.any(pts > ref):
        bad = int(np.argmax(np.any(pts > ref, axis=1)))
        raise ValueError(f"front point {pts[bad]} lies beyond the reference {ref}")
    pts = np.unique(pts[non_dominated_mask(pts)], axis=0)
    if m == 2:
        return _hv2(pts, ref)
    return _hv3(pts, ref)


def _hv2(pts: np.ndarray, ref: np.ndarray) -> float:
    # after filtering and dedup, sorting by f1 ascending makes f2 strictly
    # descending; each point owns the strip up to the next point's f1
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    xs = np.append(pts[1:, 0], ref[0])
    return float(np.sum((xs - pts[:, 0]) * (ref[1] - pts[:, 1])))


def _hv3(pts: np.ndarray, ref: np.ndarray) -> float:
    levels = np.unique(pts[:, 2])
    total = 0.0
    for i, z in enumerate(levels):
        upper = levels[i + 1] if i + 1 < levels.size else ref[2]
        active = pts[pts[:, 2] <= z, :2]
        active = active[non_dominated_mask(active)]
        total += _hv2(np.unique(active, axis=0), ref[:2]) * (upper - z)
    return float(total)


# ---------- distance-based indicators ----------


def generational_distance(front: np.ndarray, reference_front: np.ndarray) -> float:
    """Mean Euclidean distance from each front point to its nearest
    reference-front point (0 when the front is a subset of the reference)."""
    f = np.asarray(front, dtype=float)
    r = np.asarray(reference_front, dtype=float)
    if f.ndim != 2 or f.shape[0] == 0:
        raise ValueError("front must be a non-empty 2-D array")
    if r.ndim != 2 or r.shape[0] == 0:
        raise ValueError("reference front must be a non-empty 2-D array")
    diffs = f[:, None, :] - r[None, :, :]
    d = np.sqrt(np.sum(diffs * diffs, axis=2))
    return float(np.mean(np.min(d, axis=1)))


def spread(front: np.ndarray, extremes: np.ndarray) -> float:
    """Deb's spread (Delta) for two objectives.

    Delta = (d_f + d_l + sum_i |d_i - mean|) / (d_f + d_l + (N-1) * mean)
    where d_i are consecutive Euclidean gaps along the front sorted by the
    first objective and d_f, d_l are the distances from the given reference
    extremes to the first and last front point.

    Args:
        front: (N, 2) objective vectors.
        extremes: (2, 2) array; row 0 pairs with the low-f1 end of the
            front, row 1 with the high-f1 end.

    Returns:
        Delta >= 0; a single-point front returns 1.0 by convention.
    """
    f = np.asarray(front, dtype=float)
    ext = np.asarray(extremes, dtype=float)
    if f.ndim != 2 or f.shape[1] != 2:
        raise ValueError("spread is defined for two objectives only")
    if ext.shape != (2, 2):
        raise ValueError("extremes must be a (2, 2) array")
    if f.shape[0] == 0:
        raise ValueError("front must be non-empty")
    order = np.lexsort((f[:, 1], f[:, 0]))
    f = f[order]
    d_f = float(np.linalg.norm(ext[0] - f[0]))
    d_l = float(np.linalg.norm(ext[1] - f[-1]))
    if f.shape[0] == 1:
        return 1.0
    gaps = np.linalg.norm(np.diff(f, axis=0), axis=1)
    mean = float(np.mean(gaps))
    denom = d_f + d_l + (gaps.size) * mean
    if denom == 0.0:  # fully collapsed front sitting on both extremes
        return 0.0
    return float((d_f + d_l + np.sum(np.abs(gaps - mean))) / denom)


def normalize(points: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Affine map of each objective into [0, 1], clamping overshoot.

    Args:
        points: (N, m) objective vectors.
        bounds: (m, 2) per-objective (low, high); high must exceed low.
    """
    pts = np.asarray(points, dtype=float)
    b = np.asarray(bounds, dtype=float)
    if b.shape != (pts.shape[1], 2):
        raise ValueError("bounds must be (m, 2)")
    span = b[:, 1] - b[:, 0]
    if np.any(span <= 0):
        bad = int(np.argmax(span <= 0))
        raise ValueError(f"zero or negative range for objective {bad}")
    return np.clip((pts - b[:, 0]) / span, 0.0, 1.0)


# ---------- distinct critical scenarios ----------


@dataclass(frozen=True)
class DistinctnessPolicy:
    """How to count two critical genomes as the same scenario.

    mode "any-difference": exact unique genome vectors.
    mode "thresholded": a greedy maximal subset in evaluation order where
    every accepted pair differs in at least `min_vars` variables, each by
    more than `epsilon`.
    """

    mode: str = "any-difference"
    min_vars: int = 1
    epsilon: float = 0.0

    def validate(self) -> None:
        if self.mode not in ("any-difference", "thresholded"):
            raise ValueError(f"unknown distinctness mode: {self.mode!r}")
        if self.min_vars < 1:
            raise ValueError("min_vars must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


def distinct_critical(genomes: np.ndarray,
                      policy: DistinctnessPolicy | None = None) -> int:
    """Count distinct critical scenarios among the given genomes."""
    policy = policy or DistinctnessPolicy()
    policy.validate()
    g = np.asarray(genomes, dtype=float)
    if g.size == 0:
        return 0
    if g.ndim != 2:
        raise ValueError("genomes must be a 2-D (N, n) array")
    if policy.mode == "any-difference":
        return int(np.unique(g, axis=0).shape[0])
    accepted: list[np.ndarray] = []
    for row in g:
        ok = True
        for a in accepted:
            if int(np.sum(np.abs(row - a) > policy.epsilon)) < policy.min_vars:
                ok = False
                break
        if ok:
            accepted.append(row)
    return len(accepted)
