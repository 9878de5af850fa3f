"""Decision-tree-guided multi-objective scenario search.

Alternates between fitting a CART classifier that separates critical from
non-critical evaluations and running focused NSGA-II searches inside the
tree's critical leaf boxes.  The archive of real evaluations is shared
across all stages and is the budget ledger: the loop never starts a region
run that would push the archive past the real-evaluation budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import indicators
from .search import (EvaluationArchive, Evaluator, Individual, SearchConfig,
                     SearchSpace, evolve, lhs_sample, non_dominated_sort)


# ---------- CART ----------


@dataclass
class TreeNode:
    n_total: int
    n_critical: int
    depth: int
    feature: int | None = None  # None marks a leaf
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def critical_fraction(self) -> float:
        return self.n_critical / self.n_total if self.n_total else 0.0


def _gini(n_pos: float, n: float) -> float:
    if n <= 0:
        return 0.0
    p = n_pos / n
    return 2.0 * p * (1.0 - p)


def _best_split(x: np.ndarray, y: np.ndarray,
                min_leaf: int) -> tuple[float, int, float] | None:
    """Best (gain, feature, threshold); thresholds are midpoints between
    consecutive distinct sorted feature values.  Ties resolve to the lowest
    feature index, then the lowest threshold (first strict improvement wins).
    """
    n, d = x.shape
    parent = _gini(float(y.sum()), float(n)) * n
    best: tuple[float, int, float] | None = None
    for f in range(d):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        pos = np.cumsum(ys)
        total_pos = pos[-1]
        # split after position i puts i+1 samples left
        counts = np.arange(1, n)
        left_pos = pos[:-1]
        impurity = (2.0 * left_pos * (counts - left_pos) / counts
                    + 2.0 * (total_pos - left_pos)
                    * ((n - counts) - (total_pos - left_pos)) / (n - counts))
        valid = (xs[1:] > xs[:-1]) & (counts >= min_leaf) & (n - counts >= min_leaf)
        if not np.any(valid):
            continue
        gains = np.where(valid, parent - impurity, -np.inf)
        i = int(np.argmax(gains))  # first max = lowest threshold on ties
        gain = float(gains[i])
        if gain <= 1e-12:
            continue
        thr = 0.5 * (xs[i] + xs[i + 1])
        if best is None or gain > best[0] + 1e-12:
            best = (gain, f, float(thr))
    return best


def fit_tree(x: np.ndarray, y: np.ndarray, max_depth: int = 5,
             min_samples_leaf: int = 5) -> TreeNode:
    """Fit a CART classifier on critical labels with Gini impurity.

    Args:
        x: (N, d) genomes.
        y: (N,) boolean criticality labels.
        max_depth: maximum split depth (root at depth 0).
        min_samples_leaf: minimum samples on each side of a split.

    Returns:
        Root TreeNode; every node records its sample and critical counts.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=bool)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("need a non-empty 2-D sample matrix")
    if y.shape != (x.shape[0],):
        raise ValueError("label length mismatch")
    if max_depth < 0 or min_samples_leaf < 1:
        raise ValueError("invalid tree parameters")

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        node = TreeNode(n_total=int(idx.size), n_critical=int(y[idx].sum()),
                        depth=depth)
        if (depth >= max_depth or idx.size < 2 * min_samples_leaf
                or node.n_critical in (0, node.n_total)):
            return node
        split = _best_split(x[idx], y[idx].astype(float), min_samples_leaf)
        if split is None:
            return node
        _, f, thr = split
        node.feature = f
        node.threshold = thr
        mask = x[idx, f] <= thr
        node.left = build(idx[mask], depth + 1)
        node.right = build(idx[~mask], depth + 1)
        return node

    return build(np.arange(x.shape[0]), 0)


def predict_critical(tree: TreeNode, x: np.ndarray) -> np.ndarray:
    """Majority-label prediction per row (fraction >= 0.5 counts critical)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty(x.shape[0], dtype=bool)
    for i, row in enumerate(x):
        node = tree
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        out[i] = node.critical_fraction >= 0.5
    return out


# ---------- region extraction ----------


@dataclass(frozen=True)
class CriticalRegion:
    lower: np.ndarray
    upper: np.ndarray
    n_critical: int
    n_total: int

    @property
    def critical_fraction(self) -> float:
        return self.n_critical / self.n_total if self.n_total else 0.0

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def as_space(self, names=None) -> SearchSpace:
        return SearchSpace(self.lower.copy(), self.upper.copy(), names)


def leaf_boxes(tree: TreeNode, space: SearchSpace) -> list[tuple[TreeNode, np.ndarray, np.ndarray]]:
    """All leaves with their boxes (path constraints meet the space box),
    in left-to-right traversal order."""
    out: list[tuple[TreeNode, np.ndarray, np.ndarray]] = []

    def walk(node: TreeNode, lo: np.ndarray, hi: np.ndarray) -> None:
        if node.is_leaf:
            out.append((node, lo, hi))
            return
        hi_l = hi.copy()
        hi_l[node.feature] = min(hi_l[node.feature], node.threshold)
        lo_r = lo.copy()
        lo_r[node.feature] = max(lo_r[node.feature], node.threshold)
        walk(node.left, lo, hi_l)
        walk(node.right, lo_r, hi)

    walk(tree, space.lower.copy(), space.upper.copy())
    return out


def extract_regions(tree: TreeNode, space: SearchSpace,
                    min_fraction: float = 0.5) -> list[CriticalRegion]:
    """Critical leaf boxes: fraction >= min_fraction with >= 1 critical
    member, ordered by descending critical fraction (stable on ties)."""
    regions = [CriticalRegion(lo, hi, leaf.n_critical, leaf.n_total)
               for leaf, lo, hi in leaf_boxes(tree, space)
               if leaf.n_critical >= 1 and leaf.critical_fraction >= min_fraction]
    regions.sort(key=lambda r: -r.critical_fraction)
    return regions


# ---------- guided search loop ----------


@dataclass
class DtConfig:
    """Budgeted tree-guided search parameters."""

    budget: int = 1000  # total real evaluations, hard cap
    initial_lhs: int = 100
    region_threshold: float = 0.5
    max_depth: int = 5
    min_samples_leaf: int = 5
    search: SearchConfig = field(
        default_factory=lambda: SearchConfig(population=20, generations=4))
    seed: int = 0

    def validate(self) -> None:
        if self.initial_lhs < 1:
            raise ValueError("initial_lhs must be >= 1")
        if self.budget < self.initial_lhs:
            raise ValueError(
                f"budget {self.budget} smaller than initial sample {self.initial_lhs}")
        if not 0.0 < self.region_threshold <= 1.0:
            raise ValueError("region_threshold must lie in (0, 1]")
        self.search.validate()


@dataclass
class StageRecord:
    """One budget-consuming stage; checkpoints are archive lengths at the
    initial population and after each generation (a single checkpoint for
    sampling stages)."""

    kind: str  # "init" | "region" | "global"
    iteration: int
    region_index: int | None
    start: int
    end: int
    checkpoints: list[int]
    box: tuple | None = None
    critical_fraction: float | None = None


@dataclass
class IndicatorSnapshot:
    stage: str
    evaluations: int
    hv: float
    gd: float
    spread: float
    distinct_critical: int


@dataclass
class DtResult:
    archive: EvaluationArchive
    regions: list[CriticalRegion]  # from the final refit
    stages: list[StageRecord]
    iterations: list[dict]  # per outer iteration: regions + evaluation spend
    snapshots: list[IndicatorSnapshot]


def _seed_individuals(archive: EvaluationArchive, region: CriticalRegion,
                      limit: int) -> list[Individual]:
    inside = [i for i, g in enumerate(archive.genomes) if region.contains(g)]
    if not inside:
        return []
    objs = np.asarray([archive.objectives[i] for i in inside])
    ranks = np.empty(len(inside), dtype=int)
    for rank, front in enumerate(non_dominated_sort(objs)):
        ranks[front] = rank
    order = sorted(range(len(inside)), key=lambda j: (ranks[j], inside[j]))
    picked = [inside[j] for j in order[:limit]]
    return [Individual(genome=archive.genomes[i].copy(),
                       objectives=archive.objectives[i].copy(),
                       critical=archive.critical[i],
                       eval_index=i) for i in picked]


def self_referenced_snapshots(archive: EvaluationArchive,
                              stages: list[StageRecord],
                              policy: indicators.DistinctnessPolicy | None = None,
                              ) -> list[IndicatorSnapshot]:
    """Indicator time series over archive prefixes at every checkpoint,
    normalized against the archive's own objective ranges and scored against
    its own final non-dominated front (reference point 1.01 per objective)."""
    objs = archive.objective_array()
    m = objs.shape[1]
    lo = objs.min(axis=0)
    hi = objs.max(axis=0)
    hi = np.where(hi - lo <= 0, lo + 1.0, hi)  # guard degenerate ranges
    bounds = np.stack([lo, hi], axis=1)
    ref_front = indicators.normalize(indicators.non_dominated_filter(objs), bounds)
    ref_point = np.full(m, 1.01)
    order = np.lexsort((ref_front[:, 1], ref_front[:, 0])) if m == 2 else None
    extremes = (np.stack([ref_front[order[0]], ref_front[order[-1]]])
                if m == 2 else None)
    genomes = archive.genome_array()
    critical = archive.critical_array()
    snaps: list[IndicatorSnapshot] = []
    for stage in stages:
        label = stage.kind if stage.region_index is None else (
            f"{stage.kind}{stage.region_index:02d}")
        for g, count in enumerate(stage.checkpoints):
            front = indicators.non_dominated_filter(objs[:count])
            norm = indicators.normalize(front, bounds)
            hv = indicators.hypervolume(norm, ref_point) if m in (2, 3) else float("nan")
            gd = indicators.generational_distance(norm, ref_front)
            sp = indicators.spread(norm, extremes) if m == 2 else float("nan")
            crit_rows = genomes[:count][critical[:count]]
            snaps.append(IndicatorSnapshot(
                stage=f"it{stage.iteration:02d}:{label}:g{g:02d}",
                evaluations=count,
                hv=hv, gd=gd, spread=sp,
                distinct_critical=indicators.distinct_critical(crit_rows, policy),
            ))
    return snaps


def nsga2_dt(space: SearchSpace, evaluator: Evaluator,
             config: DtConfig | None = None) -> DtResult:
    """Tree-guided search under a hard real-evaluation budget.

    One outer iteration: fit a tree on the full archive, extract critical
    regions, and run one focused NSGA-II per region (highest critical
    fraction first), seeding each run with archive members already inside
    the region box (fittest first by dominance rank, then oldest) topped up
    by LHS.  Seeded members are reused without re-simulation.  When no
    region qualifies, one whole-space run seeded the same way keeps the
    optimization moving.  The loop stops when the budget is exhausted or
    the next run would overshoot it.

    Returns:
        DtResult with the shared archive, final regions, stage records,
        per-iteration region reports and self-referenced indicator
        snapshots at every stage checkpoint.
    """
    config = config or DtConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)
    archive = EvaluationArchive()
    stages: list[StageRecord] = []
    iterations: list[dict] = []

    def spend_lhs(n: int, kind: str, iteration: int) -> None:
        start = len(archive)
        for genome in lhs_sample(space, n, rng):
            objs, critical = evaluator(genome)
            archive.append(genome, np.asarray(objs, dtype=float), critical,
                           run_id=len(stages))
        stages.append(StageRecord(kind=kind, iteration=iteration,
                                  region_index=None, start=start,
                                  end=len(archive), checkpoints=[len(archive)]))

    spend_lhs(config.initial_lhs, "init", 0)

    pop = config.search.population
    gens = config.search.generations
    regions: list[CriticalRegion] = []
    iteration = 0
    while True:
        iteration += 1
        tree = fit_tree(archive.genome_array(), archive.critical_array(),
                        config.max_depth, config.min_samples_leaf)
        regions = extract_regions(tree, space, config.region_threshold)
        report = {"iteration": iteration,
                  "regions": [{"lower": r.lower.tolist(),
                               "upper": r.upper.tolist(),
                               "n_critical": r.n_critical,
                               "n_total": r.n_total,
                               "critical_fraction": r.critical_fraction}
                              for r in regions],
                  "evaluations_before": len(archive),
                  "region_runs": 0}
        iterations.append(report)
        if regions:
            runs = list(enumerate(regions))
        else:
            # no leaf qualified: fall back to one whole-space run seeded
            # from the fittest archive members so the budget keeps working
            whole = CriticalRegion(
                lower=space.lower.copy(), upper=space.upper.copy(),
                n_critical=int(archive.critical_array().sum()),
                n_total=len(archive))
            runs = [(None, whole)]
        stopped = False
        ran_any = False
        for r_idx, region in runs:
            seeds = _seed_individuals(archive, region, pop)
            cost = (pop - len(seeds)) + pop * gens
            if len(archive) + cost > config.budget:
                stopped = True
                break
            start = len(archive)
            run_cfg = replace(config.search,
                              seed=int(rng.integers(2 ** 63 - 1)))
            evolve(region.as_space(space.names), run_cfg, evaluator,
                   seeds=seeds, archive=archive, run_id=len(stages))
            checkpoints = [start + (pop - len(seeds))]
            for g in range(gens):
                checkpoints.append(checkpoints[0] + (g + 1) * pop)
            stages.append(StageRecord(
                kind="region" if r_idx is not None else "global",
                iteration=iteration, region_index=r_idx,
                start=start, end=len(archive), checkpoints=checkpoints,
                box=(region.lower.tolist(), region.upper.tolist()),
                critical_fraction=region.critical_fraction))
            if r_idx is not None:
                report["region_runs"] += 1
            ran_any = True
        if stopped or not ran_any:
            break

    # final refit so the reported regions reflect every evaluation made
    tree = fit_tree(archive.genome_array(), archive.critical_array(),
                    config.max_depth, config.min_samples_leaf)
    regions = extract_regions(tree, space, config.region_threshold)
    snapshots = self_referenced_snapshots(archive, stages)
    return DtResult(archive=archive, regions=regions, stages=stages,
                    iterations=iterations, snapshots=snapshots)
