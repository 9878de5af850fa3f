"""Multi-objective evolutionary search core.

Implements the NSGA-II machinery used by both the plain scenario search and
the decision-tree-guided variant: Latin Hypercube initialization, fast
non-dominated sorting, crowding distance, binary tournament selection,
simulated binary crossover (SBX) and polynomial mutation, plus an append-only
archive of every real evaluation made during a run.

All randomness flows through a single :class:`numpy.random.Generator` seeded
from the config, so identical configs reproduce identical archives bit for
bit.  Objectives are always minimized; callers that want to maximize a
quantity negate it in their evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Evaluator = Callable[[np.ndarray], tuple[np.ndarray, bool]]
"""Maps a genome to (objective vector, criticality flag). Must be pure."""


# ---------- search space ----------


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box of real-valued decision variables."""

    lower: np.ndarray
    upper: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower/upper must be 1-D arrays of equal length")
        if not np.all(lo < hi):
            bad = int(np.argmin(hi - lo))
            raise ValueError(f"empty range in dimension {bad}: [{lo[bad]}, {hi[bad]}]")

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x: np.ndarray, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass
class SearchConfig:
    """Knobs for one NSGA-II run."""

    population: int = 40
    generations: int = 24
    crossover_prob: float = 0.6
    crossover_index: float = 15.0
    mutation_prob: float | None = None  # default 1/n, filled at run time
    mutation_index: float = 20.0
    seed: int = 0

    def validate(self) -> None:
        if self.population < 2 or self.population % 2:
            raise ValueError(f"population must be even and >= 2, got {self.population}")
        if self.generations < 0:
            raise ValueError(f"generations must be >= 0, got {self.generations}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob outside [0, 1]: {self.crossover_prob}")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob outside [0, 1]: {self.mutation_prob}")


# ---------- individuals and archive ----------


@dataclass
class Individual:
    genome: np.ndarray
    objectives: np.ndarray
    critical: bool
    eval_index: int  # position in the archive; also the determinism tie-break
    rank: int = 0
    crowding: float = 0.0


@dataclass
class EvaluationArchive:
    """Append-only log of every real evaluation.

    Rows are recorded in evaluation order; `eval_index` of an individual is
    its row number here.  The archive is the single source of truth for
    budget accounting and for all post-hoc indicator computation.
    """

    genomes: list[np.ndarray] = field(default_factory=list)
    objectives: list[np.ndarray] = field(default_factory=list)
    critical: list[bool] = field(default_factory=list)
    run_ids: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.genomes)

    def append(self, genome: np.ndarray, objectives: np.ndarray, critical: bool,
               run_id: int) -> int:
        self.genomes.append(np.asarray(genome, dtype=float).copy())
        self.objectives.append(np.asarray(objectives, dtype=float).copy())
        self.critical.append(bool(critical))
        self.run_ids.append(int(run_id))
        return len(self.genomes) - 1

    def genome_array(self) -> np.ndarray:
        return np.asarray(self.genomes, dtype=float)

    def objective_array(self) -> np.ndarray:
        return np.asarray(self.objectives, dtype=float)

    def critical_array(self) -> np.ndarray:
        return np.asarray(self.critical, dtype=bool)

    def to_csv(self, path) -> None:
        """Write rows as run_id,eval_index,g0..,o0..,critical."""
        with open(path, "w", encoding="utf-8") as fh:
            if len(self) == 0:
                fh.write("run_id,eval_index,critical\n")
                return
            n = self.genomes[0].size
            m = self.objectives[0].size
            cols = (["run_id", "eval_index"]
                    + [f"g{i}" for i in range(n)]
                    + [f"o{j}" for j in range(m)]
                    + ["critical"])
            fh.write(",".join(cols) + "\n")
            for idx in range(len(self)):
                row = ([str(self.run_ids[idx]), str(idx)]
                       + [repr(float(v)) for v in self.genomes[idx]]
                       + [repr(float(v)) for v in self.objectives[idx]]
                       + ["1" if self.critical[idx] else "0"])
                fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "EvaluationArchive":
        archive = cls()
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            g_cols = [i for i, c in enumerate(header) if c.startswith("g")]
            o_cols = [i for i, c in enumerate(header) if c.startswith("o")]
            for line in fh:
                parts = line.strip().split(",")
                if not parts or parts == [""]:
                    continue
                archive.genomes.append(np.array([float(parts[i]) for i in g_cols]))
                archive.objectives.append(np.array([float(parts[i]) for i in o_cols]))
                archive.critical.append(parts[-1] == "1")
                archive.run_ids.append(int(parts[0]))
        return archive


# ---------- sampling ----------


def lhs_sample(space: SearchSpace, k: int,
               seed: int | np.random.Generator = 0) -> np.ndarray:
    """Latin Hypercube sample of k points inside the space.

    Each dimension is split into k equal strata; every stratum receives
    exactly one point, placed uniformly at random within it.

    Args:
        space: box to sample.
        k: number of samples, >= 1.
        seed: integer seed or an existing Generator to draw from.

    Returns:
        (k, dim) array of samples.
    """
    if k < 1:
        raise ValueError(f"sample count must be >= 1, got {k}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = np.empty((k, space.dim))
    for d in range(space.dim):
        strata = rng.permutation(k)
        jitter = rng.random(k)
        unit = (strata + jitter) / k
        out[:, d] = space.lower[d] + unit * (space.upper[d] - space.lower[d])
    return out


# ---------- dominance machinery ----------


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """Pareto dominance for minimization: a <= b everywhere, < somewhere."""
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Partition points into fronts F0, F1, ... by repeated non-domination.

    Args:
        objectives: (N, m) objective matrix, minimization.

    Returns:
        List of index arrays; fronts partition range(N), and no point in a
        front dominates another point of the same front.
    """
    objs = np.asarray(objectives, dtype=float)
    if objs.ndim != 2:
        raise ValueError("objectives must be a 2-D (N, m) array")
    n = objs.shape[0]
    # pairwise dominance matrix: dom[i, j] true iff i dominates j
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dom = le & lt
    n_dominators = dom.sum(axis=0)
    fronts: list[np.ndarray] = []
    remaining = np.arange(n)
    counts = n_dominators.copy()
    while remaining.size:
        mask = counts[remaining] == 0
        front = remaining[mask]
        if front.size == 0:  # cannot happen with a strict partial order
            raise RuntimeError("dominance relation is not acyclic")
        fronts.append(front)
        remaining = remaining[~mask]
        for i in front:
            counts[dom[i]] -= 1
    return fronts


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Crowding distance within one front (boundary points get +inf).

    For every objective the front is sorted; interior points accumulate the
    normalized gap between their neighbours, and objectives with zero range
    contribute nothing.
    """
    objs = np.asarray(objectives, dtype=float)
    n, m = objs.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        order = np.argsort(objs[:, j], kind="stable")
        lo, hi = objs[order[0], j], objs[order[-1], j]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = hi - lo
        if span <= 0.0:
            continue
        gaps = (objs[order[2:], j] - objs[order[:-2], j]) / span
        dist[order[1:-1]] += gaps
    return dist


def assign_rank_and_crowding(population: list[Individual]) -> list[np.ndarray]:
    objs = np.asarray([ind.objectives for ind in population])
    fronts = non_dominated_sort(objs)
    for rank, front in enumerate(fronts):
        crowd = crowding_distance(objs[front])
        for local, idx in enumerate(front):
            population[idx].rank = rank
            population[idx].crowding = float(crowd[local])
    return fronts


def environmental_selection(population: list[Individual], n: int) -> list[Individual]:
    """Pick the n survivors: whole fronts in rank order, boundary front by
    descending crowding (ties by ascending eval_index)."""
    fronts = assign_rank_and_crowding(population)
    chosen: list[Individual] = []
    for front in fronts:
        members = [population[i] for i in front]
        if len(chosen) + len(members) <= n:
            chosen.extend(members)
        else:
            members.sort(key=lambda ind: (-ind.crowding, ind.eval_index))
            chosen.extend(members[: n - len(chosen)])
            break
    return chosen


def _beats(a: Individual, b: Individual) -> bool:
    if a.rank != b.rank:
        return a.rank < b.rank
    if a.crowding != b.crowding:
        return a.crowding > b.crowding
    return a.eval_index < b.eval_index


def _tournament(rng: np.random.Generator, population: list[Individual]) -> Individual:
    i = int(rng.integers(len(population)))
    j = int(rng.integers(len(population)))
    a, b = population[i], population[j]
    return a if _beats(a, b) else b


# ---------- variation operators ----------


def _sbx_pair(rng: np.random.Generator, p1: np.ndarray, p2: np.ndarray,
              prob: float, index: float) -> tuple[np.ndarray, np.ndarray]:
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() > prob:
        return c1, c2
    for d in range(p1.size):
        if rng.random() > 0.5:
            continue
        x1, x2 = p1[d], p2[d]
        if abs(x1 - x2) < 1e-14:
            continue
        u = rng.random()
        if u <= 0.5:
            beta = (2.0 * u) ** (1.0 / (index + 1.0))
        else:
            beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (index + 1.0))
        c1[d] = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2)
        c2[d] = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)
    return c1, c2


def _polynomial_mutation(rng: np.random.Generator, x: np.ndarray,
                         space: SearchSpace, prob: float, index: float) -> np.ndarray:
    y = x.copy()
    for d in range(x.size):
        if rng.random() > prob:
            continue
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u) ** (1.0 / (index + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (index + 1.0))
        y[d] = x[d] + delta * (space.upper[d] - space.lower[d])
    return y


# ---------- main loop ----------


def evolve(space: SearchSpace, config: SearchConfig, evaluator: Evaluator, *,
           seeds: Sequence[Individual] | None = None,
           archive: EvaluationArchive | None = None,
           run_id: int = 0) -> tuple[list[Individual], EvaluationArchive]:
    """Run one NSGA-II search and log every evaluation.

    The initial population is Latin-Hypercube sampled; `seeds` (already
    evaluated individuals, e.g. archive members inside a region) are reused
    as-is without re-simulation, and the population is topped up by LHS.
    Each generation evaluates exactly `population` fresh offspring, so a run
    without seeds appends population x (generations + 1) archive rows.

    Args:
        space: decision-variable box; offspring are clamped into it.
        config: NSGA-II parameters; `mutation_prob` defaults to 1/dim.
        evaluator: pure map genome -> (objectives, critical).
        seeds: optional pre-evaluated individuals to include in generation 0.
        archive: optional shared archive to append into (created if None).
        run_id: tag recorded with every appended row.

    Returns:
        (final population, archive).
    """
    config.validate()
    if archive is None:
        archive = EvaluationArchive()
    rng = np.random.default_rng(config.seed)
    pm = config.mutation_prob if config.mutation_prob is not None else 1.0 / space.dim

    def evaluate(genome: np.ndarray) -> Individual:
        objs, critical = evaluator(genome)
        objs = np.asarray(objs, dtype=float)
        idx = archive.append(genome, objs, critical, run_id)
        return Individual(genome.copy(), objs, bool(critical), idx)

    population: list[Individual] = []
    if seeds:
        if len(seeds) > config.population:
            raise ValueError("more seeds than population slots")
        population.extend(seeds)
    n_new = config.population - len(population)
    if n_new > 0:
        for genome in lhs_sample(space, n_new, rng):
            population.append(evaluate(genome))
    assign_rank_and_crowding(population)

    for _ in range(config.generations):
        offspring: list[Individual] = []
        while len(offspring) < config.population:
            pa = _tournament(rng, population)
            pb = _tournament(rng, population)
            c1, c2 = _sbx_pair(rng, pa.genome, pb.genome,
                               config.crossover_prob, config.crossover_index)
            for child in (c1, c2):
                if len(offspring) >= config.population:
                    break
                mutated = _polynomial_mutation(rng, child, space, pm,
                                               config.mutation_index)
                offspring.append(evaluate(space.clip(mutated)))
        population = environmental_selection(population + offspring,
                                             config.population)
    return population, archive
