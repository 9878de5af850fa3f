"""Experiment harness: reproducible comparisons and falsification campaigns.

Configs are flat key-value text files with dotted section names (see
README for the schema).  Every experiment derives per-repetition seeds as
base_seed + repetition index and writes deterministic artifacts: rerunning
the same config produces byte-identical files.  Wall-clock timings are
printed to the console only, never persisted, to keep outputs reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path

import numpy as np
from scipy.stats import mannwhitneyu

from . import indicators, scenario
from .arx import ArxConfig
from .falsify import (SignalParam, benchmark_sut, falsification_stats, falsify,
                      format_stats_row, random_baseline)
from .guidance import DtConfig, nsga2_dt
from .search import EvaluationArchive, SearchConfig, evolve
from .stl import Formula, format_requirement, parse_requirement

ALPHA = 0.05


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


# ---------- flat config files ----------


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `section.key = value` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


class _Cfg:
    """Typed access with consumption tracking so unknown keys are rejected."""

    def __init__(self, raw: dict[str, str]):
        self.raw = raw
        self.used: set[str] = set()

    def _take(self, key: str) -> str | None:
        if key in self.raw:
            self.used.add(key)
            return self.raw[key]
        return None

    def str_(self, key: str, default: str) -> str:
        v = self._take(key)
        return default if v is None else v

    def int_(self, key: str, default: int) -> int:
        v = self._take(key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected integer, got {v!r}") from exc

    def float_(self, key: str, default: float) -> float:
        v = self._take(key)
        if v is None:
            return default
        try:
            return float(v)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected number, got {v!r}") from exc

    def floats_(self, key: str, default: tuple[float, ...]) -> tuple[float, ...]:
        v = self._take(key)
        if v is None:
            return default
        try:
            return tuple(float(p) for p in v.split(","))
        except ValueError as exc:
            raise ConfigError(f"{key}: expected comma-separated numbers, got {v!r}") from exc

    def reject_unknown(self) -> None:
        unknown = sorted(set(self.raw) - self.used)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; built from a config file plus CLI
    overrides, then validated before any simulation runs."""

    kind: str = "compare"
    budget: int = 1000
    repetitions: int = 10
    base_seed: int = 1
    sim_cost_s: float = 1.0  # per-simulation cost used for time estimates
    sim: scenario.SimConfig = field(default_factory=scenario.SimConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    dt: DtConfig = field(default_factory=DtConfig)
    policy: indicators.DistinctnessPolicy = field(
        default_factory=indicators.DistinctnessPolicy)
    # falsification experiments
    system: str = "lti2"
    requirement: Formula | None = None
    signal: SignalParam = field(default_factory=SignalParam)
    real_budget: int = 300
    surrogate_budget: int = 300
    arx: ArxConfig = field(default_factory=ArxConfig)
    method: str = "anneal"
    n_initial: int = 2

    def validate(self) -> None:
        if self.kind not in ("compare", "falsify"):
            raise ConfigError(f"unknown experiment kind: {self.kind!r}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        try:
            if self.kind == "compare":
                self._validate_compare()
            else:
                self._validate_falsify()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def _validate_compare(self) -> None:
        self.sim.validate()
        self.search.validate()
        self.dt.validate()
        self.policy.validate()
        pop = self.search.population
        if self.budget < 2 * pop:
            raise ConfigError(f"budget {self.budget} below two populations of {pop}")
        if self.budget % pop:
            raise ConfigError(
                f"budget {self.budget} is not a multiple of the population {pop}; "
                "both algorithms must get the same real-evaluation budget")
        if self.dt.budget != self.budget:
            raise ConfigError(
                f"unequal budgets: search {self.budget} vs tree-guided {self.dt.budget}")
        if self.budget < 4:
            raise ConfigError("budget too small for quarter-budget snapshots")

    def _validate_falsify(self) -> None:
        if self.requirement is None:
            raise ConfigError("falsify experiments need falsify.requirement")
        self.signal.validate()
        if self.real_budget < 1 or self.surrogate_budget < 1:
            raise ConfigError("falsification budgets must be >= 1")
        if self.method not in ("anneal", "random"):
            raise ConfigError(f"unknown falsification method: {self.method!r}")
        if self.n_initial < 1:
            raise ConfigError("n_initial must be >= 1")
        benchmark_sut(self.system, np.zeros(3))  # rejects unknown system names

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = _Cfg(parse_config_text(text))
        kind = cfg.str_("experiment.kind", "compare")
        self = cls(kind=kind)
        self.budget = cfg.int_("experiment.budget", self.budget)
        self.repetitions = cfg.int_("experiment.repetitions", self.repetitions)
        self.base_seed = cfg.int_("experiment.base_seed", self.base_seed)
        self.sim_cost_s = cfg.float_("experiment.sim_cost_s", self.sim_cost_s)

        d = scenario.SimConfig()
        bounds = (cfg.floats_("sim.bounds_v0c", d.input_bounds[0]),
                  cfg.floats_("sim.bounds_v0p", d.input_bounds[1]),
                  cfg.floats_("sim.bounds_t_wait", d.input_bounds[2]))
        for b in bounds:
            if len(b) != 2:
                raise ConfigError("sim bounds need exactly two numbers (low, high)")
        occluder = cfg.floats_("sim.occluder", d.occluder)
        if len(occluder) != 4:
            raise ConfigError("sim.occluder needs four numbers (x0, y0, x1, y1)")
        ped_start = cfg.floats_("sim.ped_start", d.ped_start)
        if len(ped_start) != 2:
            raise ConfigError("sim.ped_start needs two numbers (x, y)")
        self.sim = scenario.SimConfig(
            dt=cfg.float_("sim.dt", d.dt),
            horizon=cfg.float_("sim.horizon", d.horizon),
            ego_length=cfg.float_("sim.ego_length", d.ego_length),
            ego_width=cfg.float_("sim.ego_width", d.ego_width),
            spot_x=cfg.float_("sim.spot_x", d.spot_x),
            comfort_decel=cfg.float_("sim.comfort_decel", d.comfort_decel),
            max_decel=cfg.float_("sim.max_decel", d.max_decel),
            occluder=occluder,
            ped_start=ped_start,
            sensor_range=cfg.float_("sim.sensor_range", d.sensor_range),
            sensor_half_angle=cfg.float_("sim.sensor_half_angle", d.sensor_half_angle),
            corridor_half_width=cfg.float_("sim.corridor_half_width",
                                           d.corridor_half_width),
            brake_margin=cfg.float_("sim.brake_margin", d.brake_margin),
            theta1=cfg.float_("sim.theta1", d.theta1),
            theta2=cfg.float_("sim.theta2", d.theta2),
            input_bounds=bounds,
        )

        s = SearchConfig()
        self.search = SearchConfig(
            population=cfg.int_("search.population", s.population),
            generations=0,  # derived from the budget at run time
            crossover_prob=cfg.float_("search.crossover_prob", s.crossover_prob),
            crossover_index=cfg.float_("search.crossover_index", s.crossover_index),
            mutation_index=cfg.float_("search.mutation_index", s.mutation_index),
        )
        mut = cfg._take("search.mutation_prob")
        if mut is not None:
            try:
                self.search.mutation_prob = float(mut)
            except ValueError as exc:
                raise ConfigError("search.mutation_prob: expected number") from exc

        g = DtConfig()
        self.dt = DtConfig(
            budget=self.budget,
            initial_lhs=cfg.int_("dt.initial_lhs", g.initial_lhs),
            region_threshold=cfg.float_("dt.region_threshold", g.region_threshold),
            max_depth=cfg.int_("dt.max_depth", g.max_depth),
            min_samples_leaf=cfg.int_("dt.min_samples_leaf", g.min_samples_leaf),
            search=SearchConfig(
                population=cfg.int_("dt.population", g.search.population),
                generations=cfg.int_("dt.generations", g.search.generations),
                crossover_prob=self.search.crossover_prob,
                crossover_index=self.search.crossover_index,
                mutation_prob=self.search.mutation_prob,
                mutation_index=self.search.mutation_index,
            ),
        )

        self.policy = indicators.DistinctnessPolicy(
            mode=cfg.str_("distinct.mode", "any-difference"),
            min_vars=cfg.int_("distinct.min_vars", 1),
            epsilon=cfg.float_("distinct.epsilon", 0.0),
        )

        self.system = cfg.str_("falsify.system", self.system)
        req = cfg._take("falsify.requirement")
        if req is not None:
            try:
                self.requirement = parse_requirement(req)
            except ValueError as exc:
                raise ConfigError(f"falsify.requirement: {exc}") from exc
        self.real_budget = cfg.int_("falsify.real_budget", self.real_budget)
        self.surrogate_budget = cfg.int_("falsify.surrogate_budget",
                                         self.surrogate_budget)
        self.method = cfg.str_("falsify.method", self.method)
        self.n_initial = cfg.int_("falsify.n_initial", self.n_initial)
        self.arx = ArxConfig(na=cfg.int_("falsify.arx_na", 2),
                             nb=cfg.int_("falsify.arx_nb", 2),
                             nk=cfg.int_("falsify.arx_nk", 2))

        p = SignalParam()
        self.signal = SignalParam(
            control_points=cfg.int_("signal.control_points", p.control_points),
            interpolation=cfg.str_("signal.interpolation", p.interpolation),
            lower=cfg.float_("signal.lower", 0.0),
            upper=cfg.float_("signal.upper", 1.0),
            horizon=cfg.float_("signal.horizon", p.horizon),
            period=cfg.float_("signal.period", p.period),
            channels=cfg.int_("signal.channels", p.channels),
            mode=cfg.str_("signal.mode", p.mode),
        )
        cfg.reject_unknown()
        self.validate()
        return self

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text)


@dataclass
class RunRecord:
    """In-memory record of one completed run.  `wall_time_s` is printed but
    never persisted (outputs must be byte-identical across reruns)."""

    run_id: str
    algorithm: str
    seed: int
    archive_path: str
    snapshot_path: str
    wall_time_s: float
    summary: dict


# ---------- indicator snapshots against a shared reference ----------


@dataclass
class _Reference:
    bounds: np.ndarray
    front: np.ndarray  # normalized reference front
    extremes: np.ndarray | None
    point: np.ndarray


def _build_reference(objective_sets: list[np.ndarray]) -> _Reference:
    allobj = np.vstack(objective_sets)
    m = allobj.shape[1]
    lo = allobj.min(axis=0)
    hi = allobj.max(axis=0)
    hi = np.where(hi - lo <= 0, lo + 1.0, hi)
    bounds = np.stack([lo, hi], axis=1)
    front = indicators.normalize(indicators.non_dominated_filter(allobj), bounds)
    extremes = None
    if m == 2:
        order = np.lexsort((front[:, 1], front[:, 0]))
        extremes = np.stack([front[order[0]], front[order[-1]]])
    return _Reference(bounds=bounds, front=front, extremes=extremes,
                      point=np.full(m, 1.01))


def _indicators_at(archive: EvaluationArchive, count: int, ref: _Reference,
                   policy: indicators.DistinctnessPolicy) -> dict:
    objs = archive.objective_array()[:count]
    front = indicators.non_dominated_filter(objs)
    norm = indicators.normalize(front, ref.bounds)
    m = objs.shape[1]
    hv = indicators.hypervolume(norm, ref.point) if m in (2, 3) else float("nan")
    gd = indicators.generational_distance(norm, ref.front)
    sp = (indicators.spread(norm, ref.extremes)
          if ref.extremes is not None else float("nan"))
    crit = archive.critical_array()[:count]
    distinct = indicators.distinct_critical(
        archive.genome_array()[:count][crit], policy)
    return {"hv": hv, "gd": gd, "spread": sp, "distinct_critical": distinct}


def _write_snapshots(path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("run_id,stage,evaluations,hv,gd,spread,distinct_critical\n")
        for r in rows:
            fh.write(",".join([
                r["run_id"], r["stage"], str(r["evaluations"]),
                repr(r["hv"]), repr(r["gd"]), repr(r["spread"]),
                str(r["distinct_critical"]),
            ]) + "\n")


def emit_plots(snapshot_rows: list[dict], path) -> None:
    """Long-format plot data: algorithm,repetition,evaluations,metric,value."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("algorithm,repetition,evaluations,metric,value\n")
        for r in snapshot_rows:
            for metric in ("hv", "gd", "spread", "distinct_critical"):
                fh.write(",".join([
                    r["algorithm"], str(r["repetition"]), str(r["evaluations"]),
                    metric, repr(float(r[metric])),
                ]) + "\n")


# ---------- compare experiment ----------


def _compare_aggregate(tagged: list[tuple[str, dict]], quarter: int) -> dict:
    """Cross-repetition medians, ratio and rank-sum test over per-run
    (algorithm, summary) pairs.  Shared by run_compare and replay so the
    emitted aggregate can be recomputed verbatim from the archives."""
    def pick(tag: str, key: str) -> list:
        return [s[key] for algorithm, s in tagged if algorithm == tag]

    plain = pick("nsga2", "distinct_critical")
    guided = pick("nsga2dt", "distinct_critical")
    med_plain = float(np.median(plain))
    med_guided = float(np.median(guided))
    ratio = med_guided / med_plain if med_plain > 0 else None
    if len(plain) >= 2 and (np.ptp(plain + guided) > 0):
        pvalue = float(mannwhitneyu(guided, plain, alternative="two-sided").pvalue)
    else:
        pvalue = None
    return {
        "distinct_critical_median": {"nsga2": med_plain, "nsga2dt": med_guided},
        "distinct_critical_ratio": ratio,
        "ranksum_pvalue": pvalue,
        "alpha": ALPHA,
        "significant": bool(pvalue is not None and pvalue < ALPHA),
        "hv_at_quarter_budget_median": {
            "nsga2": float(np.median(pick("nsga2", "hv_at_quarter_budget"))),
            "nsga2dt": float(np.median(pick("nsga2dt", "hv_at_quarter_budget"))),
        },
        "quarter_budget_evaluations": quarter,
    }


def run_compare(config: ExperimentConfig, out_dir, *, quiet: bool = False) -> dict:
    """Equal-budget comparison of the plain and tree-guided searches.

    Writes per-run archive CSVs, cross-referenced indicator snapshots,
    long-format plot data, per-iteration region reports and report.json.
    Returns the report dictionary.
    """
    config.validate()
    if config.kind != "compare":
        raise ConfigError("run_compare needs a compare-kind config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    space = scenario.search_space(config.sim)
    evaluator = scenario.make_evaluator(config.sim)
    generations = config.budget // config.search.population - 1

    runs: list[dict] = []  # algorithm, repetition, seed, archive, checkpoints
    region_reports: list[dict] = []
    records: list[RunRecord] = []
    for rep in range(config.repetitions):
        seed = config.base_seed + rep
        base_cfg = replace(config.search, generations=generations, seed=seed)
        t0 = time.perf_counter()
        _, archive = evolve(space, base_cfg, evaluator, run_id=rep)
        dt_base = time.perf_counter() - t0
        pop = config.search.population
        checkpoints = [("g%02d" % g, pop * (g + 1)) for g in range(generations + 1)]
        runs.append({"algorithm": "nsga2", "repetition": rep, "seed": seed,
                     "archive": archive, "checkpoints": checkpoints,
                     "wall": dt_base})

        dt_cfg = replace(config.dt, seed=seed)
        dt_cfg.search = replace(config.dt.search)
        t0 = time.perf_counter()
        result = nsga2_dt(space, evaluator, dt_cfg)
        dt_guided = time.perf_counter() - t0
        checkpoints = []
        for stage in result.stages:
            label = stage.kind if stage.region_index is None else (
                f"{stage.kind}{stage.region_index:02d}")
            for g, count in enumerate(stage.checkpoints):
                checkpoints.append((f"it{stage.iteration:02d}:{label}:g{g:02d}", count))
        runs.append({"algorithm": "nsga2dt", "repetition": rep, "seed": seed,
                     "archive": result.archive, "checkpoints": checkpoints,
                     "wall": dt_guided})
        region_reports.append({"repetition": rep, "seed": seed,
                               "iterations": result.iterations})
        if not quiet:
            print(f"rep {rep}: nsga2 {len(archive)} evals ({dt_base:.1f}s), "
                  f"nsga2dt {len(result.archive)} evals ({dt_guided:.1f}s)")

    ref = _build_reference([r["archive"].objective_array() for r in runs])
    quarter = config.budget // 4

    snapshot_rows: list[dict] = []
    for r in runs:
        run_id = f"{r['algorithm']}-r{r['repetition']:02d}"
        archive: EvaluationArchive = r["archive"]
        archive_path = out / f"archive_{run_id}.csv"
        archive.to_csv(archive_path)
        for stage, count in r["checkpoints"]:
            vals = _indicators_at(archive, count, ref, config.policy)
            snapshot_rows.append({"run_id": run_id, "algorithm": r["algorithm"],
                                  "repetition": r["repetition"], "stage": stage,
                                  "evaluations": count, **vals})
        final = _indicators_at(archive, len(archive), ref, config.policy)
        at_quarter = _indicators_at(archive, quarter, ref, config.policy)
        r["summary"] = {
            "evaluations": len(archive),
            "distinct_critical": final["distinct_critical"],
            "final_hv": final["hv"], "final_gd": final["gd"],
            "final_spread": final["spread"],
            "hv_at_quarter_budget": at_quarter["hv"],
            "estimated_execution_time_s": len(archive) * config.sim_cost_s,
        }
        records.append(RunRecord(
            run_id=run_id, algorithm=r["algorithm"], seed=r["seed"],
            archive_path=str(archive_path),
            snapshot_path=str(out / "snapshots.csv"),
            wall_time_s=r["wall"], summary=r["summary"]))

    snap_path = out / "snapshots.csv"
    _write_snapshots(snap_path, snapshot_rows)
    emit_plots(snapshot_rows, out / "plots.csv")
    with open(out / "regions.json", "w", encoding="utf-8") as fh:
        json.dump(region_reports, fh, indent=2, sort_keys=True)

    aggregate = _compare_aggregate(
        [(r["algorithm"], r["summary"]) for r in runs], quarter)
    report = {
        "kind": "compare",
        "budget": config.budget,
        "repetitions": config.repetitions,
        "base_seed": config.base_seed,
        "population": config.search.population,
        "generations": generations,
        "distinctness": {"mode": config.policy.mode,
                         "min_vars": config.policy.min_vars,
                         "epsilon": config.policy.epsilon},
        "runs": [{"run_id": rec.run_id, "algorithm": rec.algorithm,
                  "seed": rec.seed, "repetition": run["repetition"],
                  "archive_csv": Path(rec.archive_path).name,
                  "snapshots_csv": Path(rec.snapshot_path).name,
                  "summary": rec.summary}
                 for run, rec in zip(runs, records)],
        "aggregate": aggregate,
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    if not quiet:
        med = aggregate["distinct_critical_median"]
        ratio, pvalue = (aggregate["distinct_critical_ratio"],
                         aggregate["ranksum_pvalue"])
        print(f"distinct critical medians: nsga2 {med['nsga2']:g}, "
              f"nsga2dt {med['nsga2dt']:g} (ratio "
              f"{'undefined' if ratio is None else format(ratio, '.2f')}, "
              f"p {'n/a' if pvalue is None else format(pvalue, '.4g')})")
        print(f"wall time total {sum(rec.wall_time_s for rec in records):.1f}s "
              f"(not persisted)")
    return report


# ---------- falsification experiment ----------


def run_falsify(config: ExperimentConfig, out_dir, *, quiet: bool = False) -> dict:
    """Repeated falsification trials with derived seeds; writes per-trial
    JSONL round logs, the FR/mean/median stats table and report.json."""
    config.validate()
    if config.kind != "falsify":
        raise ConfigError("run_falsify needs a falsify-kind config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sut = partial(benchmark_sut, config.system)
    results = []
    t0 = time.perf_counter()
    for trial in range(config.repetitions):
        seed = config.base_seed + trial
        if config.method == "random":
            res = random_baseline(sut, config.requirement, config.signal,
                                  real_budget=config.real_budget, seed=seed)
        else:
            res = falsify(sut, config.requirement, config.signal,
                          real_budget=config.real_budget,
                          surrogate_budget=config.surrogate_budget,
                          arx=config.arx, optimizer=config.method,
                          n_initial=config.n_initial, seed=seed)
        results.append(res)
        with open(out / f"trial_{trial:02d}.jsonl", "w", encoding="utf-8") as fh:
            for r in res.rounds:
                fh.write(json.dumps({
                    "round": r.round,
                    "surrogate_residual": r.surrogate_residual,
                    "best_surrogate_robustness": r.best_surrogate_robustness,
                    "real_robustness": r.real_robustness,
                }, sort_keys=True) + "\n")
        if not quiet:
            print(f"trial {trial}: {'falsified' if res.falsified else 'exhausted'} "
                  f"after {res.real_simulations} real simulations")
    wall = time.perf_counter() - t0

    stats = falsification_stats(results)
    req_text = format_requirement(config.requirement)
    with open(out / "stats.csv", "w", encoding="utf-8") as fh:
        fh.write("requirement,FR,mean,median\n")
        fh.write(format_stats_row(f"{config.system}: {req_text}", stats) + "\n")
    report = {
        "kind": "falsify",
        "system": config.system,
        "requirement": req_text,
        "method": config.method,
        "real_budget": config.real_budget,
        "surrogate_budget": config.surrogate_budget,
        "repetitions": config.repetitions,
        "base_seed": config.base_seed,
        "trials": [{"trial": i, "seed": config.base_seed + i,
                    "falsified": r.falsified,
                    "real_simulations": r.real_simulations}
                   for i, r in enumerate(results)],
        "stats": {"FR": stats.fr, "mean": stats.mean_sims,
                  "median": stats.median_sims},
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    if not quiet:
        print(f"FR {stats.fr}/{stats.trials}; wall time {wall:.1f}s (not persisted)")
    return report


# ---------- scoring and replay ----------


def score_archive(archive_path) -> dict:
    """Final indicators of one archive, scored against itself (its own
    objective ranges and final non-dominated front)."""
    archive = EvaluationArchive.from_csv(archive_path)
    if len(archive) == 0:
        raise ConfigError(f"archive {archive_path} is empty")
    ref = _build_reference([archive.objective_array()])
    vals = _indicators_at(archive, len(archive), ref,
                          indicators.DistinctnessPolicy())
    return {"evaluations": len(archive), **vals}


def replay(out_dir, *, quiet: bool = False) -> bool:
    """Recompute aggregate summaries from the persisted archives and check
    them against report.json.  Returns True when everything matches."""
    out = Path(out_dir)
    report_path = out / "report.json"
    if not report_path.exists():
        raise ConfigError(f"no report.json under {out_dir}")
    with open(report_path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    ok = True
    if report.get("kind") == "compare":
        archives = {r["run_id"]: EvaluationArchive.from_csv(out / r["archive_csv"])
                    for r in report["runs"]}
        policy = indicators.DistinctnessPolicy(**report["distinctness"])
        ref = _build_reference([a.objective_array() for a in archives.values()])
        quarter = report["budget"] // 4
        tagged: list[tuple[str, dict]] = []
        for r in report["runs"]:
            archive = archives[r["run_id"]]
            final = _indicators_at(archive, len(archive), ref, policy)
            at_q = _indicators_at(archive, quarter, ref, policy)
            expect = r["summary"]
            got = {
                "evaluations": len(archive),
                "distinct_critical": final["distinct_critical"],
                "final_hv": final["hv"], "final_gd": final["gd"],
                "final_spread": final["spread"],
                "hv_at_quarter_budget": at_q["hv"],
            }
            tagged.append((r["algorithm"], got))
            for key, val in got.items():
                if expect.get(key) != val:
                    ok = False
                    if not quiet:
                        print(f"mismatch {r['run_id']}.{key}: "
                              f"report {expect.get(key)} vs recomputed {val}")
        aggregate = _compare_aggregate(tagged, quarter)
        emitted = report.get("aggregate", {})
        for key, val in aggregate.items():
            if emitted.get(key) != val:
                ok = False
                if not quiet:
                    print(f"mismatch aggregate.{key}: report {emitted.get(key)} "
                          f"vs recomputed {val}")
    elif report.get("kind") == "falsify":
        sims_when_falsified: list[int] = []
        for t in report["trials"]:
            path = out / f"trial_{t['trial']:02d}.jsonl"
            with open(path, "r", encoding="utf-8") as fh:
                rows = [json.loads(line) for line in fh if line.strip()]
            falsified = bool(rows) and rows[-1]["real_robustness"] < 0
            if falsified:
                sims_when_falsified.append(len(rows))
            if len(rows) != t["real_simulations"] or falsified != t["falsified"]:
                ok = False
                if not quiet:
                    print(f"mismatch trial {t['trial']}: log has {len(rows)} "
                          f"simulations, falsified={falsified}")
        stats = {
            "FR": len(sims_when_falsified),
            "mean": (float(np.mean(sims_when_falsified))
                     if sims_when_falsified else None),
            "median": (float(np.median(sims_when_falsified))
                       if sims_when_falsified else None),
        }
        emitted = report.get("stats", {})
        for key, val in stats.items():
            if emitted.get(key) != val:
                ok = False
                if not quiet:
                    print(f"mismatch stats.{key}: report {emitted.get(key)} "
                          f"vs recomputed {val}")
    else:
        raise ConfigError(f"report kind {report.get('kind')!r} not replayable")
    if not quiet:
        print("replay OK" if ok else "replay found mismatches")
    return ok
