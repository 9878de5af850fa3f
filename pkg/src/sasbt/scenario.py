"""Deterministic parking-lot scenario simulator.

The ego car drives along the +x lane (y = 0) toward a parking spot,
comfort-braking as it nears the spot.  A pedestrian waits behind a parked
car (an occluding rectangle between the lane and the sidewalk), then crosses
the lane straight down -y.  The ego perceives the pedestrian only when the
line of sight from its front-bumper center is not blocked by the occluder
and the pedestrian is within sensor range and half-angle; once a detected
pedestrian is inside the threat corridor and closer than the emergency
braking envelope, the ego brakes at full deceleration until stopped.

Everything is plain Euler integration at a fixed step, with no randomness,
so a given input always produces the identical trace.  Two fitnesses grade a
trace: f1 = minimum distance from the pedestrian to the ego front-bumper
segment over the run, f2 = ego speed at the (earliest) sample achieving that
minimum.  A scenario is critical when f1 <= theta1 and f2 >= theta2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .search import SearchSpace

DEFAULT_INPUT_BOUNDS = ((1.0, 12.0), (0.5, 3.0), (0.0, 8.0))
INPUT_NAMES = ("v0c", "v0p", "t_wait")


@dataclass(frozen=True)
class ScenarioInput:
    """Search-controlled scenario parameters."""

    v0c: float  # ego initial speed, m/s
    v0p: float  # pedestrian walking speed, m/s
    t_wait: float  # pedestrian wait before crossing, s

    def as_array(self) -> np.ndarray:
        return np.array([self.v0c, self.v0p, self.t_wait], dtype=float)

    @classmethod
    def from_array(cls, genome) -> "ScenarioInput":
        v0c, v0p, t_wait = (float(v) for v in genome)
        return cls(v0c, v0p, t_wait)


@dataclass(frozen=True)
class SimConfig:
    """Fixed world geometry, dynamics and criticality thresholds."""

    dt: float = 0.01  # integration step, s
    horizon: float = 10.0  # simulated time, s
    ego_length: float = 4.5  # m
    ego_width: float = 1.8  # m
    spot_x: float = 45.0  # parking-spot position of the front bumper, m
    comfort_decel: float = 3.0  # parking approach deceleration, m/s^2
    max_decel: float = 6.0  # emergency braking deceleration, m/s^2
    occluder: tuple[float, float, float, float] = (15.0, 1.2, 22.8, 4.2)
    ped_start: tuple[float, float] = (23.0, 4.6)
    sensor_range: float = 25.0  # m
    sensor_half_angle: float = math.pi / 4  # rad, about the +x heading
    corridor_half_width: float = 1.0  # threat corridor around the lane, m
    brake_margin: float = 2.0  # added to the braking distance, m
    theta1: float = 0.2  # criticality threshold on f1, m
    theta2: float = 1.0  # criticality threshold on f2, m/s
    input_bounds: tuple[tuple[float, float], ...] = DEFAULT_INPUT_BOUNDS

    def validate(self) -> None:
        for name in ("dt", "horizon", "ego_length", "ego_width",
                     "comfort_decel", "max_decel", "sensor_range",
                     "corridor_half_width"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        x0, y0, x1, y1 = self.occluder
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate occluder rectangle: {self.occluder}")
        if not 0.0 < self.sensor_half_angle < math.pi / 2:
            raise ValueError("sensor_half_angle must lie in (0, pi/2)")
        if self.brake_margin < 0:
            raise ValueError("brake_margin must be >= 0")


@dataclass
class SimulationTrace:
    """Sampled run: arrays share one length = horizon/dt + 1."""

    t: np.ndarray
    ego_x: np.ndarray
    ego_y: np.ndarray
    ego_v: np.ndarray
    ped_x: np.ndarray
    ped_y: np.ndarray
    detected: np.ndarray  # bool, instantaneous perception flag

    def __len__(self) -> int:
        return self.t.size


@dataclass(frozen=True)
class FitnessVector:
    f1: float  # min pedestrian-to-bumper distance, m
    f2: float  # ego speed at that minimum, m/s
    critical: bool


# ---------- perception geometry ----------


def _segment_crosses_rect(x1: float, y1: float, x2: float, y2: float,
                          rect: tuple[float, float, float, float]) -> bool:
    """True iff the segment passes through the OPEN rectangle interior.

    Grazing along an edge or touching a corner does not count.  Uses
    Liang-Barsky clipping with strict inequalities.
    """
    rx0, ry0, rx1, ry1 = rect
    dx = x2 - x1
    dy = y2 - y1
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x1 - rx0), (dx, rx1 - x1), (-dy, y1 - ry0), (dy, ry1 - y1)):
        if p == 0.0:
            if q <= 0.0:  # parallel and on or outside this boundary
                return False
        else:
            r = q / p
            if p < 0.0:
                if r > t0:
                    t0 = r
            else:
                if r < t1:
                    t1 = r
    return t0 < t1


def _detects(ego_x: float, ego_y: float, ped_x: float, ped_y: float,
             cfg: SimConfig, tan_half: float) -> bool:
    dx = ped_x - ego_x
    dy = ped_y - ego_y
    if dx * dx + dy * dy > cfg.sensor_range * cfg.sensor_range:
        return False
    if dx < 0.0 or abs(dy) > dx * tan_half:
        if not (dx == 0.0 and dy == 0.0):  # coincident point: trivially seen
            return False
    return not _segment_crosses_rect(ego_x, ego_y, ped_x, ped_y, cfg.occluder)


# ---------- simulation ----------


def _check_bounds(inp: ScenarioInput, cfg: SimConfig) -> None:
    for name, value, (lo, hi) in zip(INPUT_NAMES, inp.as_array(), cfg.input_bounds):
        if not lo <= value <= hi:
            raise ValueError(f"{name}={value} outside bounds [{lo}, {hi}]")


def simulate(inp: ScenarioInput, cfg: SimConfig | None = None) -> SimulationTrace:
    """Run the scenario for the full horizon (never truncated early).

    Args:
        inp: scenario parameters; validated against cfg.input_bounds.
        cfg: world configuration (defaults used when omitted).

    Returns:
        SimulationTrace with horizon/dt + 1 samples at step dt.

    Raises:
        ValueError: out-of-bounds input (message names the offending field)
            or invalid configuration.
    """
    cfg = cfg or SimConfig()
    cfg.validate()
    _check_bounds(inp, cfg)

    n_steps = int(round(cfg.horizon / cfg.dt))
    if n_steps < 1 or abs(n_steps * cfg.dt - cfg.horizon) > 1e-9 * max(1.0, cfg.horizon):
        raise ValueError(f"horizon {cfg.horizon} is not a multiple of dt {cfg.dt}")
    tan_half = math.tan(cfg.sensor_half_angle)
    half_corridor = cfg.corridor_half_width
    px0, py0 = cfg.ped_start

    t_arr = np.empty(n_steps + 1)
    ex_arr = np.empty(n_steps + 1)
    ev_arr = np.empty(n_steps + 1)
    py_arr = np.empty(n_steps + 1)
    det_arr = np.empty(n_steps + 1, dtype=bool)

    x = 0.0  # front-bumper x; lane keeps ego_y = 0
    v = inp.v0c
    emergency = False
    dt = cfg.dt
    for k in range(n_steps + 1):
        t = k * dt
        py = py0 - inp.v0p * (t - inp.t_wait) if t > inp.t_wait else py0
        detected = _detects(x, 0.0, px0, py, cfg, tan_half)
        t_arr[k] = t
        ex_arr[k] = x
        ev_arr[k] = v
        py_arr[k] = py
        det_arr[k] = detected
        if k == n_steps:
            break
        # choose deceleration for [t, t + dt)
        if not emergency and detected and abs(py) <= half_corridor:
            gap = px0 - x
            if 0.0 <= gap <= v * v / (2.0 * cfg.max_decel) + cfg.brake_margin:
                emergency = True
        if emergency:
            a = cfg.max_decel
        elif cfg.spot_x - x <= v * v / (2.0 * cfg.comfort_decel):
            a = cfg.comfort_decel
        else:
            a = 0.0
        x += v * dt
        v = max(0.0, v - a * dt)

    return SimulationTrace(
        t=t_arr,
        ego_x=ex_arr,
        ego_y=np.zeros(n_steps + 1),
        ego_v=ev_arr,
        ped_x=np.full(n_steps + 1, px0),
        ped_y=py_arr,
        detected=det_arr,
    )


# ---------- fitness ----------


def bumper_distances(trace: SimulationTrace, cfg: SimConfig) -> np.ndarray:
    """Per-sample distance from the pedestrian point to the ego
    front-bumper segment (the lateral segment of length ego_width)."""
    dx = trace.ped_x - trace.ego_x
    dy = np.maximum(np.abs(trace.ped_y - trace.ego_y) - cfg.ego_width / 2.0, 0.0)
    return np.hypot(dx, dy)


def fitness(trace: SimulationTrace, cfg: SimConfig | None = None) -> FitnessVector:
    """Grade a trace: (f1, f2) and the criticality flag.

    The minimum is resolved to the earliest sample achieving it, so f2 is
    well defined even for flat minima.
    """
    cfg = cfg or SimConfig()
    d = bumper_distances(trace, cfg)
    i = int(np.argmin(d))  # argmin returns the first occurrence
    f1 = float(d[i])
    f2 = float(trace.ego_v[i])
    return FitnessVector(f1=f1, f2=f2, critical=f1 <= cfg.theta1 and f2 >= cfg.theta2)


def evaluate_input(inp: ScenarioInput, cfg: SimConfig | None = None) -> FitnessVector:
    cfg = cfg or SimConfig()
    return fitness(simulate(inp, cfg), cfg)


def search_space(cfg: SimConfig | None = None) -> SearchSpace:
    """Decision-variable box matching the configured input bounds."""
    cfg = cfg or SimConfig()
    bounds = np.asarray(cfg.input_bounds, dtype=float)
    return SearchSpace(lower=bounds[:, 0], upper=bounds[:, 1], names=INPUT_NAMES)


def make_evaluator(cfg: SimConfig | None = None):
    """Evaluator for the search core: genome -> ((f1, -f2), critical).

    f2 is negated because the search minimizes every objective while the
    scenario hunt wants minimum miss distance at maximum speed.
    """
    cfg = cfg or SimConfig()

    def _evaluate(genome: np.ndarray) -> tuple[np.ndarray, bool]:
        fv = evaluate_input(ScenarioInput.from_array(genome), cfg)
        return np.array([fv.f1, -fv.f2]), fv.critical

    return _evaluate


# ---------- export ----------


def trace_to_csv(trace: SimulationTrace, path) -> None:
    """Write the trace as t,ego_x,ego_y,ego_v,ped_x,ped_y,detected rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,ego_x,ego_y,ego_v,ped_x,ped_y,detected\n")
        for k in range(len(trace)):
            fh.write(",".join([
                repr(float(trace.t[k])),
                repr(float(trace.ego_x[k])),
                repr(float(trace.ego_y[k])),
                repr(float(trace.ego_v[k])),
                repr(float(trace.ped_x[k])),
                repr(float(trace.ped_y[k])),
                "1" if trace.detected[k] else "0",
            ]) + "\n")
