"""Continuous-time moving-maximum process with exponentially decaying shape.

The process is the pointwise maximum of Poisson points (intensity
u^-2 du dt) lifted by the shape (-log a) * a^t on t >= 0, normalized to
unit integral so every marginal is unit Frechet.  Between arrivals the path
decays deterministically at rate a per unit time; each arrival that beats
the running envelope creates an upward jump.  Sampling a finite window is
exact: arrivals before the window collapse into a single Frechet envelope,
and arrivals inside it are enumerated in decreasing mark order until no
further point can matter.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .distributions import DecreasingMarkStream, RngState, frechet_sample
from .maxar import Direction, DiscretePath, MaxARParams

__all__ = [
    "ShapeFunction",
    "CadlagPath",
    "simulate_moving_max",
    "simulate_moving_max_reversed",
    "path_value",
    "sample_grid",
]


@dataclass(frozen=True)
class ShapeFunction:
    """Normalized decay shape: forward t -> (-log a) a^t on t >= 0, or its
    time mirror (-log a) a^-t on t < 0; integrates to one either way."""

    a: float
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        a = float(self.a)
        if not (0.0 < a < 1.0):
            raise ValueError("shape decay rate must lie strictly inside (0, 1)")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "direction", Direction(self.direction))

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        rate = -math.log(self.a)
        if self.direction is Direction.FORWARD:
            out = np.where(arr >= 0, rate * self.a ** arr, 0.0)
        else:
            out = np.where(arr < 0, rate * self.a ** (-arr), 0.0)
        return float(out) if arr.ndim == 0 else out


_JUMP_SLACK = 1e-9


@dataclass(frozen=True)
class CadlagPath:
    """Piecewise-exponential cadlag path on a real window.

    The value at the window start is anchor_value; between events the path
    moves deterministically (decay a^dt forward, growth a^-dt reversed) and
    each event (time, new_value) resets the level, jumping up in the
    forward direction and down in the reversed one.  Only max-achieving
    events are stored, so consecutive levels always genuinely jump.
    """

    a: float
    direction: Direction
    window: tuple[float, float]
    anchor_value: float
    events: tuple[tuple[float, float], ...]
    seed: tuple[int, int] | None = None

    def __post_init__(self):
        a = float(self.a)
        if not (0.0 < a <= 1.0):
            raise ValueError("a must lie in (0, 1]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "direction", Direction(self.direction))
        t0, t1 = (float(self.window[0]), float(self.window[1]))
        if not (math.isfinite(t0) and math.isfinite(t1) and t0 < t1):
            raise ValueError("window must be a nondegenerate finite interval")
        object.__setattr__(self, "window", (t0, t1))
        if not (math.isfinite(self.anchor_value) and self.anchor_value > 0):
            raise ValueError("anchor_value must be finite and positive")
        events = tuple((float(tt), float(vv)) for tt, vv in self.events)
        object.__setattr__(self, "events", events)
        prev_t, prev_v = t0, self.anchor_value
        for tt, vv in events:
            if not (prev_t < tt < t1):
                raise ValueError("event times must increase strictly inside "
                                 "the window")
            if not (math.isfinite(vv) and vv > 0):
                raise ValueError("event values must be finite and positive")
            if self.direction is Direction.FORWARD:
                reached = prev_v * a ** (tt - prev_t)
                if vv <= reached * (1.0 - _JUMP_SLACK):
                    raise ValueError("forward events must jump upward")
            else:
                reached = prev_v * a ** (-(tt - prev_t))
                if vv >= reached * (1.0 + _JUMP_SLACK):
                    raise ValueError("reversed events must jump downward")
            prev_t, prev_v = tt, vv

    @property
    def event_times(self) -> np.ndarray:
        return np.array([t for t, _ in self.events])

    def value(self, t: float) -> float:
        return path_value(self, t)


def path_value(path: CadlagPath, t: float) -> float:
    """Value at time t in the window; right-continuous at events, with the
    window end evaluated as a left limit (no event ever sits there)."""
    t = float(t)
    t0, t1 = path.window
    if not (t0 <= t <= t1):
        raise ValueError(f"t={t} outside window [{t0}, {t1}]")
    times = [tt for tt, _ in path.events]
    k = bisect_right(times, t)
    if k == 0:
        base_t, base_v = t0, path.anchor_value
    else:
        base_t, base_v = path.events[k - 1]
    if path.direction is Direction.FORWARD:
        return base_v * path.a ** (t - base_t)
    return base_v * path.a ** (-(t - base_t))


def _simulate_envelope(a: float, length: float, rng: RngState):
    """Anchor value and max-achieving events of the forward process on
    [0, length].  Returns (anchor, [(time, value)]) with the stream of
    decreasing marks stopped once no later point can alter the window."""
    anchor = frechet_sample(rng)
    rate = -math.log(a)
    marks = DecreasingMarkStream(total_intensity=length)
    # visible records (time, peak); the anchor acts as a record at time 0
    records: list[tuple[float, float]] = [(0.0, anchor)]

    def window_min() -> float:
        worst = math.inf
        for j, (tj, vj) in enumerate(records):
            t_next = records[j + 1][0] if j + 1 < len(records) else length
            worst = min(worst, vj * a ** (t_next - tj))
        return worst

    floor = window_min()
    while True:
        peak = rate * marks.next_mark(rng)
        if peak <= floor:
            return anchor, records[1:]
        t_new = length * rng.uniform()
        idx = bisect_right([t for t, _ in records], t_new)
        prev_t, prev_v = records[idx - 1]
        if peak <= prev_v * a ** (t_new - prev_t):
            continue  # arrival below the envelope: no effect on the max
        while idx < len(records):
            t_next, v_next = records[idx]
            if v_next <= peak * a ** (t_next - t_new):
                records.pop(idx)
            else:
                break
        records.insert(idx, (t_new, peak))
        floor = window_min()


def simulate_moving_max(a: float, length: float, rng: RngState) -> CadlagPath:
    """Exact draw of the moving-maximum process on the window [0, length].

    Arrivals before time 0 contribute a single collapsed envelope whose
    height at 0 is unit Frechet, which is drawn directly; arrivals inside
    the window are enumerated in decreasing mark order with a certified
    stopping rule.  a = 1 is the constant member of the family; a = 0 has
    no continuous-time counterpart (independent values at every real time
    admit no measurable cadlag version) and is rejected.
    """
    a = float(a)
    length = float(length)
    if not (math.isfinite(length) and length > 0):
        raise ValueError("length must be finite and positive")
    if a == 0.0:
        raise ValueError(
            "a = 0 has no continuous-time member: the limit would need "
            "independent values at every real time; use the discrete chain")
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    seed = (rng.seed, rng.stream)
    if a == 1.0:
        return CadlagPath(a, Direction.FORWARD, (0.0, length),
                          frechet_sample(rng), (), seed)
    anchor, events = _simulate_envelope(a, length, rng)
    return CadlagPath(a, Direction.FORWARD, (0.0, length), anchor,
                      tuple(events), seed)


def simulate_moving_max_reversed(a: float, length: float,
                                 rng: RngState) -> CadlagPath:
    """Exact draw of the time reversal on [0, length].

    Simulates the forward window and maps t to length - t taking left
    limits, which keeps the result cadlag: segments grow at rate a^-1 and
    events jump down to the forward pre-jump level.
    """
    a = float(a)
    if a == 1.0:
        warnings.warn("reversing the constant member returns the forward "
                      "path", stacklevel=2)
        return simulate_moving_max(a, length, rng)
    forward = simulate_moving_max(a, length, rng)
    t0, t1 = forward.window
    anchor = path_value(forward, t1)
    events = []
    prev_t, prev_v = t0, forward.anchor_value
    pre_jump = []
    for tt, vv in forward.events:
        pre_jump.append((tt, prev_v * a ** (tt - prev_t)))
        prev_t, prev_v = tt, vv
    for tt, low in reversed(pre_jump):
        events.append((t1 - tt, low))
    return CadlagPath(a, Direction.REVERSED, (0.0, t1 - t0), anchor,
                      tuple(events), forward.seed)


def sample_grid(path: CadlagPath, epsilon: float) -> DiscretePath:
    """Skeleton of the path on the grid {k * epsilon}, as a discrete chain.

    The skeleton of the moving-maximum process is exactly the stationary
    max-AR(1) chain with parameter a**epsilon, in the matching direction;
    the returned path carries those parameters.  A grid point landing on
    the window end uses the left-limit value there.
    """
    epsilon = float(epsilon)
    t0, t1 = path.window
    if not (0.0 < epsilon <= t1 - t0):
        raise ValueError("epsilon must lie in (0, window length]")
    count = int(math.floor((t1 - t0) / epsilon + 1e-9)) + 1
    grid = t0 + epsilon * np.arange(count)
    grid[-1] = min(grid[-1], t1)
    times = np.array([tt for tt, _ in path.events])
    levels = np.array([vv for _, vv in path.events])
    idx = np.searchsorted(times, grid, side="right")
    base_t = np.where(idx > 0, times[idx - 1] if times.size else 0.0, t0)
    base_v = np.where(idx > 0, levels[idx - 1] if levels.size else 0.0,
                      path.anchor_value)
    if path.direction is Direction.FORWARD:
        values = base_v * path.a ** (grid - base_t)
    else:
        values = base_v * path.a ** (-(grid - base_t))
    params = MaxARParams(path.a ** epsilon, path.direction)
    return DiscretePath(0, values, params, path.seed)
