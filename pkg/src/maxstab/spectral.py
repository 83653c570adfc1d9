"""Spectral representations of the max-AR(1) family.

A max-stable process on the integers can be written as the pointwise max of
points of a Poisson process scaled by i.i.d. copies of a nonnegative
spectral process Y with unit means.  Three samplers are provided:

* ``constant``: Y is identically 1 (fully dependent process, a = 1),
* ``dirac``: Y is a single spike at a random index (independence, a = 0),
* ``decay``: Y decays geometrically from a random onset index, which is a
  spectral process of the stationary max-AR(1) chain for that decay rate.

The spike/onset index is drawn from a mixing mass function on the integers;
the 1/mass weight makes every coordinate mean exactly one when the mass
charges all of them.  The module also evaluates the exponent measure of
rectangle events in closed form and builds exact finite-window draws of the
max-stable process by a stopped decreasing-mark construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distributions import DecreasingMarkStream, RngState

__all__ = [
    "IndexedPath",
    "GeometricMixing",
    "FiniteMixing",
    "SamplerKind",
    "SpectralSampler",
    "ConeKind",
    "ConeSpec",
    "SpectralBoundError",
    "sample_spectral",
    "spectral_mean",
    "spectral_bound",
    "cone_member",
    "ExponentFunctional",
    "exponent_rectangle",
    "dehaan_max_stable",
    "shift",
]


class SpectralBoundError(RuntimeError):
    """A spectral draw exceeded the bound certified by the caller."""


@dataclass(frozen=True)
class IndexedPath:
    """Finite nonnegative function on consecutive integers."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("values must be finite and nonnegative")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", int(self.start))

    @property
    def times(self) -> np.ndarray:
        return self.start + np.arange(self.values.size)

    def value_at(self, t: int) -> float:
        k = int(t) - self.start
        if not 0 <= k < self.values.size:
            raise ValueError(f"index {t} outside [{self.start}, "
                             f"{self.start + self.values.size - 1}]")
        return float(self.values[k])


def shift(path: IndexedPath, s: int) -> IndexedPath:
    """Time shift: the result g satisfies g(t) = path(t + s)."""
    return IndexedPath(path.start - int(s), path.values)


@dataclass(frozen=True)
class GeometricMixing:
    """Two-sided geometric mass on all integers, p(n) proportional to
    ratio**|n|.  Strictly positive everywhere with closed-form tails."""

    ratio: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError("ratio must lie strictly inside (0, 1)")

    @property
    def center_mass(self) -> float:
        return (1.0 - self.ratio) / (1.0 + self.ratio)

    def pmf(self, n: int) -> float:
        return self.center_mass * self.ratio ** abs(int(n))

    def sample(self, rng: RngState, size: int | None = None):
        """Inverse transform using exactly one uniform per draw.

        The uniform is split into (zero / sign / magnitude) pieces whose
        lengths reproduce p(n) exactly.
        """
        u = np.atleast_1d(np.asarray(rng.uniform(size), dtype=np.float64))
        c = self.center_mass
        out = np.zeros(u.size, dtype=np.int64)
        active = u > c
        if np.any(active):
            w = (u[active] - c) / (1.0 - c)
            sign = np.where(w < 0.5, 1, -1)
            w_mag = np.where(w < 0.5, 2.0 * w, 2.0 * w - 1.0)
            with np.errstate(divide="ignore"):
                k = np.ceil(np.log1p(-w_mag) / math.log(self.ratio))
            k = np.maximum(k, 1.0).astype(np.int64)
            out[active] = sign * k
        if size is None:
            return int(out[0])
        return out


@dataclass(frozen=True)
class FiniteMixing:
    """Strictly positive mass on a finite set of integers (normalized)."""

    weights: tuple[tuple[int, float], ...]

    def __post_init__(self):
        items = [(int(n), float(w)) for n, w in
                 (self.weights.items() if isinstance(self.weights, dict)
                  else self.weights)]
        if not items:
            raise ValueError("weights must be nonempty")
        items.sort()
        indices = [n for n, _ in items]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate indices in weights")
        total = sum(w for _, w in items)
        if not math.isfinite(total) or total <= 0 or any(w <= 0 for _, w in items):
            raise ValueError("weights must be positive with a positive finite sum")
        object.__setattr__(
            self, "weights", tuple((n, w / total) for n, w in items))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.weights)

    def pmf(self, n: int) -> float:
        n = int(n)
        for m, w in self.weights:
            if m == n:
                return w
        return 0.0

    def sample(self, rng: RngState, size: int | None = None):
        """Walk the cumulative masses in index order; one uniform per draw."""
        u = np.atleast_1d(np.asarray(rng.uniform(size), dtype=np.float64))
        edges = np.cumsum([w for _, w in self.weights])
        edges[-1] = 1.0
        idx = np.searchsorted(edges, u, side="left")
        support = np.array([n for n, _ in self.weights], dtype=np.int64)
        out = support[idx]
        if size is None:
            return int(out[0])
        return out


class SamplerKind(str, Enum):
    CONSTANT = "constant"
    DIRAC = "dirac"
    DECAY = "decay"


@dataclass(frozen=True)
class SpectralSampler:
    """Description of a spectral process on an inclusive integer window."""

    kind: SamplerKind
    window: tuple[int, int]
    a: float | None = None
    mixing: GeometricMixing | FiniteMixing | None = None

    def __post_init__(self):
        lo, hi = (int(self.window[0]), int(self.window[1]))
        if lo > hi:
            raise ValueError("window must be a nonempty integer interval")
        object.__setattr__(self, "window", (lo, hi))
        kind = SamplerKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SamplerKind.CONSTANT:
            if self.a is not None or self.mixing is not None:
                raise ValueError("constant sampler takes no parameters")
            return
        mixing = self.mixing if self.mixing is not None else GeometricMixing()
        object.__setattr__(self, "mixing", mixing)
        if kind is SamplerKind.DIRAC:
            if self.a is not None:
                raise ValueError("dirac sampler has no decay parameter")
            return
        a = float(self.a) if self.a is not None else None
        if a is None or not (0.0 < a < 1.0):
            raise ValueError("decay sampler needs a strictly inside (0, 1)")
        object.__setattr__(self, "a", a)

    @classmethod
    def constant(cls, window) -> "SpectralSampler":
        return cls(SamplerKind.CONSTANT, tuple(window))

    @classmethod
    def dirac(cls, window, mixing=None) -> "SpectralSampler":
        return cls(SamplerKind.DIRAC, tuple(window), mixing=mixing)

    @classmethod
    def decay(cls, a: float, window, mixing=None) -> "SpectralSampler":
        return cls(SamplerKind.DECAY, tuple(window), a=a, mixing=mixing)

    @property
    def length(self) -> int:
        return self.window[1] - self.window[0] + 1


def sample_spectral(sampler: SpectralSampler, rng: RngState) -> IndexedPath:
    """One realization of the spectral process on the sampler's window.

    For the decay kind values are built by cascaded multiplication from the
    onset, so the one-step relation Y(t+1) = a * Y(t) holds as an exact
    floating-point identity wherever Y(t) > 0.
    """
    lo, hi = sampler.window
    size = sampler.length
    if sampler.kind is SamplerKind.CONSTANT:
        return IndexedPath(lo, np.ones(size))
    onset = sampler.mixing.sample(rng)
    values = np.zeros(size)
    if sampler.kind is SamplerKind.DIRAC:
        if lo <= onset <= hi:
            values[onset - lo] = 1.0 / sampler.mixing.pmf(onset)
        return IndexedPath(lo, values)
    a = sampler.a
    first = max(lo, onset)
    if first <= hi:
        level = (1.0 - a) * a ** (first - onset) / sampler.mixing.pmf(onset)
        for k in range(first - lo, size):
            values[k] = level
            level = a * level
    return IndexedPath(lo, values)


def spectral_mean(sampler: SpectralSampler, t: int) -> float:
    """E[Y(t)], summed exactly over the mixing mass.

    Equals 1 for every t when the mixing charges all integers; for finite
    mixing it is the exact partial sum, which the stopped max-stable
    construction uses as the marginal Frechet scale at t.
    """
    t = int(t)
    lo, hi = sampler.window
    if not lo <= t <= hi:
        raise ValueError(f"t={t} outside the sampler window {sampler.window}")
    if sampler.kind is SamplerKind.CONSTANT:
        return 1.0
    mixing = sampler.mixing
    if sampler.kind is SamplerKind.DIRAC:
        if isinstance(mixing, GeometricMixing):
            return 1.0
        return 1.0 if mixing.pmf(t) > 0 else 0.0
    a = sampler.a
    if isinstance(mixing, GeometricMixing):
        return 1.0  # sum over all onsets n <= t of (1-a) a^(t-n) telescopes to 1
    total = 0.0
    for n in mixing.support:
        if n <= t:
            total += (1.0 - a) * a ** (t - n)
    return total


def spectral_bound(sampler: SpectralSampler) -> float:
    """Supremum of Y over the window across all realizations.

    Infinite for the decay kind under geometric mixing when the decay rate
    is at least the mixing ratio: far-past onsets then carry more decayed
    value than their probability weight withdraws.
    """
    lo, hi = sampler.window
    if sampler.kind is SamplerKind.CONSTANT:
        return 1.0
    mixing = sampler.mixing
    if sampler.kind is SamplerKind.DIRAC:
        if isinstance(mixing, GeometricMixing):
            worst = max(abs(lo), abs(hi))
            return 1.0 / (mixing.center_mass * mixing.ratio ** worst)
        peaks = [1.0 / w for n, w in mixing.weights if lo <= n <= hi]
        return max(peaks, default=0.0)
    a = sampler.a
    if isinstance(mixing, FiniteMixing):
        best = 0.0
        for n, w in mixing.weights:
            if n <= hi:
                best = max(best, (1.0 - a) * a ** (max(lo, n) - n) / w)
        return best
    if a >= mixing.ratio:
        return math.inf
    best = 0.0
    n = hi
    floor = min(lo, 0)
    while True:
        term = (1.0 - a) * a ** (max(lo, n) - n) / mixing.pmf(n)
        best = max(best, term)
        # below the window and past zero the terms shrink geometrically
        if n < floor and term < best:
            return best
        n -= 1


class ConeKind(str, Enum):
    DIRAC = "dirac"
    CONSTANT = "constant"
    DECAY = "decay"


@dataclass(frozen=True)
class ConeSpec:
    """Membership test specification for the three shape cones.

    dirac: at most one active coordinate.  constant: all coordinates equal.
    decay: zero before some onset, then exact geometric decay at rate a.
    All comparisons are relative to the path maximum, so membership is
    invariant under positive scaling.
    """

    kind: ConeKind
    a: float | None = None
    tolerance: float = 1e-9

    def __post_init__(self):
        kind = ConeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not (0.0 < self.tolerance < 1.0):
            raise ValueError("tolerance must lie in (0, 1)")
        if kind is ConeKind.DECAY:
            if self.a is None or not (0.0 < float(self.a) < 1.0):
                raise ValueError("decay cone needs a strictly inside (0, 1)")
            object.__setattr__(self, "a", float(self.a))
        elif self.a is not None:
            raise ValueError(f"{kind.value} cone takes no decay parameter")


def cone_member(path, spec: ConeSpec) -> bool:
    """Whether a finite path belongs to the given shape cone.

    The zero path is a member of every cone (it is the apex of each).
    """
    values = path.values if isinstance(path, IndexedPath) else \
        np.asarray(path, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("path must be a nonempty 1-d array")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ValueError("path values must be finite and nonnegative")
    peak = float(values.max())
    if peak == 0.0:
        return True
    tol = spec.tolerance
    active = values > tol * peak
    if spec.kind is ConeKind.DIRAC:
        return int(active.sum()) <= 1
    if spec.kind is ConeKind.CONSTANT:
        return float(values.min()) >= (1.0 - tol) * peak
    onset = int(np.argmax(active))
    if active[:onset].any():
        return False
    expected = values[onset] * spec.a ** np.arange(values.size - onset)
    rest = values[onset:]
    return bool(np.all(np.abs(rest - expected) <= tol * expected))


@dataclass(frozen=True)
class ExponentFunctional:
    """Exponent measure of the process with decay rate a, evaluated on
    rectangle complements.

    ``shifts`` restricts the onset sum to a finite index set, matching a
    finite mixing mass; None means all integers, in which case the infinite
    onset sum is evaluated exactly (finite middle part plus a geometric
    tail in closed form, so any requested truncation_error is met).
    """

    a: float
    truncation_error: float = 1e-12
    shifts: tuple[int, ...] | None = None

    def __post_init__(self):
        a = float(self.a)
        if not (math.isfinite(a) and 0.0 <= a <= 1.0):
            raise ValueError("a must lie in [0, 1]")
        object.__setattr__(self, "a", a)
        if not (0.0 < self.truncation_error < 1.0):
            raise ValueError("truncation_error must lie in (0, 1)")
        if self.shifts is not None:
            shifts = tuple(sorted(int(n) for n in self.shifts))
            if not shifts:
                raise ValueError("shifts must be nonempty when given")
            if a == 1.0:
                raise ValueError("a = 1 admits no onset restriction")
            object.__setattr__(self, "shifts", shifts)


def _check_points(points) -> tuple[np.ndarray, np.ndarray]:
    pts = list(points)
    if not pts:
        raise ValueError("points must be nonempty")
    t = np.array([int(p[0]) for p in pts], dtype=np.int64)
    z = np.array([float(p[1]) for p in pts], dtype=np.float64)
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise ValueError("levels must be finite and positive")
    return t, z


def _onset_term(a: float, t: np.ndarray, z: np.ndarray, n: int) -> float:
    """max_i of shape(t_i - n) / z_i for the decay shape at rate a."""
    k = t - n
    if a == 0.0:
        hit = k == 0
        return float((1.0 / z[hit]).max()) if hit.any() else 0.0
    active = k >= 0
    if not active.any():
        return 0.0
    return float(((1.0 - a) * a ** k[active].astype(np.float64) / z[active]).max())


def exponent_rectangle(functional: ExponentFunctional, points) -> float:
    """Exponent measure of {f : f(t_i) > z_i for some i}.

    The negative log of P[eta(t_i) <= z_i for all i] for the associated
    max-stable process.  Homogeneous of degree -1 in the levels.
    """
    t, z = _check_points(points)
    a = functional.a
    if a == 1.0:
        return float((1.0 / z).max())
    if functional.shifts is not None:
        return float(sum(_onset_term(a, t, z, n) for n in functional.shifts))
    if a == 0.0:
        best: dict[int, float] = {}
        for ti, zi in zip(t.tolist(), z.tolist()):
            best[ti] = max(best.get(ti, 0.0), 1.0 / zi)
        return float(sum(best.values()))
    first = int(t.min())
    last = int(t.max())
    total = float((a ** (t - first).astype(np.float64) / z).max())  # closed-form onset tail n <= min t
    for n in range(first + 1, last + 1):
        total += _onset_term(a, t, z, n)
    return total


def dehaan_max_stable(sampler: SpectralSampler, bound: float,
                      rng: RngState, max_points: int = 100000) -> IndexedPath:
    """Exact finite-window draw of the max-stable process built from the
    sampler, via decreasing Poisson marks and a certified stopping rule.

    ``bound`` must dominate every realization of the spectral process on
    the window; once the next mark times bound falls below the running
    pointwise minimum, no later point can alter the maximum, so the
    returned window is an exact draw.  Joint CDFs satisfy
    P[eta(t_i) <= z_i for all i] = exp(-exponent_rectangle(...)) with the
    matching onset restriction.
    """
    if not (math.isfinite(bound) and bound > 0):
        raise ValueError("bound must be finite and positive")
    lo, hi = sampler.window
    for t in range(lo, hi + 1):
        if spectral_mean(sampler, t) <= 0.0:
            raise ValueError(
                f"window coordinate {t} is never charged by the sampler; "
                "the stopped construction would not terminate")
    marks = DecreasingMarkStream(total_intensity=1.0)
    running = np.zeros(sampler.length)
    floor = 0.0
    for _ in range(max_points):
        u = marks.next_mark(rng)
        if floor > 0.0 and u * bound < floor:
            return IndexedPath(lo, running)
        y = sample_spectral(sampler, rng)
        top = float(y.values.max())
        if top > bound * (1.0 + 1e-12):
            raise SpectralBoundError(
                f"spectral draw reached {top!r}, above the certified bound "
                f"{bound!r}")
        np.maximum(running, u * y.values, out=running)
        floor = float(running.min())
    raise RuntimeError("stopping rule did not trigger within max_points")
