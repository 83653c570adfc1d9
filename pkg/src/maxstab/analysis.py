"""Statistical verification and identification for simulated paths.

The battery rechecks every closed-form identity of the family against
simulation with explicit thresholds; ``identify`` recovers the dependence
parameter and time direction of a path from the support and atoms of its
consecutive-value ratios.  Ratio-based identification is meaningful only
within this process family: the one-step ratio support [a, inf) (forward)
or (0, 1/a] (reversed) with an atom of mass a at the finite edge is what
the decision rules rely on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .conditional import independence_test
from .continuous import ShapeFunction, path_value, sample_grid, \
    simulate_moving_max, simulate_moving_max_reversed
from .distributions import RngState, frechet_cdf
from .maxar import Direction, DiscretePath, MaxARParams, bivariate_cdf, \
    kernel_cdf, kernel_sample_many, reverse_path, simulate_forward, \
    simulate_reversed
from .report import EmpiricalReport

__all__ = [
    "KsResult",
    "RatioSupportEstimate",
    "IdentificationResult",
    "IdentificationError",
    "UnclassifiableDataError",
    "AmbiguousRatioError",
    "BatterySizes",
    "ks_critical_value",
    "ks_one_sample",
    "ks_two_sample",
    "ratio_support",
    "identify",
    "run_battery",
]


class IdentificationError(ValueError):
    """Input data could not be attributed to the process family."""


class UnclassifiableDataError(IdentificationError):
    pass


class AmbiguousRatioError(IdentificationError):
    """Ratio evidence points both ways; diagnostics carried in args."""


class KsResult(NamedTuple):
    statistic: float
    threshold: float
    passed: bool
    n: int


def ks_critical_value(level: float) -> float:
    """Asymptotic Kolmogorov-Smirnov critical constant: the statistic
    threshold is this value divided by sqrt(effective n)."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must lie in (0, 1)")
    return math.sqrt(-0.5 * math.log(level / 2.0))


def ks_one_sample(values, cdf: Callable, level: float = 0.01) -> KsResult:
    """Sup distance between the empirical CDF of an i.i.d. sample and a
    target CDF, with the asymptotic threshold at the given level."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 30:
        raise ValueError("need at least 30 values")
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    f = np.asarray(cdf(x), dtype=np.float64)
    steps = np.arange(1, n + 1) / n
    stat = float(np.max(np.maximum(steps - f, f - (steps - 1.0 / n))))
    threshold = ks_critical_value(level) / math.sqrt(n)
    return KsResult(stat, threshold, stat < threshold, n)


def ks_two_sample(x, y, level: float = 0.01) -> KsResult:
    """Sup distance between two empirical CDFs with the asymptotic
    two-sample threshold."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    n, m = x.size, y.size
    if n < 30 or m < 30:
        raise ValueError("need at least 30 values in each sample")
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / n
    fy = np.searchsorted(y, pooled, side="right") / m
    stat = float(np.abs(fx - fy).max())
    threshold = ks_critical_value(level) * math.sqrt((n + m) / (n * m))
    return KsResult(stat, threshold, stat < threshold, min(n, m))


def _as_values(path) -> np.ndarray:
    if isinstance(path, DiscretePath):
        return np.asarray(path.values, dtype=np.float64)
    values = np.asarray(path, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("expected a 1-d array of values")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("values must be finite and positive")
    return values


def _ratio_clusters(ratios: np.ndarray, rel_tol: float):
    """Maximal runs of sorted ratios whose consecutive gaps are below
    rel_tol in relative terms; returns [(median, count)] sorted by count
    descending."""
    order = np.sort(ratios)
    gaps = order[1:] / order[:-1] - 1.0
    breaks = np.nonzero(gaps > rel_tol)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks + 1, [order.size]])
    clusters = [(float(np.median(order[s:e])), int(e - s))
                for s, e in zip(starts, ends)]
    clusters.sort(key=lambda c: (-c[1], c[0]))
    return clusters


@dataclass(frozen=True)
class RatioSupportEstimate:
    """Observed support and dominant atom of consecutive-value ratios."""

    min_ratio: float
    max_ratio: float
    atom_location: float | None
    atom_mass: float
    n_ratios: int


def ratio_support(path, rel_tol: float = 1e-9) -> RatioSupportEstimate:
    """Estimate the ratio support and its atom from a path.

    The atom is the largest cluster of ratios that agree to rel_tol
    (repeated ratios are exact float reproductions for simulated paths);
    clusters need at least three members to count as an atom.
    """
    values = _as_values(path)
    if values.size < 2:
        raise ValueError("need at least two values")
    ratios = values[1:] / values[:-1]
    clusters = _ratio_clusters(ratios, rel_tol)
    location, count = clusters[0]
    if count < 3:
        return RatioSupportEstimate(float(ratios.min()), float(ratios.max()),
                                    None, 0.0, ratios.size)
    return RatioSupportEstimate(float(ratios.min()), float(ratios.max()),
                                location, count / ratios.size, ratios.size)


@dataclass(frozen=True)
class IdentificationResult:
    params: MaxARParams
    atom_location: float | None
    atom_mass: float
    n_used: int
    notes: str


_ATOM_MIN_COUNT = 3
_ATOM_MIN_MASS = 0.01


def identify(path, rel_tol: float = 1e-9, level: float = 0.01) -> IdentificationResult:
    """Recover (a, direction) of a stationary path from this family.

    Decision order: constant path means a = 1; otherwise pairs that pass
    the independence test with no ratio atom mean a = 0; otherwise the
    dominant ratio atom gives a (below one: forward at the atom, above
    one: reversed at its reciprocal).  Atom evidence overrides a passing
    independence test, since an atom is incompatible with independence.
    Raises UnclassifiableDataError or AmbiguousRatioError when the
    evidence supports no member or two members.
    """
    values = _as_values(path)
    n = values.size
    if n < 100:
        raise ValueError("need at least 100 values")
    if values.max() <= values.min() * (1.0 + rel_tol):
        return IdentificationResult(
            MaxARParams(1.0, Direction.FORWARD), None, 1.0, n,
            "constant path: fully dependent member")

    ratios = values[1:] / values[:-1]
    clusters = _ratio_clusters(ratios, rel_tol)
    atoms = [(loc, cnt) for loc, cnt in clusters
             if cnt >= _ATOM_MIN_COUNT and cnt / ratios.size >= _ATOM_MIN_MASS]
    below = [c for c in atoms if c[0] < 1.0 - rel_tol]
    above = [c for c in atoms if c[0] > 1.0 + rel_tol]

    pairs = np.column_stack([values[0:2 * (n // 2):2], values[1:2 * (n // 2):2]])
    indep = None
    if pairs.shape[0] >= 1000:
        indep = independence_test(pairs, level=level)
    indep_passed = indep is not None and indep.checks[0].passed is True

    if indep_passed and not atoms:
        return IdentificationResult(
            MaxARParams(0.0, Direction.FORWARD), None, 0.0, n,
            "disjoint consecutive pairs consistent with independence and "
            "no ratio atom")
    if below and above:
        raise AmbiguousRatioError(
            "ratio atoms on both sides of one", {"below": below, "above": above})
    if below:
        loc, cnt = below[0]
        support_ok = ratios.min() >= loc * (1.0 - rel_tol)
        if not support_ok:
            raise AmbiguousRatioError(
                "atom below one but ratios extend beneath it",
                {"atom": (loc, cnt), "min_ratio": float(ratios.min())})
        return IdentificationResult(
            MaxARParams(loc, Direction.FORWARD), loc, cnt / ratios.size, n,
            "ratio atom at the lower support edge")
    if above:
        loc, cnt = above[0]
        support_ok = ratios.max() <= loc * (1.0 + rel_tol)
        if not support_ok:
            raise AmbiguousRatioError(
                "atom above one but ratios extend beyond it",
                {"atom": (loc, cnt), "max_ratio": float(ratios.max())})
        return IdentificationResult(
            MaxARParams(1.0 / loc, Direction.REVERSED), loc,
            cnt / ratios.size, n, "ratio atom at the upper support edge")
    if indep is None:
        raise UnclassifiableDataError(
            "no ratio atom found and too few values to assess independence "
            "(need at least 2000)")
    raise UnclassifiableDataError(
        "no ratio atom and the independence test rejected; the path does "
        "not match any member of the family")


@dataclass(frozen=True)
class BatterySizes:
    """Sample sizes for the verification battery."""

    marginal: int = 4000
    transitions: int = 20000
    pair_grid: int = 20000
    aggregation: int = 2000
    copies: int = 50
    path_length: int = 4000
    continuous_replicates: int = 3000
    skeleton_points: int = 400

    def scaled(self, n: int) -> "BatterySizes":
        """Derive all sizes from one base count n."""
        return replace(
            self,
            marginal=max(1000, n // 5),
            transitions=n,
            pair_grid=n,
            aggregation=max(500, n // 10),
            path_length=max(1000, n // 5),
            continuous_replicates=max(1000, n // 5),
        )


def _stationary_windows(a: float, width: int, count: int,
                        rng: RngState) -> np.ndarray:
    """count independent stationary forward windows of the given width,
    as a (count, width) array (vectorized over replicates)."""
    u = rng.uniform(size=count * width).reshape(width, count)
    x = np.empty((width, count))
    x[0] = -1.0 / np.log(u[0])
    for t in range(1, width):
        innovation = -(1.0 - a) / np.log(u[t]) if a < 1.0 else 0.0
        x[t] = np.maximum(a * x[t - 1], innovation)
    return x.T


def _discrete_battery(params: MaxARParams, sizes: BatterySizes,
                      rng: RngState, report: EmpiricalReport) -> None:
    a = params.a
    reversed_dir = params.direction is Direction.REVERSED
    level = 0.001

    windows = _stationary_windows(a, 3, sizes.marginal, rng.substream(1))
    if reversed_dir:
        windows = windows[:, ::-1]
    for col in range(windows.shape[1]):
        ks = ks_one_sample(windows[:, col], frechet_cdf, level)
        report.add(f"stationary_marginal_ks_t{col}", ks.statistic, ks.threshold,
                   ks.passed, "unit Frechet marginal at a fixed coordinate "
                   "across independent replicates")

    path = (simulate_reversed if reversed_dir else simulate_forward)(
        params, sizes.path_length, rng.substream(2))
    ratios = path.ratios()
    if a > 0.0:
        if reversed_dir:
            report.add("ratio_upper_edge", float(ratios.max()),
                       (1.0 / a) * (1.0 + 1e-9),
                       float(ratios.max()) <= (1.0 / a) * (1.0 + 1e-9),
                       "reversed one-step ratios never exceed 1/a")
        else:
            report.add("ratio_lower_edge", float(ratios.min()),
                       a * (1.0 - 1e-9),
                       float(ratios.min()) >= a * (1.0 - 1e-9),
                       "forward one-step ratios never fall below a")

    if 0.0 < a < 1.0:
        n = sizes.transitions
        sub = rng.substream(3)
        u = sub.uniform(size=2 * n)
        starts = -1.0 / np.log(u[:n])
        nexts = np.maximum(a * starts, -(1.0 - a) / np.log(u[n:]))
        atom_freq = float(np.mean(nexts == a * starts))
        sigma = math.sqrt(a * (1.0 - a) / n)
        report.add("transition_atom_mass", abs(atom_freq - a), 4.0 * sigma,
                   abs(atom_freq - a) <= 4.0 * sigma,
                   "holding frequency of the decayed value equals a")

        forward = MaxARParams(a, Direction.FORWARD)
        sampled = kernel_sample_many(forward, starts, sub)
        edges = np.quantile(starts, np.arange(1, 5) / 5.0)
        bins = np.searchsorted(edges, starts)
        for b in range(5):
            mask = bins == b
            ks = ks_two_sample(nexts[mask], sampled[mask], level)
            report.add(f"kernel_sample_two_sample_bin{b}", ks.statistic,
                       ks.threshold, ks.passed,
                       "recursion step vs inverse-CDF kernel draw from the "
                       "same stationary starts")
        lo_edges = np.concatenate([[0.0], edges])
        hi_edges = np.concatenate([edges, [math.inf]])
        y_grid = np.quantile(nexts, np.arange(1, 10) / 10.0)
        for b in range(5):
            mask = bins == b
            n_bin = int(mask.sum())
            p_lo = math.exp(-1.0 / lo_edges[b]) if lo_edges[b] > 0 else 0.0
            p_hi = math.exp(-1.0 / hi_edges[b]) if hi_edges[b] < math.inf else 1.0
            worst = 0.0
            for y in y_grid:
                cut = min(p_hi, math.exp(-a / y))
                target = math.exp(-(1.0 - a) / y) * max(0.0, cut - p_lo) \
                    / (p_hi - p_lo)
                emp = float(np.mean(nexts[mask] <= y))
                worst = max(worst, abs(emp - target))
            report.add(f"kernel_binned_cdf_bin{b}", worst,
                       3.0 / math.sqrt(n_bin), worst < 3.0 / math.sqrt(n_bin),
                       "closed-form transition CDF mixed over the "
                       "conditioning bin")

        grid = (0.5, 1.0, 2.0)
        worst = 0.0
        for xg in grid:
            for yg in grid:
                target = bivariate_cdf(forward, xg, yg)
                emp = float(np.mean((starts <= xg) & (nexts <= yg)))
                worst = max(worst, abs(emp - target))
        bound = 2.0 / math.sqrt(n)
        report.add("bivariate_grid", worst, bound, worst < bound,
                   "closed-form joint CDF of a stationary transition pair")

        rev = MaxARParams(a, Direction.REVERSED)
        rev_starts = -1.0 / np.log(sub.uniform(size=n))
        rev_nexts = kernel_sample_many(rev, rev_starts, sub)
        worst = 0.0
        for xg in grid:
            for yg in grid:
                target = bivariate_cdf(forward, yg, xg)
                emp = float(np.mean((rev_starts <= xg) & (rev_nexts <= yg)))
                worst = max(worst, abs(emp - target))
        report.add("equilibrium_grid", worst, bound, worst < bound,
                   "detailed balance: backward transition pairs carry the "
                   "swapped forward joint law")

    copies = sizes.copies
    reps = sizes.aggregation
    sub = rng.substream(4)
    block = _stationary_windows(a, 2, reps * copies, sub)
    block = block.reshape(reps, copies, 2)
    aggregated = block.max(axis=1) / copies
    single = _stationary_windows(a, 2, reps, sub)
    if reversed_dir:
        aggregated = aggregated[:, ::-1]
        single = single[:, ::-1]
    ks = ks_two_sample(aggregated[:, 0], single[:, 0], level)
    report.add("max_stability_marginal", ks.statistic, ks.threshold, ks.passed,
               "rescaled pointwise max of independent copies keeps the "
               "marginal law")
    ks = ks_two_sample(aggregated.min(axis=1), single.min(axis=1), level)
    report.add("max_stability_pair_min", ks.statistic, ks.threshold, ks.passed,
               "rescaled pointwise max of independent copies keeps the "
               "consecutive-pair law (minimum statistic)")

    forward_params = MaxARParams(a, Direction.FORWARD)
    worst = 0.0
    for y in (0.5, 1.0, 2.0, 4.0):
        def integrand(x, y=y):
            return kernel_cdf(forward_params, x, y) \
                * math.exp(-1.0 / x) / x**2
        if a > 0.0:
            # the kernel CDF has a kink at x = y/a, so integrate each side
            integral = integrate.quad(integrand, 0.0, y / a, limit=200)[0] \
                + integrate.quad(integrand, y / a, math.inf, limit=200)[0]
        else:
            integral = integrate.quad(integrand, 0.0, math.inf, limit=200)[0]
        worst = max(worst, abs(integral - math.exp(-1.0 / y)))
    report.add("chapman_kolmogorov_quadrature", worst, 1e-8, worst < 1e-8,
               "transition kernel integrated against the stationary law "
               "returns the stationary CDF")

    with warnings.catch_warnings():
        # at a in {0, 1} reverse_path canonicalizes the direction and says
        # so; inside a routine battery run that advisory is expected noise
        warnings.simplefilter("ignore", UserWarning)
        twice = reverse_path(reverse_path(path))
    same = twice.values.shape == path.values.shape and \
        bool(np.all(twice.values == path.values))
    report.add("reversal_involution", 0.0 if same else 1.0, 0.5, same,
               "reversing a path twice restores it exactly")


def _continuous_battery(shape: ShapeFunction, epsilon: float,
                        sizes: BatterySizes, rng: RngState,
                        report: EmpiricalReport) -> None:
    a = shape.a
    reversed_dir = shape.direction is Direction.REVERSED
    simulate = simulate_moving_max_reversed if reversed_dir \
        else simulate_moving_max
    a_eff = a ** epsilon
    level = 0.001

    length = sizes.skeleton_points * epsilon
    path = simulate(a, length, rng.substream(1))
    skeleton = sample_grid(path, epsilon)
    ratios = skeleton.ratios()
    if reversed_dir:
        edge = float(ratios.max())
        target = 1.0 / a_eff
    else:
        edge = float(ratios.min())
        target = a_eff
    report.add("skeleton_ratio_edge", abs(edge - target), 1e-9 * target,
               abs(edge - target) <= 1e-9 * target,
               "grid skeleton ratio support edge equals the per-step decay "
               "exactly")

    reps = sizes.continuous_replicates
    sub = rng.substream(2)
    first = np.empty(reps)
    second = np.empty(reps)
    for i in range(reps):
        p = simulate(a, 2.0 * epsilon, sub)
        first[i] = path_value(p, 0.0)
        second[i] = path_value(p, epsilon)
    ks = ks_one_sample(first, frechet_cdf, level)
    report.add("continuous_marginal_ks", ks.statistic, ks.threshold, ks.passed,
               "unit Frechet marginal of the continuous process")
    chain_pairs = _stationary_windows(a_eff, 2, reps, rng.substream(3))
    if reversed_dir:
        chain_pairs = chain_pairs[:, ::-1]
    ks = ks_two_sample(np.minimum(first, second),
                       chain_pairs.min(axis=1), level)
    report.add("skeleton_pair_min_two_sample", ks.statistic, ks.threshold,
               ks.passed, "skeleton pair law matches the discrete chain at "
               "the per-step decay (minimum statistic)")
    ks = ks_two_sample(second, chain_pairs[:, 1], level)
    report.add("skeleton_marginal_two_sample", ks.statistic, ks.threshold,
               ks.passed, "skeleton coordinate matches the discrete chain "
               "marginal")

    sub = rng.substream(4)
    held = 0
    for i in range(reps):
        p = simulate(a, 1.25, sub)
        z0 = path_value(p, 0.125)
        z1 = path_value(p, 1.125)
        if reversed_dir:
            z0, z1 = z1, z0
        if abs(z1 - a * z0) <= 1e-12 * max(z1, a * z0):
            held += 1
    sigma = math.sqrt(a * (1.0 - a) / reps) if a < 1.0 else 0.0
    report.add("holding_probability", abs(held / reps - a),
               4.0 * sigma + 1e-12, abs(held / reps - a) <= 4.0 * sigma + 1e-12,
               "probability of one unit of pure decay equals a")


def run_battery(spec, rng: RngState, sizes: BatterySizes | None = None,
                epsilon: float = 0.1) -> EmpiricalReport:
    """Run the verification battery for a discrete chain (MaxARParams) or a
    continuous moving maximum (ShapeFunction, skeleton step epsilon).

    Individual check failures are recorded in the report, never raised.
    """
    sizes = sizes or BatterySizes()
    if isinstance(spec, MaxARParams):
        report = EmpiricalReport(params={
            "kind": "discrete", "a": spec.a,
            "direction": spec.direction.value, "sizes": vars(sizes)})
        report.seeds.append((rng.seed, rng.stream))
        _discrete_battery(spec, sizes, rng, report)
        return report
    if isinstance(spec, ShapeFunction):
        report = EmpiricalReport(params={
            "kind": "continuous", "a": spec.a,
            "direction": spec.direction.value, "epsilon": epsilon,
            "sizes": vars(sizes)})
        report.seeds.append((rng.seed, rng.stream))
        _continuous_battery(spec, epsilon, sizes, rng, report)
        return report
    raise TypeError("spec must be MaxARParams or ShapeFunction")
