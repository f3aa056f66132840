"""Synthetic two-cluster benchmarks and their evaluation metrics.

Generators build datasets of triangular fuzzy vectors with two planted
groups of equal size, separated either by their centers (case ``alpha``)
or by their spreads (case ``beta``), optionally contaminated with
outliers drawn from a normal distribution far from both groups.

Evaluation covers the share of inliers whose membership in their true
cluster clears a threshold, the mean squared error of recovered
prototypes against the generating population means, and the weight ratio
that separates outliers from inliers.  A grid runner repeats scenarios
over derived seeds and averages the reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import ClusterResult, RunConfig, run
from .fuzzy import FuzzyVector, TriangularFuzzyNumber, vector_distance_sq

__all__ = [
    "CASES",
    "THRESHOLDS",
    "ScenarioSpec",
    "LabeledDataset",
    "EvalReport",
    "ScenarioResult",
    "generate",
    "generate_clean",
    "generate_outliers",
    "ideal_prototypes",
    "evaluate_classification",
    "evaluate_mse",
    "outlier_stats",
    "replication_seeds",
    "run_scenario",
    "run_scenario_grid",
]

CASE_CENTER_SEPARATED = "alpha"
CASE_SPREAD_SEPARATED = "beta"
CASES = (CASE_CENTER_SEPARATED, CASE_SPREAD_SEPARATED)

THRESHOLDS = (0.5, 0.75, 0.9)

OUTLIERS_PER = 10  # one outlier per this many data
OUTLIER_CENTER_MEAN = -2.0
OUTLIER_SPREAD_MEAN = 5.0
OUTLIER_STD = math.sqrt(2.0)  # the contaminating normal has variance 2


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark cell: generator settings plus clustering knobs.

    ``n`` counts inliers; with ``outliers`` set, ``n // 10`` extra
    contaminated data are appended.  Setting ``n_includes_outliers``
    flips that convention so that ``n`` is the total and inliers number
    ``n - n // 10``.  ``h`` rescales every sampled spread, leaving
    centers untouched.
    """

    case: str
    outliers: bool
    n: int
    p: int
    theta: float = 1.5
    h: float = 1.0
    fuzzifier: float = 2.0
    weight_exponent: float = 1.0
    weight_budget: float = 200.0
    replications: int = 1
    seed: int = 0
    n_includes_outliers: bool = False

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if self.n_includes_outliers and not self.outliers:
            raise ValueError("n_includes_outliers requires outliers")
        if self.inlier_count < 4 or self.inlier_count % 2 != 0:
            raise ValueError(
                f"need an even inlier count of at least 4, got {self.inlier_count}")
        if self.outliers and self.outlier_count < 1:
            raise ValueError(f"n={self.n} is too small to carry outliers")
        if self.p < 1:
            raise ValueError(f"need at least one feature, got p={self.p}")
        if not self.theta > 0.0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.h > 0.0:
            raise ValueError(f"h must be positive, got {self.h}")
        if not self.fuzzifier > 1.0:
            raise ValueError(f"fuzzifier must exceed 1, got {self.fuzzifier}")
        if not self.weight_exponent > 0.0:
            raise ValueError("weight_exponent must be positive")
        if not self.weight_budget > 0.0:
            raise ValueError("weight_budget must be positive")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit an unsigned 64-bit integer")

    @property
    def outlier_count(self) -> int:
        return self.n // OUTLIERS_PER if self.outliers else 0

    @property
    def inlier_count(self) -> int:
        if self.outliers and self.n_includes_outliers:
            return self.n - self.outlier_count
        return self.n


@dataclass(frozen=True)
class LabeledDataset:
    """Generated data with construction-time group labels and outlier flags."""

    data: tuple[FuzzyVector, ...]
    true_labels: np.ndarray
    outlier_flags: np.ndarray

    def __post_init__(self) -> None:
        data = tuple(self.data)
        labels = np.array(self.true_labels, dtype=int)
        flags = np.array(self.outlier_flags, dtype=bool)
        if not (len(data) == labels.shape[0] == flags.shape[0]):
            raise ValueError("data, labels and flags must have equal length")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        labels.setflags(write=False)
        flags.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "true_labels", labels)
        object.__setattr__(self, "outlier_flags", flags)

    def __len__(self) -> int:
        return len(self.data)

    @property
    def n_outliers(self) -> int:
        return int(self.outlier_flags.sum())


@dataclass(frozen=True)
class EvalReport:
    """Scores of one clustering run; unset fields stay ``None``."""

    pct_well_classified: dict[float, float] | None = None
    mse_centers: float | None = None
    mse_left: float | None = None
    mse_right: float | None = None
    outlier_weight_ratio: float | None = None

    def __post_init__(self) -> None:
        pct = self.pct_well_classified
        if pct is not None:
            if any(not 0.0 <= v <= 100.0 for v in pct.values()):
                raise ValueError("percentages must lie in [0, 100]")
            ordered = [pct[t] for t in sorted(pct)]
            if any(lo > hi for lo, hi in zip(ordered[1:], ordered)):
                raise ValueError(
                    "percentages must not increase with the threshold")

    def merged(self, other: "EvalReport") -> "EvalReport":
        """Combine two partial reports, preferring fields set on ``other``."""
        def pick(name):
            value = getattr(other, name)
            return value if value is not None else getattr(self, name)
        return EvalReport(**{name: pick(name) for name in
                             ("pct_well_classified", "mse_centers",
                              "mse_left", "mse_right", "outlier_weight_ratio")})


def _triples(centers: np.ndarray, left: np.ndarray,
             right: np.ndarray) -> tuple[FuzzyVector, ...]:
    stacked = np.stack((centers, left, right), axis=-1)  # (n, p, 3)
    return tuple(FuzzyVector.from_array(row)
                 for row in stacked.reshape(len(centers), -1))


def _resample_nonneg(rng: np.random.Generator, mean: float, std: float,
                     shape: tuple[int, ...]) -> np.ndarray:
    """Normal draws with negative values redrawn until non-negative."""
    draws = rng.normal(mean, std, shape)
    while True:
        neg = draws < 0.0
        if not neg.any():
            return draws
        draws[neg] = rng.normal(mean, std, int(neg.sum()))


def ideal_prototypes(spec: ScenarioSpec) -> tuple[FuzzyVector, FuzzyVector]:
    """Population means of the two generating groups, component-wise."""
    base = 0.5 * spec.h
    if spec.case == CASE_CENTER_SEPARATED:
        groups = ((0.5, base, base), (0.5 + spec.theta, base, base))
    else:
        wide = (0.5 + spec.theta) * spec.h
        groups = ((0.5, base, base), (0.5, wide, wide))
    return tuple(FuzzyVector(tuple(TriangularFuzzyNumber(*triple)
                                   for _ in range(spec.p)))
                 for triple in groups)


def generate_clean(spec: ScenarioSpec) -> LabeledDataset:
    """Two equal groups of fuzzy vectors, no contamination.

    Case ``alpha`` shifts the second group's centers up by ``theta`` while
    all spreads stay uniform on [0, 1]; case ``beta`` keeps all centers
    uniform on [0, 1] and shifts the second group's spreads instead.
    Every value is drawn i.i.d. per feature and spreads are then scaled
    by ``h``.
    """
    if spec.outliers:
        raise ValueError("spec requests outliers; use generate_outliers")
    rng = np.random.default_rng(spec.seed)
    half = spec.inlier_count // 2
    p = spec.p
    if spec.case == CASE_CENTER_SEPARATED:
        centers = np.vstack((rng.random((half, p)),
                             spec.theta + rng.random((half, p))))
        left = rng.random((2 * half, p))
        right = rng.random((2 * half, p))
    else:
        centers = rng.random((2 * half, p))
        left = np.vstack((rng.random((half, p)),
                          spec.theta + rng.random((half, p))))
        right = np.vstack((rng.random((half, p)),
                           spec.theta + rng.random((half, p))))
    data = _triples(centers, left * spec.h, right * spec.h)
    labels = np.repeat((0, 1), half)
    return LabeledDataset(data, labels, np.zeros(2 * half, dtype=bool))


def generate_outliers(spec: ScenarioSpec) -> LabeledDataset:
    """Two equal inlier groups plus flagged contaminated data.

    Case ``alpha`` draws outlier centers from a normal far below both
    groups; case ``beta`` draws outlier spreads from a normal far above
    both groups (redrawing the rare negative spread).  Outliers carry the
    label of the nearer group by construction but are flagged so that
    evaluation can exclude them.
    """
    if not spec.outliers:
        raise ValueError("spec requests no outliers; use generate_clean")
    rng = np.random.default_rng(spec.seed)
    half = spec.inlier_count // 2
    n_in = 2 * half
    k = spec.outlier_count
    p = spec.p
    if spec.case == CASE_CENTER_SEPARATED:
        in_centers = np.vstack((rng.random((half, p)),
                                spec.theta + rng.random((half, p))))
        in_left = rng.random((n_in, p))
        in_right = rng.random((n_in, p))
        out_centers = rng.normal(OUTLIER_CENTER_MEAN, OUTLIER_STD, (k, p))
        out_left = rng.random((k, p))
        out_right = rng.random((k, p))
    else:
        in_centers = rng.random((n_in, p))
        in_left = np.vstack((rng.random((half, p)),
                             spec.theta + rng.random((half, p))))
        in_right = np.vstack((rng.random((half, p)),
                              spec.theta + rng.random((half, p))))
        out_centers = rng.random((k, p))
        out_left = _resample_nonneg(rng, OUTLIER_SPREAD_MEAN, OUTLIER_STD, (k, p))
        out_right = _resample_nonneg(rng, OUTLIER_SPREAD_MEAN, OUTLIER_STD, (k, p))
    centers = np.vstack((in_centers, out_centers))
    left = np.vstack((in_left, out_left)) * spec.h
    right = np.vstack((in_right, out_right)) * spec.h
    data = _triples(centers, left, right)

    ideals = ideal_prototypes(spec)
    labels = np.empty(n_in + k, dtype=int)
    labels[:half] = 0
    labels[half:n_in] = 1
    for i in range(n_in, n_in + k):
        labels[i] = int(np.argmin([vector_distance_sq(data[i], g)
                                   for g in ideals]))
    flags = np.zeros(n_in + k, dtype=bool)
    flags[n_in:] = True
    return LabeledDataset(data, labels, flags)


def generate(spec: ScenarioSpec) -> LabeledDataset:
    """Dispatch to the clean or contaminated generator."""
    return generate_outliers(spec) if spec.outliers else generate_clean(spec)


def _match_clusters(memberships: np.ndarray, labels: np.ndarray,
                    mask: np.ndarray) -> np.ndarray:
    """Cluster index per group, chosen to maximize hard-label agreement."""
    c = memberships.shape[0]
    groups = int(labels.max()) + 1
    if c != groups:
        raise ValueError(
            f"{c} clusters cannot be matched to {groups} true groups")
    hard = memberships.argmax(axis=0)  # lowest index wins exact ties
    agreement = np.zeros((c, groups))
    for i in range(c):
        for g in range(groups):
            agreement[i, g] = np.count_nonzero(
                mask & (hard == i) & (labels == g))
    rows, cols = linear_sum_assignment(-agreement)
    cluster_for_group = np.empty(groups, dtype=int)
    cluster_for_group[cols] = rows
    return cluster_for_group


def evaluate_classification(result: ClusterResult,
                            truth: LabeledDataset) -> EvalReport:
    """Share of inliers whose matched-cluster membership clears a threshold.

    Clusters are matched to true groups by the label permutation that
    maximizes agreement of the hard assignment.  The comparison is
    strict, so an exactly tied membership of 0.5 does not count, and
    flagged outliers are excluded from the percentage entirely.
    """
    memberships = result.memberships.values
    labels = truth.true_labels
    if memberships.shape[1] != len(labels):
        raise ValueError(
            f"result covers {memberships.shape[1]} data but the dataset "
            f"has {len(labels)}")
    inliers = ~truth.outlier_flags
    if not inliers.any():
        raise ValueError("dataset has no inliers to classify")
    cluster_for_group = _match_clusters(memberships, labels, inliers)
    matched = memberships[cluster_for_group[labels], np.arange(len(labels))]
    pct = {t: 100.0 * float(np.mean(matched[inliers] > t)) for t in THRESHOLDS}
    return EvalReport(pct_well_classified=pct)


def evaluate_mse(result: ClusterResult, spec: ScenarioSpec) -> EvalReport:
    """Squared error of recovered prototypes against the population means.

    Prototypes are matched to groups by the assignment minimizing total
    fuzzy distance to the ideal prototypes; the error is then averaged
    over clusters and features, separately for centers, left spreads and
    right spreads.
    """
    ideals = ideal_prototypes(spec)
    if len(result.prototypes) != len(ideals):
        raise ValueError(
            f"expected {len(ideals)} prototypes, got {len(result.prototypes)}")
    if any(len(v) != spec.p for v in result.prototypes):
        raise ValueError("prototype dimension disagrees with the scenario")
    cost = np.array([[vector_distance_sq(proto, ideal) for ideal in ideals]
                     for proto in result.prototypes])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(len(ideals), dtype=int)
    order[cols] = rows
    diffs = np.stack([result.prototypes[order[g]].to_array()
                      - ideals[g].to_array()
                      for g in range(len(ideals))]).reshape(len(ideals), -1, 3)
    sq = diffs ** 2
    return EvalReport(
        mse_centers=float(sq[:, :, 0].mean()),
        mse_left=float(sq[:, :, 1].mean()),
        mse_right=float(sq[:, :, 2].mean()),
    )


def outlier_stats(result: ClusterResult, truth: LabeledDataset) -> float:
    """Median outlier weight over median inlier weight.

    Ratios well above 1 mean the weighting scheme flagged the planted
    outliers.
    """
    flags = truth.outlier_flags
    if not flags.any():
        raise ValueError("dataset carries no outlier flags")
    weights = result.weights.values
    if weights.shape[0] != flags.shape[0]:
        raise ValueError("result size disagrees with the dataset")
    return float(np.median(weights[flags]) / np.median(weights[~flags]))


def replication_seeds(master_seed: int, count: int) -> list[tuple[int, int]]:
    """Derived (data seed, init seed) pairs, one per replication.

    Uses a counter-based split of the master seed so every replication is
    independently reproducible.
    """
    root = np.random.SeedSequence(master_seed)
    return [tuple(int(v) for v in child.generate_state(2, np.uint64))
            for child in root.spawn(count)]


@dataclass(frozen=True)
class ScenarioResult:
    """Per-replication reports of one scenario plus their mean."""

    spec: ScenarioSpec
    mean_report: EvalReport
    replicates: tuple[EvalReport, ...] = field(repr=False)


def _mean_report(reports: list[EvalReport]) -> EvalReport:
    def mean_of(name):
        values = [getattr(r, name) for r in reports
                  if getattr(r, name) is not None]
        return float(np.mean(values)) if values else None

    pcts = [r.pct_well_classified for r in reports
            if r.pct_well_classified is not None]
    pct = ({t: float(np.mean([p[t] for p in pcts])) for t in THRESHOLDS}
           if pcts else None)
    return EvalReport(
        pct_well_classified=pct,
        mse_centers=mean_of("mse_centers"),
        mse_left=mean_of("mse_left"),
        mse_right=mean_of("mse_right"),
        outlier_weight_ratio=mean_of("outlier_weight_ratio"),
    )


def _run_replication(task) -> EvalReport:
    spec, data_seed, init_seed, engine, clusters, tolerance, max_iter = task
    rep_spec = replace(spec, seed=data_seed, replications=1)
    dataset = generate(rep_spec)
    cfg = RunConfig(
        clusters=clusters,
        fuzzifier=spec.fuzzifier,
        weight_exponent=spec.weight_exponent,
        weight_budget=spec.weight_budget,
        tolerance=tolerance,
        max_iter=max_iter,
        seed=init_seed,
        engine=engine,
    )
    result = run(dataset.data, cfg)
    report = evaluate_classification(result, dataset).merged(
        evaluate_mse(result, rep_spec))
    if spec.outliers:
        report = report.merged(
            EvalReport(outlier_weight_ratio=outlier_stats(result, dataset)))
    return report


def run_scenario(spec: ScenarioSpec, *, engine: str = "approach1",
                 clusters: int = 2, tolerance: float = 1e-6,
                 max_iter: int = 300, jobs: int = 1) -> ScenarioResult:
    """Run every replication of one scenario and average the reports.

    Replications are independent; with ``jobs > 1`` they fan out over a
    process pool.  Results are collected in replication order, so the
    aggregate does not depend on completion order.
    """
    tasks = [(spec, data_seed, init_seed, engine, clusters, tolerance, max_iter)
             for data_seed, init_seed in replication_seeds(spec.seed,
                                                           spec.replications)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_replication, tasks))
    else:
        reports = [_run_replication(task) for task in tasks]
    return ScenarioResult(spec, _mean_report(reports), tuple(reports))


def run_scenario_grid(specs, *, engine: str = "approach1", clusters: int = 2,
                      tolerance: float = 1e-6, max_iter: int = 300,
                      jobs: int = 1) -> list[ScenarioResult]:
    """Run a list of scenario cells, one aggregated row per cell."""
    outcomes = []
    for index, spec in enumerate(specs):
        try:
            outcomes.append(run_scenario(
                spec, engine=engine, clusters=clusters, tolerance=tolerance,
                max_iter=max_iter, jobs=jobs))
        except Exception as err:
            raise RuntimeError(
                f"scenario {index} (case={spec.case}, outliers={spec.outliers}, "
                f"n={spec.n}, p={spec.p}) failed: {err}") from err
    return outcomes
