"""Outlier-weighted fuzzy c-means for vectors of triangular fuzzy numbers.

The engine minimizes

    J = sum_i sum_k  u_ik**m * w_k**(-q) * d2(v_i, x_k)

over prototypes ``v``, a column-stochastic membership matrix ``U`` and
per-datum weights ``w`` constrained to a fixed positive budget, where
``d2`` is the squared triangular Wasserstein distance summed over vector
components.  The weights follow Keller's outlier scheme: data far from
every prototype receive large weights, and the ``w**(-q)`` factor then
shrinks their pull on the prototypes, so outliers both self-identify and
lose influence.

Two interchangeable engines are provided.  ``approach1`` iterates directly
on (center, spread, spread) triples; because the distance form is positive
definite, the exact prototype update is the coefficient-weighted mean of
the data.  ``approach2`` maps the data once through the square-root
transform, iterates in plain Euclidean space and maps its prototypes back
at the end.  Up to floating-point noise both produce identical iterates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fuzzy import FuzzyVector
from .transform import (
    DISTANCE_FORM,
    build_transform,
    inverse_transform_vector,
    transform_array,
)

__all__ = [
    "ENGINES",
    "WEIGHT_FLOOR_SCALE",
    "DegenerateClusterError",
    "RunConfig",
    "MembershipMatrix",
    "WeightVector",
    "ClusterResult",
    "initialize",
    "objective",
    "update_memberships",
    "update_weights",
    "update_prototypes_approach1",
    "update_prototypes_approach2",
    "run",
]

ENGINE_DIRECT = "approach1"
ENGINE_TRANSFORMED = "approach2"
ENGINES = (ENGINE_DIRECT, ENGINE_TRANSFORMED)

# Per-datum weight floor, relative to the weight budget.  A datum whose
# aggregated distance is exactly zero would otherwise get weight 0 and an
# undefined w**(-q) influence.
WEIGHT_FLOOR_SCALE = 1e-12

_DEGENERATE_EPS = 1e-300

_FORM = build_transform()


class DegenerateClusterError(RuntimeError):
    """A cluster's total prototype coefficient underflowed to zero."""


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters of one clustering run.

    ``fuzzifier`` softens memberships (must exceed 1), ``weight_exponent``
    controls how strongly large weights mute a datum, ``weight_budget`` is
    the fixed sum of all per-datum weights.  ``freeze_weights`` keeps the
    weights uniform, reducing the model to plain fuzzy c-means; it exists
    for cross-checks against reference implementations.
    """

    clusters: int
    fuzzifier: float = 2.0
    weight_exponent: float = 1.0
    weight_budget: float = 200.0
    tolerance: float = 1e-6
    max_iter: int = 300
    seed: int = 0
    engine: str = ENGINE_DIRECT
    freeze_weights: bool = False

    def __post_init__(self) -> None:
        if self.clusters < 1:
            raise ValueError(f"clusters must be at least 1, got {self.clusters}")
        if not self.fuzzifier > 1.0:
            raise ValueError(f"fuzzifier must exceed 1, got {self.fuzzifier}")
        if not self.weight_exponent > 0.0:
            raise ValueError(
                f"weight_exponent must be positive, got {self.weight_exponent}")
        if not self.weight_budget > 0.0:
            raise ValueError(
                f"weight_budget must be positive, got {self.weight_budget}")
        if not self.tolerance > 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit an unsigned 64-bit integer")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")

    @property
    def weight_floor(self) -> float:
        return WEIGHT_FLOOR_SCALE * self.weight_budget


@dataclass(frozen=True)
class MembershipMatrix:
    """Cluster-by-datum membership degrees; every column sums to one."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.size == 0:
            raise ValueError("memberships must form a non-empty 2-D matrix")
        if not np.isfinite(vals).all():
            raise ValueError("memberships must be finite")
        if vals.min() < 0.0 or vals.max() > 1.0:
            raise ValueError("memberships must lie in [0, 1]")
        if np.max(np.abs(vals.sum(axis=0) - 1.0)) > 1e-12:
            raise ValueError("membership columns must sum to 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def clusters(self) -> int:
        return self.values.shape[0]

    @property
    def n_data(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class WeightVector:
    """Per-datum outlier weights constrained to a fixed positive budget."""

    values: np.ndarray
    budget: float

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        budget = float(self.budget)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("weights must form a non-empty 1-D vector")
        if not budget > 0.0:
            raise ValueError(f"weight budget must be positive, got {budget}")
        if not np.isfinite(vals).all():
            raise ValueError("weights must be finite")
        if vals.min() < WEIGHT_FLOOR_SCALE * budget:
            raise ValueError("weights must not fall below the floor")
        if abs(vals.sum() - budget) > 1e-9 * budget:
            raise ValueError("weights must sum to the budget")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "budget", budget)


@dataclass(frozen=True)
class ClusterResult:
    """Final state of a clustering run.

    ``objective_trace`` holds one value per sweep plus a final entry after
    the closing prototype refresh.  Every sweep is an exact block
    minimizer, so the trace is non-increasing up to rounding; note that a
    weight at the floor amplifies prototype rounding noise by
    ``floor**(-q)``, which can lift the trace noise above 1e-10 relative
    for exponents beyond the calibrated range q <= 2.
    """

    prototypes: tuple[FuzzyVector, ...]
    memberships: MembershipMatrix
    weights: WeightVector
    objective_trace: tuple[float, ...]
    iterations: int
    converged: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "prototypes", tuple(self.prototypes))
        object.__setattr__(self, "objective_trace",
                           tuple(float(v) for v in self.objective_trace))


def _as_matrix(data) -> np.ndarray:
    """(n, 3p) float matrix from fuzzy vectors or an equivalent array."""
    if isinstance(data, np.ndarray):
        arr = np.array(data, dtype=float)
    elif isinstance(data, FuzzyVector):
        arr = data.to_array()[None, :]
    else:
        rows = [item.to_array() if isinstance(item, FuzzyVector)
                else np.asarray(item, dtype=float).ravel()
                for item in data]
        if not rows:
            raise ValueError("dataset is empty")
        if len({row.size for row in rows}) != 1:
            raise ValueError("dataset mixes vectors of different dimension")
        arr = np.vstack(rows)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty (n, 3p) matrix")
    if arr.shape[1] % 3 != 0:
        raise ValueError("trailing dimension must be a multiple of 3")
    if not np.isfinite(arr).all():
        raise ValueError("data contain NaN or infinite values")
    return arr


def _form_distance_sq(prototypes: np.ndarray, data: np.ndarray) -> np.ndarray:
    """(c, n) squared fuzzy distances via the quadratic form, blockwise."""
    c = prototypes.shape[0]
    n = data.shape[0]
    diff = (prototypes[:, None, :].reshape(c, 1, -1, 3)
            - data[None, :, :].reshape(1, n, -1, 3))
    d2 = np.einsum("knja,ab,knjb->kn", diff, DISTANCE_FORM, diff, optimize=True)
    return np.maximum(d2, 0.0, out=d2)


def _euclid_distance_sq(prototypes: np.ndarray, data: np.ndarray) -> np.ndarray:
    """(c, n) squared Euclidean distances in transformed space."""
    diff = prototypes[:, None, :] - data[None, :, :]
    d2 = np.einsum("knj,knj->kn", diff, diff)
    return np.maximum(d2, 0.0, out=d2)


def _membership_update(d2: np.ndarray, fuzzifier: float) -> np.ndarray:
    """Exact membership minimizer for fixed prototypes and weights.

    Columns containing a zero (or underflowing) distance get the limit
    assignment: membership split uniformly over the offending clusters.
    """
    expo = 1.0 / (fuzzifier - 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inv = d2 ** -expo
        col_sum = inv.sum(axis=0, keepdims=True)
        u = inv / col_sum
    for k in np.nonzero(~np.isfinite(col_sum[0]))[0]:
        hits = ~np.isfinite(inv[:, k])
        if not hits.any():  # finite entries whose sum alone overflowed
            hits = inv[:, k] == np.max(inv[:, k])
        u[:, k] = 0.0
        u[hits, k] = 1.0 / hits.sum()
    return u


def _weight_update(d2: np.ndarray, u_pow: np.ndarray,
                   exponent: float, budget: float) -> np.ndarray:
    """Exact weight minimizer under the fixed-budget constraint.

    A datum's weight grows with its membership-aggregated distance, so
    outliers end up with the large weights that mute them.  Zero
    aggregates are floored and the vector renormalized to the budget.
    """
    n = d2.shape[1]
    agg = np.einsum("kn,kn->n", u_pow, d2)
    if not agg.any():
        return np.full(n, budget / n)
    floor = WEIGHT_FLOOR_SCALE * budget
    w = agg ** (1.0 / (exponent + 1.0))
    w *= budget / w.sum()
    np.maximum(w, floor, out=w)
    w *= budget / w.sum()
    return np.maximum(w, floor, out=w)


def _prototype_update(data: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """Coefficient-weighted mean of the data rows, one row per cluster."""
    totals = coef.sum(axis=1)
    if totals.min() <= _DEGENERATE_EPS:
        lost = int(np.argmin(totals))
        raise DegenerateClusterError(f"cluster {lost} lost all prototype weight")
    return (coef @ data) / totals[:, None]


def _check_state(X: np.ndarray, V: np.ndarray,
                 memberships: MembershipMatrix | None = None,
                 weights: WeightVector | None = None) -> None:
    if V.shape[1] != X.shape[1]:
        raise ValueError(
            f"prototype dimension {V.shape[1]} disagrees with data {X.shape[1]}")
    if memberships is not None:
        if memberships.values.shape != (V.shape[0], X.shape[0]):
            raise ValueError(
                f"membership shape {memberships.values.shape} disagrees with "
                f"{V.shape[0]} clusters and {X.shape[0]} data")
    if weights is not None and weights.values.shape[0] != X.shape[0]:
        raise ValueError(
            f"weight length {weights.values.shape[0]} disagrees with "
            f"{X.shape[0]} data")


def objective(data, prototypes, memberships: MembershipMatrix,
              weights: WeightVector, cfg: RunConfig) -> float:
    """Weighted within-cluster scatter of an arbitrary state."""
    X = _as_matrix(data)
    V = _as_matrix(prototypes)
    _check_state(X, V, memberships, weights)
    d2 = _form_distance_sq(V, X)
    coef = (memberships.values ** cfg.fuzzifier
            * weights.values ** -cfg.weight_exponent)
    return float(np.sum(coef * d2))


def update_memberships(data, prototypes, cfg: RunConfig) -> MembershipMatrix:
    """Memberships minimizing the objective for fixed prototypes."""
    X = _as_matrix(data)
    V = _as_matrix(prototypes)
    _check_state(X, V)
    return MembershipMatrix(
        _membership_update(_form_distance_sq(V, X), cfg.fuzzifier))


def update_weights(data, prototypes, memberships: MembershipMatrix,
                   cfg: RunConfig) -> WeightVector:
    """Weights minimizing the objective for fixed prototypes and memberships."""
    X = _as_matrix(data)
    V = _as_matrix(prototypes)
    _check_state(X, V, memberships)
    d2 = _form_distance_sq(V, X)
    u_pow = memberships.values ** cfg.fuzzifier
    return WeightVector(
        _weight_update(d2, u_pow, cfg.weight_exponent, cfg.weight_budget),
        cfg.weight_budget)


def update_prototypes_approach1(data, memberships: MembershipMatrix,
                                weights: WeightVector,
                                cfg: RunConfig) -> tuple[FuzzyVector, ...]:
    """Exact prototype update on raw (center, spread, spread) triples.

    The stationarity system couples the three components of each
    prototype, but because the distance form is positive definite its
    unique solution is the coefficient-weighted mean, applied
    component-wise.
    """
    X = _as_matrix(data)
    if memberships.n_data != X.shape[0] or weights.values.shape[0] != X.shape[0]:
        raise ValueError("memberships/weights do not match the dataset size")
    coef = (memberships.values ** cfg.fuzzifier
            * weights.values ** -cfg.weight_exponent)
    V = _prototype_update(X, coef)
    return tuple(FuzzyVector.from_array(row) for row in V)


def update_prototypes_approach2(transformed, memberships: MembershipMatrix,
                                weights: WeightVector,
                                cfg: RunConfig) -> np.ndarray:
    """Prototype update in transformed space: the same weighted mean."""
    X = _as_matrix(transformed)
    if memberships.n_data != X.shape[0] or weights.values.shape[0] != X.shape[0]:
        raise ValueError("memberships/weights do not match the dataset size")
    coef = (memberships.values ** cfg.fuzzifier
            * weights.values ** -cfg.weight_exponent)
    return _prototype_update(X, coef)


def initialize(n_data: int, cfg: RunConfig) -> tuple[MembershipMatrix, WeightVector]:
    """Seeded random column-stochastic memberships and uniform weights."""
    if n_data < 1:
        raise ValueError(f"need at least one datum, got {n_data}")
    rng = np.random.default_rng(cfg.seed)
    raw = rng.random((cfg.clusters, n_data))
    memberships = MembershipMatrix(raw / raw.sum(axis=0, keepdims=True))
    weights = WeightVector(np.full(n_data, cfg.weight_budget / n_data),
                           cfg.weight_budget)
    return memberships, weights


def run(data, cfg: RunConfig,
        init: MembershipMatrix | None = None) -> ClusterResult:
    """Alternate prototype, weight and membership updates to convergence.

    Each sweep recomputes prototypes (exact weighted means), then weights,
    then memberships, and stops when the largest entrywise membership
    change drops below the tolerance or the iteration cap is reached.
    After the loop the prototypes are refreshed once from the final
    memberships and weights, so the returned state is internally
    consistent; the refresh is the first half of the next sweep and can
    only lower the objective.
    """
    X = _as_matrix(data)
    n = X.shape[0]
    if n <= cfg.clusters:
        raise ValueError(
            f"need more data points ({n}) than clusters ({cfg.clusters})")

    if init is None:
        memberships, _ = initialize(n, cfg)
    else:
        if init.values.shape != (cfg.clusters, n):
            raise ValueError(
                f"init membership shape {init.values.shape} disagrees with "
                f"{cfg.clusters} clusters and {n} data")
        memberships = init
    U = np.array(memberships.values)
    w = np.full(n, cfg.weight_budget / n)

    if cfg.engine == ENGINE_TRANSFORMED:
        points = transform_array(X, _FORM)
        distance = _euclid_distance_sq
    else:
        points = X
        distance = _form_distance_sq

    m = cfg.fuzzifier
    q = cfg.weight_exponent
    trace: list[float] = []
    converged = False
    iterations = 0
    for sweep in range(1, cfg.max_iter + 1):
        iterations = sweep
        u_pow = U ** m
        try:
            V = _prototype_update(points, u_pow * w ** -q)
        except DegenerateClusterError as err:
            raise DegenerateClusterError(f"{err} at iteration {sweep}") from None
        d2 = distance(V, points)
        if not cfg.freeze_weights:
            w = _weight_update(d2, u_pow, q, cfg.weight_budget)
        new_u = _membership_update(d2, m)
        trace.append(float(np.sum(new_u ** m * w ** -q * d2)))
        shift = float(np.max(np.abs(new_u - U)))
        U = new_u
        if shift < cfg.tolerance:
            converged = True
            break

    coef = U ** m * w ** -q
    try:
        V = _prototype_update(points, coef)
    except DegenerateClusterError as err:
        raise DegenerateClusterError(f"{err} at the final refresh") from None
    trace.append(float(np.sum(coef * distance(V, points))))

    if cfg.engine == ENGINE_TRANSFORMED:
        prototypes = tuple(inverse_transform_vector(row, _FORM) for row in V)
    else:
        prototypes = tuple(FuzzyVector.from_array(row) for row in V)
    return ClusterResult(
        prototypes=prototypes,
        memberships=MembershipMatrix(U),
        weights=WeightVector(w, cfg.weight_budget),
        objective_trace=tuple(trace),
        iterations=iterations,
        converged=converged,
    )
