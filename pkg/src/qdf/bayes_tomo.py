"""Bayesian state tomography on a discrete prior grid.

The prior over states is a finite grid of density operators with weights;
measurement counts update the weights by multiplying in the likelihood of the
observed outcomes and renormalizing.  Two observers with different priors that
both put weight near the data-generating state are driven to nearby posterior
mean states once enough outcomes accumulate, and the predictive joint state
for future systems is the corresponding mixture of product states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import opalg
from .definetti import MixingEnsemble, mix_product_states
from .errors import DegeneratePosteriorError, PriorSupportError, ShapeError
from .exchange import MultiSystemState
from .states_povm import DensityOperator, Povm, born, density_from_bloch

SUPPORT_WEIGHT = 1e-6
SUPPORT_RADIUS = 0.05

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
DEFAULT_RADII = (0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome counts of repeated measurements with one POVM."""

    povm_id: str
    counts: np.ndarray
    total: int
    seed: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or np.any(c < 0):
            raise ShapeError("counts must be a vector of nonnegative integers")
        if int(c.sum()) != self.total:
            raise ShapeError(f"counts sum {int(c.sum())} != declared total {self.total}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)


class PriorGrid:
    """Discrete probability distribution over a fixed grid of states."""

    def __init__(self, points, weights):
        self.points = tuple(points)
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.points):
            raise ShapeError("weights and points must have equal lengths")
        if np.any(w < 0):
            raise ShapeError("prior weights must be nonnegative")
        total = w.sum()
        if abs(total - 1.0) > 1e-12:
            raise ShapeError(f"prior weights sum to {total!r}, not 1")
        if not self.points:
            raise ShapeError("prior grid must be nonempty")
        dims = {p.dim for p in self.points}
        if len(dims) > 1:
            raise ShapeError(f"grid points have mixed dimensions {sorted(dims)}")
        self.weights = w.copy()
        self.weights.setflags(write=False)

    @classmethod
    def uniform(cls, points) -> "PriorGrid":
        points = tuple(points)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    @property
    def dim(self) -> int:
        return self.points[0].dim

    def __len__(self) -> int:
        return len(self.points)

    def mean_state(self) -> DensityOperator:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for w, p in zip(self.weights, self.points):
            acc += w * p.matrix
        return DensityOperator(acc)

    def nearest(self, rho: DensityOperator) -> tuple[int, float]:
        """Index and trace distance of the grid point closest to ``rho``."""
        dists = [opalg.trace_distance(p.matrix, rho.matrix) for p in self.points]
        i = int(np.argmin(dists))
        return i, float(dists[i])


def fibonacci_sphere(n: int) -> np.ndarray:
    """n unit vectors spread quasi-uniformly over the sphere, poles included."""
    if n < 1:
        raise ShapeError(f"need at least one direction, got {n}")
    if n == 1:
        return np.array([[0.0, 0.0, 1.0]])
    k = np.arange(n)
    z = 1.0 - 2.0 * k / (n - 1)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * _GOLDEN_ANGLE
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def default_qubit_grid(n_points: int = 200, radii=DEFAULT_RADII) -> list[DensityOperator]:
    """Quasi-uniform grid of qubit states in the closed Bloch ball.

    One point sits at the center; the rest are spread over spherical shells
    at the given radii with per-shell counts proportional to the shell area
    (largest-remainder rounding), each shell sampled by a pole-inclusive
    Fibonacci spiral.  The default yields exactly 200 states.
    """
    if n_points < 1 + len(radii):
        raise ShapeError(f"grid needs at least {1 + len(radii)} points")
    weights = np.asarray(radii, dtype=float) ** 2
    shares = (n_points - 1) * weights / weights.sum()
    counts = np.floor(shares).astype(int)
    remainder = shares - counts
    for i in np.argsort(remainder)[::-1][: (n_points - 1) - counts.sum()]:
        counts[i] += 1
    points = [density_from_bloch([0.0, 0.0, 0.0])]
    for r, m in zip(radii, counts):
        if m == 0:
            continue
        for direction in fibonacci_sphere(int(m)):
            points.append(density_from_bloch(r * direction))
    return points


def bloch_radius(rho: DensityOperator) -> float:
    """Bloch-vector length of a qubit state, recovered from its purity."""
    if rho.dim != 2:
        raise ShapeError("Bloch radius is defined for qubits only")
    return math.sqrt(max(0.0, 2.0 * rho.purity() - 1.0))


def mixedness_biased_weights(points) -> np.ndarray:
    """Prior weights favoring mixed states: proportional to 2 - |Bloch vector|."""
    w = np.array([2.0 - bloch_radius(p) for p in points])
    return w / w.sum()


def sample_outcomes(rho: DensityOperator, povm: Povm, k: int, seed: int) -> np.ndarray:
    """k i.i.d. outcome indices drawn by inverse CDF from the Born distribution.

    Uses the seedable, splittable PCG64 generator, so records are
    bit-reproducible for a fixed seed.
    """
    if k < 0:
        raise ShapeError(f"sample count must be nonnegative, got {k}")
    rng = np.random.Generator(np.random.PCG64(seed))
    p = born(rho, povm)
    edges = np.cumsum(p)
    edges[-1] = 1.0
    return np.searchsorted(edges, rng.random(k), side="right").astype(np.int64)


def simulate_record(rho_true: DensityOperator, povm: Povm, k: int, seed: int) -> MeasurementRecord:
    """Measurement record of k Born-rule samples from ``rho_true``."""
    outcomes = sample_outcomes(rho_true, povm, k, seed)
    counts = np.bincount(outcomes, minlength=len(povm))
    return MeasurementRecord(povm_id=povm.name, counts=counts, total=k, seed=seed)


def log_likelihood(record: MeasurementRecord, rho: DensityOperator, povm: Povm) -> float:
    """Log probability of the recorded counts under ``rho`` (multinomial factor dropped).

    Returns ``-inf`` when an observed outcome has zero Born probability; the
    multinomial coefficient is omitted because it cancels in every posterior.
    """
    if len(record.counts) != len(povm):
        raise ShapeError(f"record has {len(record.counts)} outcomes, POVM has {len(povm)}")
    p = born(rho, povm)
    total = 0.0
    for c, q in zip(record.counts, p):
        if c == 0:
            continue
        if q <= 0.0:
            return -math.inf
        total += float(c) * math.log(q)
    return total


def posterior_update(prior: PriorGrid, record: MeasurementRecord, povm: Povm) -> PriorGrid:
    """Bayes update of the grid weights by the likelihood of ``record``.

    Carried out in log space; grid points with zero likelihood get weight
    exactly 0.  Raises :class:`DegeneratePosteriorError` if every point is
    incompatible with the record.
    """
    log_post = np.full(len(prior), -math.inf)
    for i, (w, point) in enumerate(zip(prior.weights, prior.points)):
        if w <= 0.0:
            continue
        ll = log_likelihood(record, point, povm)
        if ll > -math.inf:
            log_post[i] = math.log(w) + ll
    peak = np.max(log_post)
    if peak == -math.inf:
        raise DegeneratePosteriorError("every grid point has zero posterior weight")
    w = np.exp(log_post - peak)
    return PriorGrid(prior.points, w / w.sum())


def predictive_state(posterior: PriorGrid, n: int) -> MultiSystemState:
    """Joint state assigned to n further systems: the posterior product mixture."""
    keep = posterior.weights > 0.0
    ens = MixingEnsemble(
        posterior.weights[keep] / posterior.weights[keep].sum(),
        [p for p, k in zip(posterior.points, keep) if k],
    )
    return mix_product_states(ens, n)


def _check_support(prior: PriorGrid, rho_true: DensityOperator, label: str) -> None:
    for w, point in zip(prior.weights, prior.points):
        if w >= SUPPORT_WEIGHT:
            if opalg.trace_distance(point.matrix, rho_true.matrix) <= SUPPORT_RADIUS + 1e-12:
                return
    raise PriorSupportError(
        f"prior {label} has no weight >= {SUPPORT_WEIGHT} within trace distance "
        f"{SUPPORT_RADIUS} of the true state"
    )


def convergence_experiment(
    prior_a: PriorGrid,
    prior_b: PriorGrid,
    rho_true: DensityOperator,
    povm: Povm,
    k_schedule,
    seed: int,
) -> list[tuple[int, float, float, float]]:
    """Track two posteriors along one shared measurement record.

    Both priors must put weight at least 1e-6 on some grid point within
    trace distance 0.05 of ``rho_true``.  A single outcome stream of
    ``max(k_schedule)`` samples is drawn once; at each K in the schedule the
    first K outcomes update each prior and the row
    ``(K, dist(mean_a, mean_b), dist(mean_a, true), dist(mean_b, true))``
    is emitted, with distances in trace norm.
    """
    _check_support(prior_a, rho_true, "a")
    _check_support(prior_b, rho_true, "b")
    schedule = [int(k) for k in k_schedule]
    if any(k < 0 for k in schedule):
        raise ShapeError("k_schedule entries must be nonnegative")
    outcomes = sample_outcomes(rho_true, povm, max(schedule, default=0), seed)

    rows = []
    for k in schedule:
        counts = np.bincount(outcomes[:k], minlength=len(povm))
        record = MeasurementRecord(povm_id=povm.name, counts=counts, total=k, seed=seed)
        mean_a = posterior_update(prior_a, record, povm).mean_state()
        mean_b = posterior_update(prior_b, record, povm).mean_state()
        rows.append(
            (
                k,
                opalg.trace_distance(mean_a.matrix, mean_b.matrix),
                opalg.trace_distance(mean_a.matrix, rho_true.matrix),
                opalg.trace_distance(mean_b.matrix, rho_true.matrix),
            )
        )
    return rows
