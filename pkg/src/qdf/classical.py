"""Classical exchangeability: i.i.d. tables, symmetric extension, urn mixtures.

A joint distribution of N discrete variables is symmetric when invariant
under argument permutations and exchangeable when it also extends to a
symmetric distribution of arbitrarily many variables.  Symmetry alone is not
enough: the perfectly anticorrelated pair has no symmetric three-variable
extension.  For binary variables, conditioning a symmetric distribution on
the total count of ones reduces every question to drawing without replacement
from an urn, which yields an exact finite mixture representation and, in the
many-variable limit, a mixture of binomials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalError, ResourceError, ShapeError

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"

_MAX_TABLE = 1 << 20
_EXACT_FACTORIAL_LIMIT = 30  # beyond this, falling factorials go to log space


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over k^n assignments, variable 1 most significant."""

    n_vars: int
    arity: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.arity**self.n_vars,):
            raise ShapeError(f"table needs {self.arity}**{self.n_vars} entries, got {p.shape}")
        if np.any(p < -1e-12):
            raise ShapeError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ShapeError(f"probabilities sum to {p.sum()!r}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def table(self) -> np.ndarray:
        return self.probs.reshape((self.arity,) * self.n_vars)

    def prob(self, assignment: Iterable[int]) -> float:
        idx = 0
        for x in assignment:
            idx = idx * self.arity + int(x)
        return float(self.probs[idx])


@dataclass(frozen=True)
class CountDistribution:
    """Distribution of the number of ones among max_m binary variables."""

    max_m: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.max_m + 1,):
            raise ShapeError(f"need {self.max_m + 1} entries, got {p.shape}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ShapeError("count probabilities must be nonnegative and sum to 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


def as_simplex(p) -> np.ndarray:
    """Validate membership of the probability simplex."""
    vec = np.asarray(p, dtype=float)
    if vec.ndim != 1 or len(vec) < 1:
        raise ShapeError("simplex point must be a nonempty vector")
    if np.any(vec < -1e-12) or abs(vec.sum() - 1.0) > 1e-12:
        raise ShapeError(f"not a simplex point: {vec!r}")
    return np.clip(vec, 0.0, None)


def iid_joint(p, n: int) -> JointDistribution:
    """Product table p(x_1) ... p(x_n) of independent identical trials."""
    vec = as_simplex(p)
    k = len(vec)
    if n < 1:
        raise ShapeError(f"need n >= 1, got {n}")
    if k**n > _MAX_TABLE:
        raise ResourceError(f"table with {k}**{n} entries exceeds limit")
    table = vec
    for _ in range(n - 1):
        table = np.multiply.outer(table, vec)
    return JointDistribution(n, k, table.ravel())


def is_symmetric_dist(j: JointDistribution, tol: float = 1e-12) -> bool:
    """Whether the table is invariant under permutations of its arguments."""
    t = j.table()
    for axis in range(j.n_vars - 1):
        if np.max(np.abs(np.swapaxes(t, axis, axis + 1) - t)) > tol:
            return False
    return True


def _type_key(assignment: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(assignment))


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """A marginal constraint that zero-forced variables cannot satisfy.

    ``forced_types`` maps each symmetric-orbit representative appearing in
    the violated constraint to the zero-mass marginal assignment that forced
    it to vanish; ``required_mass`` is the positive probability the violated
    constraint still demands from them.
    """

    violated_assignment: tuple[int, ...]
    required_mass: float
    forced_types: dict[tuple[int, ...], tuple[int, ...]]

    def describe(self) -> str:
        forcing = ", ".join(
            f"q{''.join(map(str, t))}=0 (from marginal {x})"
            for t, x in sorted(self.forced_types.items())
        )
        return (
            f"marginal {self.violated_assignment} requires mass {self.required_mass}"
            f" from orbit variables all forced to zero: {forcing}"
        )


def extension_feasible_classical(
    j: JointDistribution, extra_m: int
) -> tuple[str, JointDistribution | InfeasibilityCertificate | None]:
    """Exact symmetric-extension feasibility for a classical joint table.

    Solves a linear program over symmetric tables of n + m variables, one
    variable per permutation orbit, with the marginal constraints of ``j``.
    Returns ``("feasible", certificate_table)`` or ``("infeasible", cert)``
    where ``cert`` is a forced-zero contradiction when one exists and None
    otherwise.
    """
    if extra_m < 1:
        raise ShapeError(f"extra_m must be positive, got {extra_m}")
    k, n = j.arity, j.n_vars
    total = n + extra_m
    if k**total > _MAX_TABLE:
        raise ResourceError(f"extension table with {k}**{total} entries exceeds limit")

    orbits = [
        _type_key(t) for t in itertools.combinations_with_replacement(range(k), total)
    ]
    orbit_id = {t: i for i, t in enumerate(orbits)}

    # One equality per marginal assignment x: sum_y z_type(x + y) = p(x).
    rows = []
    rhs = []
    assignments = list(itertools.product(range(k), repeat=n))
    tails = list(itertools.product(range(k), repeat=extra_m))
    for x in assignments:
        row = np.zeros(len(orbits))
        for y in tails:
            row[orbit_id[_type_key(x + y)]] += 1.0
        rows.append(row)
        rhs.append(j.prob(x))
    # Normalization (redundant given the marginals, kept for conditioning).
    norm_row = np.zeros(len(orbits))
    for t in orbits:
        norm_row[orbit_id[t]] = _orbit_size(t, total)
    rows.append(norm_row)
    rhs.append(1.0)

    a_eq = np.array(rows)
    b_eq = np.array(rhs)
    res = linprog(
        c=np.zeros(len(orbits)),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, None)] * len(orbits),
        method="highs",
    )
    if res.status == 0:
        z = np.clip(res.x, 0.0, None)
        table = np.empty(k**total)
        for idx, s in enumerate(itertools.product(range(k), repeat=total)):
            table[idx] = z[orbit_id[_type_key(s)]]
        table /= table.sum()
        return FEASIBLE, JointDistribution(total, k, table)
    if res.status != 2:
        raise NumericalError(f"linear program ended with status {res.status}: {res.message}")

    return INFEASIBLE, _zero_forcing_contradiction(j, extra_m, assignments, tails)


def _orbit_size(t: tuple[int, ...], total: int) -> float:
    size = math.factorial(total)
    for sym in set(t):
        size //= math.factorial(t.count(sym))
    return float(size)


def _zero_forcing_contradiction(
    j: JointDistribution, extra_m: int, assignments, tails
) -> InfeasibilityCertificate | None:
    forced: dict[tuple[int, ...], tuple[int, ...]] = {}
    for x in assignments:
        if j.prob(x) <= 1e-15:
            for y in tails:
                forced.setdefault(_type_key(x + y), x)
    for x in assignments:
        mass = j.prob(x)
        if mass <= 1e-15:
            continue
        involved = {_type_key(x + y) for y in tails}
        if involved <= forced.keys():
            return InfeasibilityCertificate(
                violated_assignment=x,
                required_mass=mass,
                forced_types={t: forced[t] for t in sorted(involved)},
            )
    return None


def _log_falling_factorial(r: int, q: int) -> float:
    return math.lgamma(r + 1) - math.lgamma(r - q + 1)


def falling_factorial(r: int, q: int) -> float:
    """r (r-1) ... (r-q+1); exact below 30, log-space above to avoid overflow."""
    if q < 0 or r < 0:
        raise ShapeError("falling factorial needs nonnegative arguments")
    if q > r:
        return 0.0
    if r <= _EXACT_FACTORIAL_LIMIT:
        out = 1
        for i in range(q):
            out *= r - i
        return float(out)
    return math.exp(_log_falling_factorial(r, q))


def urn_conditional(n: int, n_trials: int, m: int, m_trials: int) -> float:
    """Probability of a fixed sequence with n ones in N draws from an urn.

    The urn holds ``m_trials`` balls of which ``m`` are ones and the draws
    are without replacement; the value is (m)_n (M-m)_{N-n} / (M)_N, zero
    whenever the requested counts cannot be drawn.
    """
    if not (0 <= n <= n_trials <= m_trials and 0 <= m <= m_trials):
        raise ShapeError(
            f"need 0 <= n <= N <= M and 0 <= m <= M, got n={n}, N={n_trials}, m={m}, M={m_trials}"
        )
    if n > m or n_trials - n > m_trials - m:
        return 0.0
    if m_trials <= _EXACT_FACTORIAL_LIMIT:
        num = falling_factorial(m, n) * falling_factorial(m_trials - m, n_trials - n)
        return num / falling_factorial(m_trials, n_trials)
    log_value = (
        _log_falling_factorial(m, n)
        + _log_falling_factorial(m_trials - m, n_trials - n)
        - _log_falling_factorial(m_trials, n_trials)
    )
    return math.exp(log_value)


def finite_representation(count_dist: CountDistribution, n_trials: int) -> np.ndarray:
    """Distribution of ones among the first N of M exchangeable binary trials.

    p(n, N) = C(N, n) sum_m urn(n, N | m, M) p(m, M); exact marginalization
    of the symmetric M-variable table determined by the count distribution.
    """
    m_trials = count_dist.max_m
    if not (1 <= n_trials <= m_trials):
        raise ShapeError(f"need 1 <= N <= {m_trials}, got {n_trials}")
    out = np.zeros(n_trials + 1)
    for n in range(n_trials + 1):
        total = sum(
            urn_conditional(n, n_trials, m, m_trials) * count_dist.probs[m]
            for m in range(m_trials + 1)
        )
        out[n] = math.comb(n_trials, n) * total
    return out


def enumerate_marginal_counts(count_dist: CountDistribution, n_trials: int) -> np.ndarray:
    """Brute-force p(n, N) by summing the full symmetric table sequence by sequence.

    The count distribution fixes a symmetric table on M binary variables
    (every sequence with m ones carries p(m, M) / C(M, m)); this walks all
    2^M sequences and tallies ones among the first N.  Only for cross-checks
    at small M.
    """
    m_trials = count_dist.max_m
    if not (1 <= n_trials <= m_trials):
        raise ShapeError(f"need 1 <= N <= {m_trials}, got {n_trials}")
    if m_trials > 20:
        raise ResourceError(f"enumeration over 2**{m_trials} sequences exceeds limit")
    out = np.zeros(n_trials + 1)
    for bits in itertools.product((0, 1), repeat=m_trials):
        m = sum(bits)
        n = sum(bits[:n_trials])
        out[n] += count_dist.probs[m] / math.comb(m_trials, m)
    return out


def uniform_count_family(m_trials: int) -> CountDistribution:
    """All counts equally likely: the discrete analogue of a flat mixing density."""
    return CountDistribution(m_trials, np.full(m_trials + 1, 1.0 / (m_trials + 1)))


def point_mass_count_family(z: float) -> Callable[[int], CountDistribution]:
    """Family concentrated at frequency z: all mass on m = round(z M)."""
    if not 0.0 <= z <= 1.0:
        raise ShapeError(f"frequency must lie in [0, 1], got {z}")

    def family(m_trials: int) -> CountDistribution:
        probs = np.zeros(m_trials + 1)
        probs[round(z * m_trials)] = 1.0
        return CountDistribution(m_trials, probs)

    return family


def limit_convergence_demo(
    p_family: Callable[[int], CountDistribution], n_trials: int, m_list
) -> list[tuple[int, np.ndarray]]:
    """p(n, N) for each urn size M in an increasing list.

    As M grows, the values approach the binomial mixture determined by the
    limiting frequency distribution of the family; for the uniform family the
    limit is 1 / (N + 1) for every n.
    """
    ms = [int(m) for m in m_list]
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ShapeError(f"m_list must be strictly increasing, got {ms}")
    return [(m, finite_representation(p_family(m), n_trials)) for m in ms]
