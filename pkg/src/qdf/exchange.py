"""Multi-system states: symmetry, marginals, and symmetric-extension feasibility.

A state on N subsystems is symmetric when it is invariant under every
permutation of the subsystems, and extendible when some symmetric state on
N + M subsystems marginalizes to it.  Extendibility is what separates
mixtures of product states from merely symmetric entangled states such as the
GHZ state, which is symmetric on three qubits but admits no symmetric
four-qubit extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import opalg
from .errors import ResourceError, ShapeError
from .opalg import SubsystemShape
from .states_povm import DensityOperator

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNDETERMINED = "undetermined"

_PURITY_TOL = 1e-9
_STALL_WINDOW = 200
_STALL_IMPROVEMENT = 0.999  # residual must shrink below this factor per window


@dataclass(frozen=True)
class MultiSystemState:
    """Density operator on a d^n tensor-product space with explicit shape."""

    shape: SubsystemShape
    op: DensityOperator

    def __post_init__(self):
        shape = opalg.check_shape(self.shape)
        object.__setattr__(self, "shape", shape)
        if self.op.dim != shape.total_dim:
            raise ShapeError(
                f"operator dim {self.op.dim} does not match {shape.d}**{shape.n}"
            )

    @classmethod
    def from_matrix(cls, d: int, n: int, matrix) -> "MultiSystemState":
        return cls(SubsystemShape(d, n), DensityOperator(matrix))

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


@dataclass(frozen=True)
class ExtensionReport:
    """Outcome of a symmetric-extension feasibility query."""

    verdict: str
    residual: float
    iterations: int
    certificate: MultiSystemState | None


def ghz_state() -> MultiSystemState:
    """The three-qubit state (|000> + |111>)/sqrt(2) as a projector."""
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1.0 / math.sqrt(2.0)
    return MultiSystemState.from_matrix(2, 3, np.outer(v, v.conj()))


def is_symmetric(state: MultiSystemState, tol: float = 1e-10) -> bool:
    """Whether the state is invariant under every subsystem permutation.

    Checks the adjacent transpositions only; they generate the full
    symmetric group, so invariance under them implies invariance under all
    permutations.
    """
    if tol <= 0:
        raise ShapeError("tolerance must be positive")
    m = state.matrix
    for perm in opalg.adjacent_transpositions(state.n):
        if np.max(np.abs(opalg.permute_subsystems(m, state.shape, perm) - m)) > tol:
            return False
    return True


def _orbit_index(d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Partition the d^n x d^n matrix entries into permutation orbits.

    Entry (r, c) decodes into per-subsystem index pairs (i_k, j_k); two
    entries lie in one orbit exactly when their multisets of pairs agree.
    Returns (labels, counts): an orbit id per flat entry and the orbit sizes.
    """
    dim = d**n
    base = d * d
    if n * math.log2(base) > 62:
        raise ResourceError(f"orbit keys for d={d}, n={n} overflow 64-bit integers")
    idx = np.arange(dim)
    digits = np.empty((dim, n), dtype=np.int64)
    for k in range(n):
        digits[:, n - 1 - k] = (idx // d**k) % d
    symbols = (digits[:, None, :] * d + digits[None, :, :]).reshape(dim * dim, n)
    symbols.sort(axis=1)
    keys = np.zeros(dim * dim, dtype=np.int64)
    for k in range(n):
        keys = keys * base + symbols[:, k]
    _, labels, counts = np.unique(keys, return_inverse=True, return_counts=True)
    return labels.ravel(), counts


def _symmetrize_matrix(m: np.ndarray, shape: SubsystemShape) -> np.ndarray:
    labels, counts = _orbit_index(shape.d, shape.n)
    flat = m.ravel()
    sums = np.bincount(labels, weights=flat.real) + 1j * np.bincount(labels, weights=flat.imag)
    means = sums / counts
    return means[labels].reshape(m.shape)


def symmetrize(state: MultiSystemState) -> MultiSystemState:
    """Group average of the state over all subsystem permutations.

    Idempotent, trace preserving, and the identity on symmetric inputs.
    Computed by averaging matrix entries over permutation orbits, which
    equals the average over all n! permuted copies.
    """
    if state.n > 8:
        raise ResourceError(f"symmetrization capped at 8 subsystems, got {state.n}")
    sym = _symmetrize_matrix(state.matrix, state.shape)
    return MultiSystemState(state.shape, DensityOperator(sym))


def marginal(state: MultiSystemState, keep_n: int) -> MultiSystemState:
    """State of the first ``keep_n`` subsystems (trace over the rest)."""
    if keep_n < 1 or keep_n > state.n:
        raise ShapeError(f"keep_n must lie in 1..{state.n}, got {keep_n}")
    if keep_n == state.n:
        return state
    reduced = opalg.partial_trace(state.matrix, state.shape, range(1, keep_n + 1))
    return MultiSystemState.from_matrix(state.d, keep_n, reduced)


def pure_marginal_shortcut(state: MultiSystemState, extra_m: int) -> str | None:
    """Exact extension verdict available when the input state is pure.

    Any state of N + M systems marginalizing to a pure state must factor as
    state x tau, and such a product is symmetric only when the state is an
    identical pure product sigma^(x N).  Purity of the single-system marginal
    detects that case; for it the shortcut stays silent and defers to the
    numerical search.  Returns ``INFEASIBLE`` or ``None``.
    """
    if extra_m < 1:
        raise ShapeError(f"extra_m must be positive, got {extra_m}")
    w = np.linalg.eigvalsh(state.matrix)
    if w[-1] < 1.0 - _PURITY_TOL:
        return None
    single = marginal(state, 1)
    if single.op.purity() >= 1.0 - _PURITY_TOL:
        return None
    return INFEASIBLE


class _AffineProjector:
    """Orthogonal projection onto {X symmetric : tr over the last M = target}.

    Works in coordinates over the orthonormal basis of permutation-orbit
    indicator matrices, where the symmetric subspace is exact and the
    marginal constraint is a small linear system solved by pseudo-inverse.
    """

    def __init__(self, d: int, n_keep: int, total: int, target: np.ndarray):
        self.d, self.n_keep, self.total = d, n_keep, total
        self.dim = d**total
        self.labels, self.counts = _orbit_index(d, total)
        self.sqrt_counts = np.sqrt(self.counts)

        dk = d**n_keep
        dm = d ** (total - n_keep)
        n_orbits = len(self.counts)
        c = np.zeros((dk * dk, n_orbits))
        rows = np.arange(self.dim)
        row_keep = rows // dm
        row_tail = rows % dm
        for ck in range(dk):
            flat = rows * self.dim + ck * dm + row_tail
            orbit = self.labels[flat]
            np.add.at(c, (row_keep * dk + ck, orbit), 1.0 / self.sqrt_counts[orbit])
        self.constraint = c
        self.solver = c.T @ np.linalg.pinv(c @ c.T)
        self.target_vec = target.ravel()

    def coords(self, m: np.ndarray) -> np.ndarray:
        flat = m.ravel()
        sums = np.bincount(self.labels, weights=flat.real) + 1j * np.bincount(
            self.labels, weights=flat.imag
        )
        return sums / self.sqrt_counts

    def matrix_from(self, y: np.ndarray) -> np.ndarray:
        return (y / self.sqrt_counts)[self.labels].reshape(self.dim, self.dim)

    def project(self, m: np.ndarray) -> np.ndarray:
        y = self.coords(m)
        y = y - self.solver @ (self.constraint @ y - self.target_vec)
        out = self.matrix_from(y)
        return 0.5 * (out + out.conj().T)


def _psd_project(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def _constraint_violation(
    m: np.ndarray, shape: SubsystemShape, n_keep: int, target: np.ndarray
) -> float:
    dev = abs(float(np.trace(m).real) - 1.0)
    reduced = opalg.partial_trace(m, shape, range(1, n_keep + 1))
    dev = max(dev, float(np.max(np.abs(reduced - target))))
    for perm in opalg.adjacent_transpositions(shape.n):
        dev = max(dev, float(np.max(np.abs(opalg.permute_subsystems(m, shape, perm) - m))))
    return dev


def extension_feasible(
    state: MultiSystemState,
    extra_m: int,
    max_iter: int = 5000,
    tol: float = 1e-7,
) -> ExtensionReport:
    """Search for a symmetric extension of ``state`` to N + M subsystems.

    Alternates orthogonal projections between the PSD cone and the affine
    set of symmetric operators with the required marginal.  Returns
    ``feasible`` with a verified certificate when the iterate satisfies all
    constraints within ``tol``; ``infeasible`` when the exact pure-marginal
    shortcut applies or when the residual stays above ``10 * tol`` without
    improvement for 200 consecutive iterations; otherwise ``undetermined``.
    """
    if extra_m < 1:
        raise ShapeError(f"extra_m must be positive, got {extra_m}")
    total_shape = opalg.check_shape(SubsystemShape(state.d, state.n + extra_m))

    if pure_marginal_shortcut(state, extra_m) == INFEASIBLE:
        return ExtensionReport(INFEASIBLE, math.inf, 0, None)

    d, n_keep, total = state.d, state.n, total_shape.n
    target = state.matrix
    projector = _AffineProjector(d, n_keep, total, target)

    x = np.kron(target, opalg.tensor_power(np.eye(d, dtype=complex) / d, extra_m))
    residuals: list[float] = []
    for it in range(1, max_iter + 1):
        y = projector.project(x)
        z = _psd_project(y)
        residual = float(np.linalg.norm(y - z))
        residuals.append(residual)

        violation = _constraint_violation(z, total_shape, n_keep, target)
        if violation <= tol:
            tr = float(np.trace(z).real)
            cert = MultiSystemState.from_matrix(d, total, z / tr)
            return ExtensionReport(FEASIBLE, residual, it, cert)

        if (
            it >= _STALL_WINDOW
            and residual > 10.0 * tol
            and residual > _STALL_IMPROVEMENT * residuals[it - _STALL_WINDOW]
        ):
            return ExtensionReport(INFEASIBLE, residual, it, None)
        x = z

    return ExtensionReport(UNDETERMINED, residuals[-1] if residuals else math.inf, max_iter, None)
