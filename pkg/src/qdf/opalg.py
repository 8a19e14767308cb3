"""Dense complex operator algebra on tensor-product spaces.

Everything here works on plain ``numpy`` arrays of ``complex128`` in row-major
order.  Subsystem 1 is always the leftmost (slowest-varying) tensor factor, so
``tensor(a, b)`` puts ``a`` on subsystem 1.  All functions are pure and never
mutate their arguments.
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvariantError, NotPositiveDefiniteError, ResourceError, ShapeError

# Tolerances used throughout the library.
HERM_TOL = 1e-10   # max-entry deviation from the conjugate transpose
PD_TOL = 1e-12     # eigenvalues at or below this are treated as non-positive
PSD_TOL = 1e-9     # eigenvalues in [-PSD_TOL, 0) are clipped to 0
TRACE_TOL = 1e-10  # allowed deviation of a unit trace

# Hard cap on the total Hilbert-space dimension handled by dense routines.
MAX_DIM = 4096


class SubsystemShape(NamedTuple):
    """Local dimension ``d`` and subsystem count ``n`` of a product space."""

    d: int
    n: int

    @property
    def total_dim(self) -> int:
        return self.d**self.n


def check_shape(shape: SubsystemShape) -> SubsystemShape:
    """Validate a subsystem shape against the desk-scale limits."""
    d, n = int(shape[0]), int(shape[1])
    if d < 2:
        raise ShapeError(f"local dimension must be >= 2, got {d}")
    if n < 1:
        raise ShapeError(f"subsystem count must be >= 1, got {n}")
    if d**n > MAX_DIM:
        raise ResourceError(f"total dimension {d}**{n} exceeds limit {MAX_DIM}")
    return SubsystemShape(d, n)


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    return m


def hermitian_part(a, tol: float = HERM_TOL) -> np.ndarray:
    """Return ``(a + a^dagger)/2`` after checking ``a`` is Hermitian within ``tol``.

    Deviations below ``tol`` (max-entry norm) are treated as floating-point
    drift and symmetrized away; anything larger raises.
    """
    m = as_operator(a)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise InvariantError(f"matrix is not Hermitian: max |A - A^dag| = {dev:.3e} > {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` on the leading subsystem."""
    am, bm = as_operator(a), as_operator(b)
    if am.shape[0] * bm.shape[0] > MAX_DIM:
        raise ResourceError(
            f"tensor product dimension {am.shape[0] * bm.shape[0]} exceeds limit {MAX_DIM}"
        )
    return np.kron(am, bm)


def tensor_power(a, n: int) -> np.ndarray:
    """n-fold Kronecker power of ``a``."""
    am = as_operator(a)
    if n < 1:
        raise ShapeError(f"tensor power requires n >= 1, got {n}")
    if am.shape[0] ** n > MAX_DIM:
        raise ResourceError(f"tensor power dimension {am.shape[0]}**{n} exceeds limit {MAX_DIM}")
    out = am
    for _ in range(n - 1):
        out = np.kron(out, am)
    return out


def _split_indices(dim: int, shape: SubsystemShape) -> None:
    if dim != shape.total_dim:
        raise ShapeError(
            f"operator dimension {dim} does not match {shape.d}**{shape.n} = {shape.total_dim}"
        )


def partial_trace(op, shape: SubsystemShape, keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (1-based indices).

    The kept subsystems appear in the output in their original relative
    order.  Tracing over everything returns the 1x1 matrix ``[[tr(op)]]``.
    """
    m = as_operator(op)
    shape = SubsystemShape(*shape)
    _split_indices(m.shape[0], shape)
    keep_list = sorted(set(int(k) for k in keep))
    if not keep_list:
        raise ShapeError("keep must be a nonempty set of subsystem indices")
    if keep_list[0] < 1 or keep_list[-1] > shape.n:
        raise ShapeError(f"keep indices {keep_list} outside 1..{shape.n}")

    d, n = shape
    t = m.reshape((d,) * (2 * n))
    # Contract ket axis k-1 against bra axis n+k-1 for every traced subsystem.
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ResourceError(f"too many subsystems for einsum contraction: {n}")
    ket = list(letters[:n])
    bra = list(letters[n : 2 * n])
    for k in range(1, n + 1):
        if k not in keep_list:
            bra[k - 1] = ket[k - 1]
    out_sub = "".join(ket[k - 1] for k in keep_list) + "".join(bra[k - 1] for k in keep_list)
    reduced = np.einsum("".join(ket) + "".join(bra) + "->" + out_sub, t)
    dk = d ** len(keep_list)
    return reduced.reshape(dk, dk)


def permute_subsystems(op, shape: SubsystemShape, perm: Sequence[int]) -> np.ndarray:
    """Relabel tensor factors so that output factor k carries input factor perm[k].

    ``perm`` is a 1-based permutation of ``{1..n}``; the same relabeling is
    applied on the ket and bra sides.  ``permute_subsystems(rho_a x rho_b,
    (2, 1))`` equals ``rho_b x rho_a``.
    """
    m = as_operator(op)
    shape = SubsystemShape(*shape)
    _split_indices(m.shape[0], shape)
    d, n = shape
    p = [int(x) for x in perm]
    if sorted(p) != list(range(1, n + 1)):
        raise ShapeError(f"{perm} is not a permutation of 1..{n}")
    # Output index slot perm[k] reads input slot k, i.e. transpose axis map
    # axes[j] = position of j+1 in perm.
    inv = [0] * n
    for k, target in enumerate(p):
        inv[target - 1] = k
    axes = inv + [n + a for a in inv]
    t = m.reshape((d,) * (2 * n))
    return np.ascontiguousarray(t.transpose(axes)).reshape(d**n, d**n)


def eig_hermitian(op, tol: float = HERM_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and
    orthonormal eigenvectors in the columns of ``v``.  Each column's phase is
    fixed so that its largest-magnitude component is real and nonnegative,
    which makes the output deterministic up to eigenspace degeneracy.
    """
    m = hermitian_part(op, tol)
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        i = int(np.argmax(np.abs(v[:, j])))
        pivot = v[i, j]
        if np.abs(pivot) > 0:
            v[:, j] *= np.conj(pivot) / np.abs(pivot)
    return w.real, v


def inv_sqrt(op) -> np.ndarray:
    """Inverse square root of a positive definite Hermitian operator."""
    w, v = eig_hermitian(op)
    if w[-1] <= PD_TOL:
        raise NotPositiveDefiniteError(
            f"operator is not positive definite: smallest eigenvalue {w[-1]:.3e}"
        )
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def trace_distance(a, b) -> float:
    """Half the sum of absolute eigenvalues of the Hermitian difference a - b."""
    diff = hermitian_part(a) - hermitian_part(b)
    if diff.shape[0] != diff.shape[1]:
        raise ShapeError("operands must share a dimension")
    w = np.linalg.eigvalsh(diff)
    return 0.5 * float(np.sum(np.abs(w)))


def adjacent_transpositions(n: int) -> list[tuple[int, ...]]:
    """The n-1 adjacent transpositions of {1..n}, a generating set of S_n."""
    perms = []
    for k in range(1, n):
        p = list(range(1, n + 1))
        p[k - 1], p[k] = p[k], p[k - 1]
        perms.append(tuple(p))
    return perms


def all_permutations(n: int) -> list[tuple[int, ...]]:
    """All n! permutations of {1..n}; capped at n = 8."""
    if n > 8:
        raise ResourceError(f"refusing to enumerate {n}! permutations (n > 8)")
    return [tuple(p) for p in itertools.permutations(range(1, n + 1))]
