"""Real-Hilbert-space counterexample machinery.

Over the reals, states and measurement elements are symmetric matrices, and
the space of d x d real symmetric matrices has dimension d(d+1)/2.  For two
or more subsystems that count falls strictly short of the symmetric-matrix
dimension of the joint space, so products of single-system symmetric
operators no longer span everything.  An exchangeable two-qubit state built
from spin-y product states is real, symmetric, and positive, yet its
projection onto the span of symmetric products misses a piece of Frobenius
norm one half: no mixture of real product states can ever reproduce it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import opalg
from .errors import InvariantError, ShapeError

_SYM_TOL = 1e-10


def as_real_symmetric(a, tol: float = _SYM_TOL) -> np.ndarray:
    """Coerce to a real symmetric matrix, symmetrizing tiny drift."""
    m = np.asarray(a)
    if np.iscomplexobj(m):
        if m.size and np.max(np.abs(m.imag)) > tol:
            raise InvariantError("matrix has a genuinely imaginary part")
        m = m.real
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > tol:
        raise InvariantError("matrix is not symmetric")
    return 0.5 * (m + m.T)


def real_basis_count(d: int) -> int:
    """Dimension d(d+1)/2 of the real symmetric d x d matrices."""
    if d < 1:
        raise ShapeError(f"need d >= 1, got {d}")
    return d * (d + 1) // 2


def dimension_gap(d: int, n: int) -> tuple[int, int, bool]:
    """Compare symmetric-matrix dimensions of the joint space vs. products.

    Returns ``(lhs, rhs, gap_positive)`` with lhs = d^n (d^n + 1) / 2 (all
    real symmetric matrices on the n-fold product space) and
    rhs = (d (d + 1) / 2)^n (those generated by products); the gap is
    strictly positive exactly when n >= 2.
    """
    if d < 2 or n < 1:
        raise ShapeError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    dn = d**n
    lhs = dn * (dn + 1) // 2
    rhs = (d * (d + 1) // 2) ** n
    return lhs, rhs, lhs > rhs


@dataclass(frozen=True)
class RealStateVerdict:
    """Trace and positivity checks of a candidate real state."""

    trace_ok: bool
    psd_ok: bool
    trace: float
    min_eigenvalue: float

    @property
    def valid(self) -> bool:
        return self.trace_ok and self.psd_ok


def validate_real_state(op) -> RealStateVerdict:
    """Check unit trace (within 1e-10) and positive semidefiniteness."""
    m = as_real_symmetric(op)
    tr = float(np.trace(m))
    lo = float(np.linalg.eigvalsh(m)[0])
    return RealStateVerdict(
        trace_ok=abs(tr - 1.0) <= opalg.TRACE_TOL,
        psd_ok=lo >= -opalg.PSD_TOL,
        trace=tr,
        min_eigenvalue=lo,
    )


def real_symmetric_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of real symmetric d x d matrices (trace inner product).

    For d = 2 the normalized identity and the two real Pauli matrices; for
    larger d the diagonal matrix units together with (e_jk + e_kj)/sqrt(2).
    """
    if d == 2:
        s1 = np.array([[0.0, 1.0], [1.0, 0.0]])
        s3 = np.array([[1.0, 0.0], [0.0, -1.0]])
        return [np.eye(2) / np.sqrt(2.0), s1 / np.sqrt(2.0), s3 / np.sqrt(2.0)]
    basis = []
    eye = np.eye(d)
    for j in range(d):
        basis.append(np.outer(eye[j], eye[j]))
    for j in range(d):
        for k in range(j + 1, d):
            basis.append((np.outer(eye[j], eye[k]) + np.outer(eye[k], eye[j])) / np.sqrt(2.0))
    return basis


def real_product_span_residual(op, d: int) -> tuple[np.ndarray, float]:
    """Distance of a two-subsystem operator from the span of symmetric products.

    Projects orthogonally onto span{S_i x S_j} over an orthonormal real
    symmetric basis {S_i} and returns ``(projection, residual_norm)`` with
    the residual in Frobenius norm.  Mixtures of real product states lie in
    the span exactly, so a positive residual certifies that no such mixture
    matches the operator.
    """
    m = as_real_symmetric(op)
    if m.shape[0] != d * d:
        raise ShapeError(f"expected dimension {d * d} for two subsystems, got {m.shape[0]}")
    basis = real_symmetric_basis(d)
    projection = np.zeros_like(m)
    for si in basis:
        for sj in basis:
            element = np.kron(si, sj)
            projection += np.tensordot(element, m, axes=2) * element
    residual = float(np.linalg.norm(m - projection))
    return projection, residual


def spin_y_mixture(n: int) -> np.ndarray:
    """Equal mixture of n-fold products of the two spin-y eigenstates.

    Expanding the mixture cancels every term with an odd number of
    antisymmetric factors, leaving a real symmetric matrix; at n = 2 it
    equals (I x I + sigma_y x sigma_y)/4.
    """
    from .states_povm import ID2, SIGMA_2

    plus = 0.5 * (ID2 + SIGMA_2)
    minus = 0.5 * (ID2 - SIGMA_2)
    mix = 0.5 * opalg.tensor_power(plus, n) + 0.5 * opalg.tensor_power(minus, n)
    return as_real_symmetric(mix)
