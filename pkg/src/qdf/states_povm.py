"""Density operators, POVMs, and minimal informationally complete measurements.

A POVM with exactly ``d**2`` linearly independent elements determines every
state from its outcome probabilities alone.  This module builds such
measurements for any dimension, provides the tetrahedron POVM on a qubit, and
inverts the Born-rule map through a dual frame so that probability vectors can
be turned back into operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import opalg
from .errors import InvariantError, NotInformationallyCompleteError, ShapeError

# Pauli matrices and the qubit identity.
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)
ID2 = np.eye(2, dtype=complex)

BLOCH_TOL = 1e-12
GRAM_SV_TOL = 1e-8  # smallest singular value for linear independence
DUAL_RECON_TOL = 1e-8

# Fixed tetrahedron vertices on the Bloch sphere (any regular tetrahedron
# works; this one is pinned for reproducibility).
TETRAHEDRON_VERTICES = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
) / np.sqrt(3.0)


class DensityOperator:
    """A unit-trace positive-semidefinite Hermitian operator.

    Construction validates the trace (within 1e-10) and the spectrum:
    eigenvalues in ``[-1e-9, 0)`` are clipped to zero and the operator is
    renormalized, anything more negative raises :class:`InvariantError`.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = opalg.hermitian_part(matrix)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > opalg.TRACE_TOL:
            raise InvariantError(f"density operator trace {tr!r} is not 1")
        w, v = np.linalg.eigh(m)
        if w[0] < -opalg.PSD_TOL:
            raise InvariantError(
                f"density operator has eigenvalue {w[0]:.3e} below -{opalg.PSD_TOL:.1e}"
            )
        if w[0] < 0.0:
            w = np.clip(w, 0.0, None)
            m = (v * w) @ v.conj().T
            m = m / np.trace(m).real
            m = 0.5 * (m + m.conj().T)
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        w, _ = opalg.eig_hermitian(self.matrix)
        return w

    def bloch_vector(self) -> np.ndarray:
        """Bloch components (tr(rho sigma_k)) of a qubit state."""
        if self.dim != 2:
            raise ShapeError("Bloch vector is defined for qubits only")
        return np.array([np.trace(self.matrix @ s).real for s in PAULI])

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, purity={self.purity():.6f})"


def density_from_bloch(s) -> DensityOperator:
    """Qubit state ``(I + s . sigma)/2`` for a Bloch vector with |s| <= 1."""
    vec = np.asarray(s, dtype=float)
    if vec.shape != (3,):
        raise ShapeError(f"Bloch vector must have 3 components, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if norm > 1.0 + BLOCH_TOL:
        raise InvariantError(f"Bloch vector norm {norm!r} exceeds 1")
    m = 0.5 * (ID2 + vec[0] * SIGMA_1 + vec[1] * SIGMA_2 + vec[2] * SIGMA_3)
    return DensityOperator(m)


@dataclass(frozen=True)
class Ensemble:
    """Probability weights over density operators of a common dimension."""

    weights: np.ndarray
    states: tuple[DensityOperator, ...]

    def __init__(self, weights, states):
        w = np.asarray(weights, dtype=float)
        states = tuple(states)
        if w.ndim != 1 or len(w) != len(states):
            raise ShapeError("weights and states must have equal lengths")
        if np.any(w < 0):
            raise InvariantError("ensemble weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvariantError(f"ensemble weights sum to {w.sum()!r}, not 1")
        dims = {s.dim for s in states}
        if len(dims) > 1:
            raise ShapeError(f"ensemble states have mixed dimensions {sorted(dims)}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)


def ensemble_to_density(ens: Ensemble) -> DensityOperator:
    """Convex combination of the ensemble members."""
    acc = np.zeros((ens.dim, ens.dim), dtype=complex)
    for w, s in zip(ens.weights, ens.states):
        acc += w * s.matrix
    return DensityOperator(acc)


class Povm:
    """An ordered list of PSD operators summing to the identity."""

    def __init__(self, elements, name: str | None = None):
        elems = [opalg.hermitian_part(e) for e in elements]
        if not elems:
            raise ShapeError("a POVM needs at least one element")
        dim = elems[0].shape[0]
        if any(e.shape[0] != dim for e in elems):
            raise ShapeError("POVM elements must share one dimension")
        for k, e in enumerate(elems):
            lo = float(np.linalg.eigvalsh(e)[0])
            if lo < -opalg.PSD_TOL:
                raise InvariantError(f"POVM element {k} has eigenvalue {lo:.3e} < 0")
        total = sum(elems)
        dev = np.max(np.abs(total - np.eye(dim)))
        if dev > opalg.PSD_TOL:
            raise InvariantError(f"POVM elements sum to identity only within {dev:.3e}")
        self.elements = [e.copy() for e in elems]
        for e in self.elements:
            e.setflags(write=False)
        self.dim = dim
        self.name = name or f"povm-d{dim}-{len(elems)}"

    def __len__(self) -> int:
        return len(self.elements)

    def as_array(self) -> np.ndarray:
        """Elements stacked into shape (n_outcomes, dim, dim)."""
        return np.stack(self.elements)

    def gram_matrix(self) -> np.ndarray:
        """Real Gram matrix of the elements under the trace inner product."""
        arr = self.as_array()
        return np.einsum("aij,bji->ab", arr, arr).real

    def __repr__(self) -> str:
        return f"Povm(name={self.name!r}, dim={self.dim}, outcomes={len(self)})"


def born(rho: DensityOperator, povm: Povm) -> np.ndarray:
    """Outcome probabilities ``tr(rho E_a)`` of measuring ``rho`` with ``povm``.

    Tiny negative values from roundoff (above ``-1e-9``) are clipped to zero
    and the vector is renormalized so downstream sampling stays valid.
    """
    if rho.dim != povm.dim:
        raise ShapeError(f"state dim {rho.dim} != POVM dim {povm.dim}")
    p = np.einsum("ij,aji->a", rho.matrix, povm.as_array()).real
    if np.min(p) < -opalg.PSD_TOL:
        raise InvariantError(f"Born probability {np.min(p):.3e} below clipping threshold")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _construction_projectors(d: int) -> list[np.ndarray]:
    """d^2 linearly independent rank-1 projectors built from a basis.

    Uses the computational basis vectors e_j: first the d diagonal projectors
    |e_j><e_j|, then (|e_j>+|e_k>)(<e_j|+<e_k|)/2 for j < k, then
    (|e_j>+i|e_k>)(<e_j|-i<e_k|)/2 for j < k.
    """
    eye = np.eye(d, dtype=complex)
    projs = [np.outer(eye[j], eye[j].conj()) for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            v = (eye[j] + eye[k]) / np.sqrt(2.0)
            projs.append(np.outer(v, v.conj()))
    for j in range(d):
        for k in range(j + 1, d):
            v = (eye[j] + 1j * eye[k]) / np.sqrt(2.0)
            projs.append(np.outer(v, v.conj()))
    return projs


def build_minimal_ic_povm(d: int) -> Povm:
    """Minimal informationally complete POVM with d^2 rank-1 elements.

    Starting from d^2 linearly independent rank-1 projectors Pi_a, forms
    their sum G (positive definite) and rescales each projector by the
    congruence E_a = G^{-1/2} Pi_a G^{-1/2}, which preserves rank and linear
    independence while making the elements sum to the identity.
    """
    if d < 2:
        raise ShapeError(f"need dimension >= 2, got {d}")
    projs = _construction_projectors(d)
    g = sum(projs)
    g_inv_sqrt = opalg.inv_sqrt(g)
    elements = [g_inv_sqrt @ p @ g_inv_sqrt for p in projs]
    return Povm(elements, name=f"minimal-ic-d{d}")


def tetrahedron_povm() -> Povm:
    """Qubit POVM from four Bloch vectors at regular tetrahedron vertices.

    Each element is half a pure-state projector, so every outcome
    probability is at most 1/2 for every state.
    """
    elements = [0.5 * density_from_bloch(v).matrix for v in TETRAHEDRON_VERTICES]
    return Povm(elements, name="tetrahedron")


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of the d x d operators (trace inner product)."""
    basis = []
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        basis.append(np.outer(eye[j], eye[j]))
    for j in range(d):
        for k in range(j + 1, d):
            sym = (np.outer(eye[j], eye[k]) + np.outer(eye[k], eye[j])) / np.sqrt(2.0)
            asym = 1j * (np.outer(eye[j], eye[k]) - np.outer(eye[k], eye[j])) / np.sqrt(2.0)
            basis.extend([sym, asym])
    return basis


@dataclass(frozen=True)
class DualFrame:
    """Dual operators D_a of a minimal IC-POVM.

    For every Hermitian A of matching dimension,
    ``A = sum_a tr(A E_a) D_a``; in particular Born probabilities of a state
    reconstruct the state itself.
    """

    povm: Povm
    duals: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.povm.dim


def dual_frame(povm: Povm) -> DualFrame:
    """Compute the dual frame by inverting the POVM's Gram matrix.

    Writes every element in the span of the E_a themselves: with
    T_ab = tr(E_a E_b), the duals are D_a = sum_b (T^{-1})_ab E_b.  Raises
    :class:`NotInformationallyCompleteError` (with the observed Gram rank)
    unless the POVM has exactly d^2 linearly independent elements.
    """
    d = povm.dim
    gram = povm.gram_matrix()
    svals = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(svals > GRAM_SV_TOL))
    if len(povm) != d * d or rank < d * d:
        raise NotInformationallyCompleteError(
            f"POVM with {len(povm)} elements has Gram rank {rank}, need {d * d}",
            gram_rank=rank,
        )
    inv = np.linalg.inv(gram)
    arr = povm.as_array()
    duals = np.einsum("ab,bij->aij", inv, arr)
    frame = DualFrame(povm=povm, duals=tuple(duals))
    # Verify exactness on a spanning set of Hermitian operators.
    for a in hermitian_basis(d):
        coeffs = np.einsum("ij,aji->a", a, arr).real
        recon = np.einsum("a,aij->ij", coeffs, duals)
        if np.max(np.abs(recon - a)) > DUAL_RECON_TOL:
            raise NotInformationallyCompleteError(
                "dual frame fails to reconstruct a spanning operator", gram_rank=rank
            )
    return frame


def reconstruct_operator(p, frame: DualFrame) -> np.ndarray:
    """Unique Hermitian operator A with tr(A E_a) = p_a for all outcomes.

    The probabilities must sum to 1, which forces tr(A) = 1; the result is
    not guaranteed positive semidefinite, so callers deciding whether ``p``
    came from a physical state must inspect the spectrum themselves.
    """
    vec = np.asarray(p, dtype=float)
    if vec.shape != (len(frame.povm),):
        raise ShapeError(f"expected {len(frame.povm)} probabilities, got shape {vec.shape}")
    if abs(vec.sum() - 1.0) > 1e-9:
        raise InvariantError(f"probabilities sum to {vec.sum()!r}, not 1")
    a = np.einsum("a,aij->ij", vec, np.stack(frame.duals))
    return 0.5 * (a + a.conj().T)


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a Ginibre ensemble of the given rank."""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_pure(rng: np.random.Generator, d: int) -> DensityOperator:
    """Random pure state, uniform under the unitary group."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()))
