"""Mixtures of product states, induced outcome statistics, and reconstruction.

A discrete mixture sum_i w_i rho_i^(x n) measured trial by trial with a
minimal informationally complete POVM produces a full probability table over
outcome sequences; because the tensor products of the POVM elements span the
operator space of the joint system, that table determines the joint state,
which the dual frame recovers explicitly.  The same machinery exposes why
probability vectors that correspond to no quantum state cannot sneak into the
mixture: a trace-one operator with a negative eigenvalue admits a two-outcome
measurement whose repeated "probability" grows past one.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from . import opalg
from .errors import NotAWitnessError, ResourceError, ShapeError
from .exchange import MultiSystemState
from .opalg import SubsystemShape
from .states_povm import DualFrame, Ensemble, Povm

# A discrete mixing distribution over density operators is the same object as
# an ensemble decomposition; reuse the validated type.
MixingEnsemble = Ensemble

_MAX_TABLE = 1 << 20  # largest full sequence table kept in memory


@dataclass(frozen=True)
class SequenceDistribution:
    """Joint outcome probabilities for n_trials repeated POVM measurements.

    ``probs`` is flat in lexicographic order with trial 1 most significant:
    the sequence (a_1, ..., a_N) lives at index a_1 * k^(N-1) + ... + a_N
    where k = n_outcomes.
    """

    n_outcomes: int
    n_trials: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.n_outcomes**self.n_trials,):
            raise ShapeError(
                f"table needs {self.n_outcomes}**{self.n_trials} entries, got {p.shape}"
            )
        if np.any(p < -opalg.PSD_TOL):
            raise ShapeError(f"negative sequence probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ShapeError(f"sequence probabilities sum to {p.sum()!r}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def table(self) -> np.ndarray:
        """Probabilities reshaped to one axis per trial."""
        return self.probs.reshape((self.n_outcomes,) * self.n_trials)


@dataclass(frozen=True)
class WitnessReport:
    """Negative-eigenvalue witness and the growth of its repeat probability."""

    lam: float
    pi_op: np.ndarray
    growth: list[tuple[int, float]]
    first_exceeding: int | None


def mix_product_states(ens: MixingEnsemble, n: int) -> MultiSystemState:
    """The n-system mixture sum_i w_i rho_i^(x n); symmetric by construction."""
    if n < 1:
        raise ShapeError(f"n must be positive, got {n}")
    shape = opalg.check_shape(SubsystemShape(ens.dim, n))
    acc = np.zeros((shape.total_dim, shape.total_dim), dtype=complex)
    for w, s in zip(ens.weights, ens.states):
        acc += w * opalg.tensor_power(s.matrix, n)
    return MultiSystemState.from_matrix(ens.dim, n, acc)


def induced_sequence_distribution(state: MultiSystemState, povm: Povm) -> SequenceDistribution:
    """Full outcome-sequence table of measuring every subsystem with ``povm``.

    Entry (a_1, ..., a_N) is tr(rho E_{a_1} x ... x E_{a_N}).  Exchangeable
    states give permutation-invariant tables.
    """
    if povm.dim != state.d:
        raise ShapeError(f"POVM dim {povm.dim} != subsystem dim {state.d}")
    k = len(povm)
    n = state.n
    if k**n > _MAX_TABLE:
        raise ResourceError(f"sequence table with {k}**{n} entries exceeds limit")

    letters = string.ascii_lowercase
    if 2 * n > len(letters) or n > len(string.ascii_uppercase):
        raise ResourceError(f"too many trials for einsum contraction: {n}")
    ket = letters[:n]
    bra = letters[n : 2 * n]
    out = string.ascii_uppercase[:n]
    operands = [state.matrix.reshape((state.d,) * (2 * n))]
    subs = [ket + bra]
    arr = povm.as_array()
    for t in range(n):
        operands.append(arr)
        subs.append(out[t] + bra[t] + ket[t])
    table = np.einsum(",".join(subs) + "->" + out, *operands).real
    probs = np.clip(table.ravel(), 0.0, None)
    return SequenceDistribution(k, n, probs / probs.sum())


def reconstruct_multisystem(seq: SequenceDistribution, frame: DualFrame) -> MultiSystemState:
    """Rebuild the joint state from its sequence table via tensor-product duals.

    Computes sum over sequences of p(a_1..a_N) D_{a_1} x ... x D_{a_N}, which
    inverts :func:`induced_sequence_distribution` for any joint state, product
    or not.
    """
    k = len(frame.povm)
    if seq.n_outcomes != k:
        raise ShapeError(f"table has {seq.n_outcomes} outcomes per trial, frame has {k}")
    n = seq.n_trials
    d = frame.dim

    letters = string.ascii_lowercase
    ket = letters[:n]
    bra = letters[n : 2 * n]
    out = string.ascii_uppercase[:n]
    operands = [seq.table()]
    subs = [out]
    duals = np.stack(frame.duals)
    for t in range(n):
        operands.append(duals)
        subs.append(out[t] + ket[t] + bra[t])
    joint = np.einsum(",".join(subs) + "->" + ket + bra, *operands)
    m = joint.reshape(d**n, d**n)
    return MultiSystemState.from_matrix(d, n, 0.5 * (m + m.conj().T))


def witness_from_operator(a) -> tuple[np.ndarray, np.ndarray, float]:
    """Two-outcome measurement exposing a trace-one operator as nonphysical.

    For Hermitian ``a`` with tr(a) = 1 and most negative eigenvalue
    ``-lam < 0``, returns ``(pi_tilde, pi, lam)`` where ``pi_tilde`` projects
    onto the offending eigenvector and ``pi = I - pi_tilde`` satisfies
    tr(a pi) = 1 + lam > 1.
    """
    m = opalg.hermitian_part(a)
    if abs(float(np.trace(m).real) - 1.0) > 1e-9:
        raise ShapeError(f"witness input must have unit trace, got {np.trace(m).real!r}")
    w, v = opalg.eig_hermitian(m)
    if w[-1] >= 0.0:
        raise NotAWitnessError(f"no negative eigenvalue: spectrum bottom {w[-1]:.3e}")
    lam = -float(w[-1])
    psi = v[:, -1]
    pi_tilde = np.outer(psi, psi.conj())
    pi = np.eye(m.shape[0], dtype=complex) - pi_tilde
    return pi_tilde, pi, lam


def illegal_probability_growth(
    weights, components, pi, n_list
) -> tuple[list[tuple[int, float]], int | None]:
    """Repeat-outcome values sum_i w_i [tr(A_i pi)]^N over even N.

    Each component is a Hermitian trace-one operator (physical or not); for
    even N every term is nonnegative, so any component with tr(A pi) > 1 and
    positive weight eventually pushes the value past 1.  Returns the (N,
    value) pairs and the first N whose value exceeds 1, if any.
    """
    w = np.asarray(weights, dtype=float)
    comps = [opalg.hermitian_part(c) for c in components]
    if w.ndim != 1 or len(w) != len(comps):
        raise ShapeError("weights and components must have equal lengths")
    pi_m = opalg.hermitian_part(pi)
    overlaps = np.array([float(np.trace(c @ pi_m).real) for c in comps])

    pairs: list[tuple[int, float]] = []
    first: int | None = None
    for n in n_list:
        n = int(n)
        if n % 2 != 0:
            raise ShapeError(f"repeat counts must be even, got {n}")
        value = float(np.dot(w, overlaps**n))
        pairs.append((n, value))
        if first is None and value > 1.0:
            first = n
    return pairs, first


def witness_report(weights, components, n_max: int = 40) -> WitnessReport:
    """Build the witness for the first nonphysical component and track growth."""
    comps = [opalg.hermitian_part(c) for c in components]
    for c in comps:
        if np.linalg.eigvalsh(c)[0] < -opalg.PSD_TOL:
            _, pi, lam = witness_from_operator(c)
            break
    else:
        raise NotAWitnessError("every component is positive semidefinite")
    n_list = list(range(2, n_max + 1, 2))
    pairs, first = illegal_probability_growth(weights, comps, pi, n_list)
    return WitnessReport(lam=lam, pi_op=pi, growth=pairs, first_exceeding=first)
