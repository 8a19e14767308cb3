"""Independent oracle implementations used to cross-check the library.

Everything here recomputes expected values through a different route than the
code under test: explicit index loops instead of einsum, permutation matrices
instead of axis transposes, Pauli-coefficient solves instead of dual frames.
"""

import itertools

import numpy as np

SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def ptrace_loops(op, d, n, keep):
    """Partial trace by explicit index summation."""
    keep = sorted(keep)
    traced = [k for k in range(1, n + 1) if k not in keep]
    dk = d ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for ket in itertools.product(range(d), repeat=n):
        for bra in itertools.product(range(d), repeat=n):
            if any(ket[t - 1] != bra[t - 1] for t in traced):
                continue
            r = sum(ket[k - 1] * d ** (len(keep) - 1 - i) for i, k in enumerate(keep))
            c = sum(bra[k - 1] * d ** (len(keep) - 1 - i) for i, k in enumerate(keep))
            ri = sum(ket[i] * d ** (n - 1 - i) for i in range(n))
            ci = sum(bra[i] * d ** (n - 1 - i) for i in range(n))
            out[r, c] += op[ri, ci]
    return out


def permutation_matrix(d, n, perm):
    """Unitary that maps |i_1 ... i_n> to the basis ket with factors permuted.

    Built so that conjugating an operator by it reproduces the index
    relabeling i_k -> i_{perm(k)} used by the library.
    """
    dim = d**n
    p = np.zeros((dim, dim))
    for ket in itertools.product(range(d), repeat=n):
        src = sum(ket[i] * d ** (n - 1 - i) for i in range(n))
        relabeled = tuple(ket[perm[i] - 1] for i in range(n))
        dst = sum(relabeled[i] * d ** (n - 1 - i) for i in range(n))
        p[dst, src] = 1.0
    return p


def symmetrize_by_group_average(op, d, n):
    """Average over all n! permutations using explicit permutation matrices."""
    dim = d**n
    acc = np.zeros((dim, dim), dtype=complex)
    perms = list(itertools.permutations(range(1, n + 1)))
    for perm in perms:
        u = permutation_matrix(d, n, perm)
        acc += u @ op @ u.T
    return acc / len(perms)


def solve_qubit_operator_from_tetrahedron_probs(p, vertices):
    """Hermitian A with tr(A E_a) = p_a, solved in the Pauli basis.

    Writes A = (c0 I + c . sigma)/2 so that tr(A E_a) = (c0 + n_a . c)/4 and
    solves the 4x4 real linear system directly.
    """
    m = np.hstack([np.ones((4, 1)), np.asarray(vertices)]) / 4.0
    coeff = np.linalg.solve(m, np.asarray(p, dtype=float))
    a = coeff[0] * np.eye(2, dtype=complex)
    for c, s in zip(coeff[1:], SIGMA):
        a = a + c * s
    return a / 2.0


def urn_marginal_by_enumeration(count_probs, m, n):
    """p(n_ones in first n) by walking all 2^m sequences of the symmetric table."""
    from math import comb

    out = np.zeros(n + 1)
    for bits in itertools.product((0, 1), repeat=m):
        ones = sum(bits)
        out[sum(bits[:n])] += count_probs[ones] / comb(m, ones)
    return out


def project_onto_span(matrix, span_elements):
    """Least-squares projection of a matrix onto the span of given matrices."""
    basis = np.column_stack([e.ravel() for e in span_elements])
    coeff, *_ = np.linalg.lstsq(basis, matrix.ravel(), rcond=None)
    return (basis @ coeff).reshape(matrix.shape)
