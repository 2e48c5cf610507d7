"""Shared builders and independent dense oracles for the test suite.

The oracle route deliberately avoids the package's own bit-action dense
conversion: matrices are assembled by Kronecker products of 2x2 letters, so
agreement between the two is a real cross-check, not a tautology.
"""

import numpy as np

from merminlab.pauli import PauliOperator, dense_single

LETTERS = "IXYZ"


def random_operator(n, num_terms, rng, real=False):
    """Random sparse operator with Gaussian coefficients (possibly colliding strings)."""
    terms = {}
    for _ in range(num_terms):
        s = "".join(LETTERS[k] for k in rng.integers(0, 4, size=n))
        c = float(rng.normal()) if real else complex(rng.normal(), rng.normal())
        terms[s] = terms.get(s, 0.0) + c
    return PauliOperator(n, terms)


def kron_dense(string, coeff=1.0):
    """Dense matrix of one Pauli string via Kronecker products (particle 1 leftmost)."""
    out = np.array([[coeff]], dtype=complex)
    for ch in string:
        out = np.kron(out, dense_single(ch))
    return out


def dense_oracle(op):
    """Dense matrix of an operator assembled term by term from kron_dense."""
    dim = 1 << op.n
    out = np.zeros((dim, dim), dtype=complex)
    for s, c in op.terms.items():
        out += kron_dense(s, c)
    return out
