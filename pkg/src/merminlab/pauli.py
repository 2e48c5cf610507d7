"""Exact algebra of n-particle Pauli-string operators.

An operator is a sparse sum of Pauli strings ("XIZ" means X on particle 1,
identity on particle 2, Z on particle 3) with complex coefficients.  Products
track the i / -i phases exactly, so operator identities can be verified to
floating-point accuracy rather than symbolically.

Conventions used everywhere in this package:

* particle 1 is the leftmost letter of a string and the most significant bit
  of a dense basis index;
* basis state bit 0 is spin-up (+1 eigenstate of Z), bit 1 is spin-down;
* coefficients with magnitude below ``PRUNE_TOL`` are dropped after every
  operation.

Values are treated as immutable after construction and all operations are
pure functions, so operators can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LETTERS = "IXYZ"

#: coefficient magnitudes at or below this are pruned after every operation
PRUNE_TOL = 1e-13

#: default cap on dense conversions: 2^12 x 2^12 complex is ~256 MB
DENSE_LIMIT = 12

# Letter products come from the symplectic encoding L = i^(x*z) X^x Z^z with
# I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).  For L1*L2 = phase * L3 the phase is
# i^(x1*z1 + x2*z2 + 2*z1*x2 - x3*z3 mod 4).
_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_FROM_XZ = {bits: letter for letter, bits in _XZ.items()}
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _letter_product(a: str, b: str) -> tuple[complex, str]:
    x1, z1 = _XZ[a]
    x2, z2 = _XZ[b]
    x3, z3 = x1 ^ x2, z1 ^ z2
    exponent = (x1 * z1 + x2 * z2 + 2 * (z1 & x2) - x3 * z3) % 4
    return _I_POW[exponent], _FROM_XZ[(x3, z3)]


_PAIR = {(a, b): _letter_product(a, b) for a in LETTERS for b in LETTERS}

_PHASE_ARR = np.array(_I_POW, dtype=np.complex128)

# above this many coefficient pairs, products switch to the bitmask kernel
_SMALL_PRODUCT_LIMIT = 4096
# bincount accumulation allocates 4^n bins; beyond this fall back to np.unique
_BINCOUNT_MAX_N = 10

_SINGLE_MATS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class ResourceLimitError(RuntimeError):
    """An operation would exceed a configured size limit (dense dim, enumeration)."""


@dataclass(frozen=True)
class UnitVector3:
    """Measurement direction on the Bloch sphere; x^2+y^2+z^2 = 1 within 1e-12."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm_sq = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(
                f"not a unit vector: ({self.x}, {self.y}, {self.z}), |v|^2 = {norm_sq}"
            )

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector3":
        r = math.sqrt(x * x + y * y + z * z)
        if r < 1e-12:
            raise ValueError("cannot normalize a (near-)zero vector")
        return cls(x / r, y / r, z / r)

    @classmethod
    def from_azimuth(cls, phi: float) -> "UnitVector3":
        """Unit vector in the x-y plane at azimuth ``phi`` (radians from +x)."""
        return cls(math.cos(phi), math.sin(phi), 0.0)

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def flipped(self) -> "UnitVector3":
        return UnitVector3(-self.x, -self.y, -self.z)


def _make(n: int, terms: dict[str, complex]) -> "PauliOperator":
    # internal fast path: terms already validated and pruned
    op = object.__new__(PauliOperator)
    op.n = n
    op.terms = terms
    return op


class PauliOperator:
    """Sparse sum of n-particle Pauli strings with complex coefficients.

    ``op.terms`` maps strings over {I,X,Y,Z} (length ``op.n``) to nonzero
    complex coefficients.  Treat instances as immutable.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[str, complex] | None = None):
        if n < 1:
            raise ValueError("particle count must be >= 1")
        clean: dict[str, complex] = {}
        if terms:
            for string, coeff in terms.items():
                if len(string) != n or any(ch not in _XZ for ch in string):
                    raise ValueError(f"bad Pauli string {string!r} for n={n}")
                c = complex(coeff)
                if abs(c) > PRUNE_TOL:
                    clean[string] = c
        self.n = n
        self.terms = clean

    @classmethod
    def zero(cls, n: int) -> "PauliOperator":
        return cls(n, {})

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliOperator":
        return cls(n, {"I" * n: coeff})

    @classmethod
    def from_string(cls, string: str, coeff: complex = 1.0) -> "PauliOperator":
        return cls(len(string), {string: coeff})

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coefficient(self, string: str) -> complex:
        return self.terms.get(string, 0.0 + 0.0j)

    # ---- linear structure -------------------------------------------------

    def _check_same_n(self, other: "PauliOperator") -> None:
        if self.n != other.n:
            raise ValueError(f"particle-count mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "PauliOperator") -> "PauliOperator":
        if not isinstance(other, PauliOperator):
            return NotImplemented
        self._check_same_n(other)
        merged = dict(self.terms)
        for s, c in other.terms.items():
            merged[s] = merged.get(s, 0.0 + 0.0j) + c
        return _make(self.n, {s: c for s, c in merged.items() if abs(c) > PRUNE_TOL})

    def __sub__(self, other: "PauliOperator") -> "PauliOperator":
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self + other.scale(-1.0)

    def __neg__(self) -> "PauliOperator":
        return self.scale(-1.0)

    def scale(self, factor: complex) -> "PauliOperator":
        factor = complex(factor)
        return _make(
            self.n,
            {s: c * factor for s, c in self.terms.items() if abs(c * factor) > PRUNE_TOL},
        )

    def __mul__(self, other):
        if isinstance(other, PauliOperator):
            return _product(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    # ---- comparisons ------------------------------------------------------

    def max_coeff_diff(self, other: "PauliOperator") -> float:
        """Largest |coefficient difference| over the union of both term sets."""
        self._check_same_n(other)
        keys = self.terms.keys() | other.terms.keys()
        zero = 0.0 + 0.0j
        return max(
            (abs(self.terms.get(k, zero) - other.terms.get(k, zero)) for k in keys),
            default=0.0,
        )

    def approx_equal(self, other: "PauliOperator", tol: float = 1e-10) -> bool:
        return self.max_coeff_diff(other) <= tol

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Pauli strings are Hermitian, so hermiticity == all coefficients real."""
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def __repr__(self) -> str:
        if not self.terms:
            return f"PauliOperator(n={self.n}, 0)"
        items = sorted(self.terms.items())
        parts = [f"({c:.6g})*{s}" for s, c in items[:8]]
        tail = "" if len(items) <= 8 else f" ... +{len(items) - 8} terms"
        return f"PauliOperator(n={self.n}, {' + '.join(parts)}{tail})"


# ---- products -------------------------------------------------------------


def _product_small(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    out: dict[str, complex] = {}
    for s1, c1 in a.terms.items():
        for s2, c2 in b.terms.items():
            phase = c1 * c2
            letters = []
            for ch1, ch2 in zip(s1, s2):
                p, ch = _PAIR[(ch1, ch2)]
                if p != 1.0:
                    phase *= p
                letters.append(ch)
            key = "".join(letters)
            acc = out.get(key, 0.0 + 0.0j) + phase
            out[key] = acc
    return _make(a.n, {s: c for s, c in out.items() if abs(c) > PRUNE_TOL})


def _encode_masks(op: PauliOperator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, z) bitmask arrays plus coefficients; bit n-1-k <-> string position k."""
    n = op.n
    count = len(op.terms)
    xs = np.zeros(count, dtype=np.uint64)
    zs = np.zeros(count, dtype=np.uint64)
    cs = np.empty(count, dtype=np.complex128)
    for i, (s, c) in enumerate(op.terms.items()):
        x = z = 0
        for k, ch in enumerate(s):
            bx, bz = _XZ[ch]
            bit = 1 << (n - 1 - k)
            if bx:
                x |= bit
            if bz:
                z |= bit
        xs[i] = x
        zs[i] = z
        cs[i] = c
    return xs, zs, cs


def _decode_key(key: int, n: int) -> str:
    x = key >> n
    z = key & ((1 << n) - 1)
    letters = []
    for k in range(n):
        bit = 1 << (n - 1 - k)
        letters.append(_FROM_XZ[(1 if x & bit else 0, 1 if z & bit else 0)])
    return "".join(letters)


def _product_large(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    n = a.n
    xa, za, ca = _encode_masks(a)
    xb, zb, cb = _encode_masks(b)
    ya = np.bitwise_count(xa & za).astype(np.int64)
    yb = np.bitwise_count(xb & zb).astype(np.int64)

    use_bincount = n <= _BINCOUNT_MAX_N
    if use_bincount:
        dim = 1 << (2 * n)
        acc_re = np.zeros(dim, dtype=np.float64)
        acc_im = np.zeros(dim, dtype=np.float64)
    else:
        key_parts: list[np.ndarray] = []
        val_parts: list[np.ndarray] = []

    rows_per_chunk = max(1, 4_000_000 // max(len(cb), 1))
    shift = np.uint64(n)
    for start in range(0, len(ca), rows_per_chunk):
        sl = slice(start, start + rows_per_chunk)
        x3 = xa[sl, None] ^ xb[None, :]
        z3 = za[sl, None] ^ zb[None, :]
        exponent = (
            ya[sl, None]
            + yb[None, :]
            + 2 * np.bitwise_count(za[sl, None] & xb[None, :]).astype(np.int64)
            - np.bitwise_count(x3 & z3).astype(np.int64)
        ) & 3
        coeff = (ca[sl, None] * cb[None, :] * _PHASE_ARR[exponent]).ravel()
        key = ((x3 << shift) | z3).ravel()
        if use_bincount:
            idx = key.astype(np.int64)
            acc_re += np.bincount(idx, weights=coeff.real, minlength=dim)
            acc_im += np.bincount(idx, weights=coeff.imag, minlength=dim)
        else:
            uniq, inverse = np.unique(key, return_inverse=True)
            val = np.bincount(inverse, weights=coeff.real) + 1j * np.bincount(
                inverse, weights=coeff.imag
            )
            key_parts.append(uniq)
            val_parts.append(val)

    terms: dict[str, complex] = {}
    if use_bincount:
        acc = acc_re + 1j * acc_im
        for key in np.nonzero(np.abs(acc) > PRUNE_TOL)[0]:
            terms[_decode_key(int(key), n)] = complex(acc[key])
    else:
        all_keys = np.concatenate(key_parts)
        all_vals = np.concatenate(val_parts)
        uniq, inverse = np.unique(all_keys, return_inverse=True)
        merged = np.bincount(inverse, weights=all_vals.real) + 1j * np.bincount(
            inverse, weights=all_vals.imag
        )
        keep = np.abs(merged) > PRUNE_TOL
        for key, val in zip(uniq[keep], merged[keep]):
            terms[_decode_key(int(key), n)] = complex(val)
    return _make(n, terms)


def _product(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    a._check_same_n(b)
    pairs = len(a.terms) * len(b.terms)
    if pairs == 0:
        return PauliOperator.zero(a.n)
    if pairs <= _SMALL_PRODUCT_LIMIT:
        return _product_small(a, b)
    return _product_large(a, b)


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Operator product a*b with exact phase bookkeeping."""
    return _product(a, b)


def commutator(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """[a, b] = a*b - b*a."""
    return _product(a, b) - _product(b, a)


def anticommutator(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """{a, b} = a*b + b*a."""
    return _product(a, b) + _product(b, a)


def single_spin_operator(direction: UnitVector3) -> PauliOperator:
    """Spin component along ``direction``: d_x X + d_y Y + d_z Z (one particle)."""
    return PauliOperator(
        1, {"X": direction.x, "Y": direction.y, "Z": direction.z}
    )


def embed(op: PauliOperator, particle: int, n: int) -> PauliOperator:
    """Place a single-particle operator at 1-based ``particle`` of an n-particle register."""
    if op.n != 1:
        raise ValueError("embed expects a single-particle operator")
    if not 1 <= particle <= n:
        raise ValueError(f"particle index {particle} outside 1..{n}")
    left = "I" * (particle - 1)
    right = "I" * (n - particle)
    return _make(n, {left + s + right: c for s, c in op.terms.items()})


# ---- dense conversion and statevector action ------------------------------


def _flip_mask(string: str, n: int) -> int:
    mask = 0
    for k, ch in enumerate(string):
        if ch in ("X", "Y"):
            mask |= 1 << (n - 1 - k)
    return mask


def _term_phases(string: str, idx: np.ndarray, n: int) -> np.ndarray:
    """Phase picked up by basis state ``idx`` under the string (before bit flips)."""
    phases = np.ones(idx.shape, dtype=np.complex128)
    for k, ch in enumerate(string):
        if ch == "I" or ch == "X":
            continue
        sign = 1.0 - 2.0 * ((idx >> (n - 1 - k)) & 1)
        if ch == "Y":
            phases = phases * (1j * sign)
        else:  # Z
            phases = phases * sign
    return phases


def to_dense(op: PauliOperator, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Dense 2^n x 2^n complex matrix; raises ResourceLimitError above ``limit``."""
    if op.n > limit:
        raise ResourceLimitError(
            f"dense conversion needs 2^{op.n} dimensions, limit is 2^{limit}"
        )
    dim = 1 << op.n
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for s, c in op.terms.items():
        flip = _flip_mask(s, op.n)
        mat[idx ^ flip, idx] += c * _term_phases(s, idx, op.n)
    return mat


def apply_operator(op: PauliOperator, state: np.ndarray) -> np.ndarray:
    """Apply the operator to a statevector without forming the dense matrix."""
    state = np.asarray(state, dtype=np.complex128)
    dim = 1 << op.n
    if state.shape != (dim,):
        raise ValueError(f"state must have shape ({dim},), got {state.shape}")
    idx = np.arange(dim)
    out = np.zeros(dim, dtype=np.complex128)
    for s, c in op.terms.items():
        flip = _flip_mask(s, op.n)
        # idx ^ flip is a permutation, so the fancy-indexed add has no collisions
        out[idx ^ flip] += c * _term_phases(s, idx, op.n) * state
    return out


def dense_single(letter: str) -> np.ndarray:
    """2x2 matrix for one Pauli letter (dense oracle used by tests)."""
    return _SINGLE_MATS[letter].copy()
