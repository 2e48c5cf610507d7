"""Bell-operator constructors and their exact squared-operator structure.

The n-particle Bell operator for settings {(n_j, n_j')} is

    B = (1/2i) [ prod_j (sigma(n_j) + i sigma(n_j')) - prod_j (sigma(n_j) - i sigma(n_j')) ].

Its square closes over the single-particle commutators C_j = [sigma_j, sigma_j']
and anticommutators A_j = {sigma_j, sigma_j'}:

    B^2 = 2^(n-1) I + sum_k (-1)^k 2^(n-2k-1) sum_{|S|=2k} prod_{j in S} C_j

with 2k running to n-1 for odd n; for even n the sum stops at n-2 and picks up
the closing term (-1)^(n/2) (1/2) (prod_j C_j - prod_j A_j).

When m of the C_j vanish because n_j' = +-n_j (degenerate pairs, sign products
-1 pairwise, plus one perpendicular surviving pair when m is odd), the square
collapses onto the surviving particles: B^2(n|m) = 2^m B^2(n-m), capping the
attainable quantum value at 2^(-m/2) of the unconstrained maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .pauli import (
    DENSE_LIMIT,
    PauliOperator,
    ResourceLimitError,
    UnitVector3,
    commutator,
    anticommutator,
    embed,
    single_spin_operator,
    to_dense,
)
from .settings import MeasurementSettings, PlanarSettings, SettingPair


def site_spin_operators(
    settings: MeasurementSettings,
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Embedded sigma(n_j) and sigma(n_j') for every particle, 1-based order."""
    n = settings.n
    first = [
        embed(single_spin_operator(pair.a), j + 1, n)
        for j, pair in enumerate(settings.pairs)
    ]
    second = [
        embed(single_spin_operator(pair.b), j + 1, n)
        for j, pair in enumerate(settings.pairs)
    ]
    return first, second


def site_commutators(settings: MeasurementSettings) -> list[PauliOperator]:
    """Embedded single-particle commutators C_j = [sigma(n_j), sigma(n_j')]."""
    n = settings.n
    out = []
    for j, pair in enumerate(settings.pairs):
        local = commutator(single_spin_operator(pair.a), single_spin_operator(pair.b))
        out.append(embed(local, j + 1, n) if local.terms else PauliOperator.zero(n))
    return out


def site_anticommutators(settings: MeasurementSettings) -> list[PauliOperator]:
    """Embedded single-particle anticommutators A_j = {sigma(n_j), sigma(n_j')} = 2 (n_j . n_j') I."""
    n = settings.n
    out = []
    for j, pair in enumerate(settings.pairs):
        local = anticommutator(single_spin_operator(pair.a), single_spin_operator(pair.b))
        out.append(embed(local, j + 1, n) if local.terms else PauliOperator.zero(n))
    return out


# ---- operator constructors ------------------------------------------------


def chsh_operator(settings: MeasurementSettings) -> PauliOperator:
    """Two-particle operator sigma1 sigma2 + sigma1 sigma2' + sigma1' sigma2 - sigma1' sigma2'."""
    if settings.n != 2:
        raise ValueError("chsh_operator needs exactly two particles")
    (s1, s2), (s1p, s2p) = site_spin_operators(settings)
    return s1 * s2 + s1 * s2p + s1p * s2 - s1p * s2p


def three_particle_operator(settings: MeasurementSettings) -> PauliOperator:
    """Three-particle operator sigma1' s2 s3 + s1 sigma2' s3 + s1 s2 sigma3' - sigma1' sigma2' sigma3'."""
    if settings.n != 3:
        raise ValueError("three_particle_operator needs exactly three particles")
    (s1, s2, s3), (p1, p2, p3) = site_spin_operators(settings)
    return p1 * s2 * s3 + s1 * p2 * s3 + s1 * s2 * p3 - p1 * p2 * p3


def mermin_operator(settings: MeasurementSettings) -> PauliOperator:
    """General n-particle Bell operator (1/2i)(prod(sigma_j + i sigma_j') - prod(sigma_j - i sigma_j')).

    The two products are coefficientwise complex conjugates (each factor acts on
    its own particle), so the subtraction reduces to keeping Im of the plus
    product's coefficients.  A test rebuilds the literal two-product form through
    the general multiply and checks agreement.
    """
    acc: dict[str, complex] = {"": 1.0 + 0.0j}
    for pair in settings.pairs:
        factor = {
            "X": pair.a.x + 1j * pair.b.x,
            "Y": pair.a.y + 1j * pair.b.y,
            "Z": pair.a.z + 1j * pair.b.z,
        }
        grown: dict[str, complex] = {}
        for prefix, c in acc.items():
            for letter, fc in factor.items():
                if fc != 0.0:
                    grown[prefix + letter] = c * fc
        acc = grown
    return PauliOperator(settings.n, {s: c.imag for s, c in acc.items()})


def canonical_mermin(n: int) -> PauliOperator:
    """Bell operator at the standard settings n_j = x, n_j' = y for every particle.

    Terms are the odd-Y-count strings over {X,Y} with signs (-1)^((k-1)/2) for
    k letters Y; e.g. n=3 gives YXX + XYX + XXY - YYY.
    """
    if n < 2:
        raise ValueError("need at least two particles")
    return mermin_operator(canonical_settings(n))


def canonical_settings(n: int) -> MeasurementSettings:
    """n_j = x, n_j' = y for every particle."""
    x = UnitVector3(1.0, 0.0, 0.0)
    y = UnitVector3(0.0, 1.0, 0.0)
    return MeasurementSettings(tuple(SettingPair(x, y) for _ in range(n)))


# ---- squared-operator expansions ------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    """Commutator expansion of a squared Bell operator, checked against the direct square.

    group_term_counts maps commutator-group order 2k to the number of summed
    products (always C(n, 2k)); final_term_count is 2 for even n (the closing
    full-commutator and full-anticommutator products), otherwise 0.
    """

    n: int
    expansion: PauliOperator
    group_term_counts: dict[int, int]
    final_term_count: int
    residual: float


def _fold_product(ops: list[PauliOperator]) -> PauliOperator:
    acc = ops[0]
    for op in ops[1:]:
        acc = acc * op
    return acc


def chsh_square_expansion(settings: MeasurementSettings) -> ExpansionReport:
    """B^2 = 4 I - C1 C2 for the two-particle operator."""
    if settings.n != 2:
        raise ValueError("chsh_square_expansion needs exactly two particles")
    c1, c2 = site_commutators(settings)
    expansion = PauliOperator.identity(2, 4.0) - c1 * c2
    b = chsh_operator(settings)
    return ExpansionReport(
        n=2,
        expansion=expansion,
        group_term_counts={2: 1},
        final_term_count=0,
        residual=expansion.max_coeff_diff(b * b),
    )


def three_particle_square_expansion(settings: MeasurementSettings) -> ExpansionReport:
    """B^2 = 4 I - C1 C2 - C1 C3 - C2 C3 for the three-particle operator."""
    if settings.n != 3:
        raise ValueError("three_particle_square_expansion needs exactly three particles")
    c1, c2, c3 = site_commutators(settings)
    expansion = (
        PauliOperator.identity(3, 4.0) - c1 * c2 - c1 * c3 - c2 * c3
    )
    b = three_particle_operator(settings)
    return ExpansionReport(
        n=3,
        expansion=expansion,
        group_term_counts={2: 3},
        final_term_count=0,
        residual=expansion.max_coeff_diff(b * b),
    )


def mermin_square_expansion(settings: MeasurementSettings) -> ExpansionReport:
    """Full commutator expansion of B^2 for any n >= 3, residual-checked."""
    n = settings.n
    if n < 3:
        raise ValueError("mermin_square_expansion needs n >= 3 (use chsh_square_expansion)")
    cs = site_commutators(settings)
    expansion = PauliOperator.identity(n, float(2 ** (n - 1)))
    group_term_counts: dict[int, int] = {}
    top = n - 1 if n % 2 else n - 2
    for two_k in range(2, top + 1, 2):
        k = two_k // 2
        coeff = float((-1) ** k * 2 ** (n - two_k - 1))
        group = PauliOperator.zero(n)
        count = 0
        for subset in combinations(range(n), two_k):
            group = group + _fold_product([cs[j] for j in subset])
            count += 1
        expansion = expansion + group.scale(coeff)
        group_term_counts[two_k] = count
    final_term_count = 0
    if n % 2 == 0:
        ays = site_anticommutators(settings)
        sign = float((-1) ** (n // 2))
        expansion = expansion + (_fold_product(cs) - _fold_product(ays)).scale(0.5 * sign)
        final_term_count = 2
    b = mermin_operator(settings)
    return ExpansionReport(
        n=n,
        expansion=expansion,
        group_term_counts=group_term_counts,
        final_term_count=final_term_count,
        residual=expansion.max_coeff_diff(b * b),
    )


# ---- planar closed forms --------------------------------------------------

#: kron chains double per particle; 2^24 float64 entries is the ceiling
PLANAR_DIAGONAL_LIMIT = 24


def planar_square_diagonal(
    planar: PlanarSettings, limit: int = PLANAR_DIAGONAL_LIMIT
) -> np.ndarray:
    """Diagonal of B^2 in the computational basis for planar settings.

    For settings in the x-y plane, B^2 contains only I/Z letters, so it is
    diagonal with entries (z_j = +1 for bit 0 at particle j)

        2^(n-1) [ (prod(1 + sin(theta_j) z_j) + prod(1 - sin(theta_j) z_j)) / 2 - e ],

    where e = (-1)^(n/2) prod(cos theta_j) for even n, 0 for odd n.
    """
    n = planar.n
    if n > limit:
        raise ResourceLimitError(f"planar diagonal for n={n} exceeds limit {limit}")
    sines = [math.sin(t) for t in planar.included_angles]
    plus = np.ones(1)
    minus = np.ones(1)
    for s in sines:
        plus = np.kron(plus, np.array([1.0 + s, 1.0 - s]))
        minus = np.kron(minus, np.array([1.0 - s, 1.0 + s]))
    diag = 0.5 * (plus + minus)
    if n % 2 == 0:
        sign = -1.0 if (n // 2) % 2 else 1.0
        diag = diag - sign * math.prod(math.cos(t) for t in planar.included_angles)
    return float(2 ** (n - 1)) * diag


def planar_spectral_max(planar: PlanarSettings) -> float:
    """Largest eigenvalue of B^2 for planar settings, in closed form.

    The diagonal is maximized by aligning every z_j with sign(sin theta_j),
    which turns each sine factor into 1 + |sin theta_j|; the even-n closing
    term is a constant shift and does not move the argmax.
    """
    n = planar.n
    abs_sines = [abs(math.sin(t)) for t in planar.included_angles]
    value = 0.5 * (
        math.prod(1.0 + s for s in abs_sines) + math.prod(1.0 - s for s in abs_sines)
    )
    if n % 2 == 0:
        sign = -1.0 if (n // 2) % 2 else 1.0
        value -= sign * math.prod(math.cos(t) for t in planar.included_angles)
    return float(2 ** (n - 1)) * value


# ---- degenerate settings and the reduction law ----------------------------


@dataclass(frozen=True)
class ReductionSpec:
    """Which particles get degenerate second directions n_j' = s_j n_j.

    degenerate_indices are 1-based and sorted; signs line up with them.  Signs
    must split evenly for even m; for odd m the counts differ by one and a
    perpendicular_survivor (theta = pi/2 forced) is required so the surviving
    anticommutator product vanishes.
    """

    m: int
    degenerate_indices: tuple[int, ...] = ()
    signs: tuple[int, ...] = ()
    perpendicular_survivor: int | None = None

    def validate(self, n: int) -> None:
        if not 0 <= self.m <= n - 3:
            raise ValueError(f"m={self.m} outside 0..n-3 for n={n}")
        if len(self.degenerate_indices) != self.m or len(self.signs) != self.m:
            raise ValueError("need exactly m degenerate indices and m signs")
        if any(not 1 <= j <= n for j in self.degenerate_indices):
            raise ValueError("degenerate indices must lie in 1..n")
        if len(set(self.degenerate_indices)) != self.m:
            raise ValueError("degenerate indices must be distinct")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        plus = sum(1 for s in self.signs if s == 1)
        minus = self.m - plus
        if self.m % 2 == 0:
            if plus != minus:
                raise ValueError("even m needs equally many +1 and -1 signs")
        else:
            if abs(plus - minus) != 1:
                raise ValueError("odd m needs sign counts differing by exactly one")
            if self.perpendicular_survivor is None:
                raise ValueError("odd m requires a perpendicular survivor")
        if self.perpendicular_survivor is not None:
            j = self.perpendicular_survivor
            if not 1 <= j <= n or j in self.degenerate_indices:
                raise ValueError("perpendicular survivor must be a non-degenerate particle")


def default_reduction_spec(n: int, m: int) -> ReductionSpec:
    """Deterministic spec: last m particles degenerate, alternating signs from +1,
    particle 1 as the perpendicular survivor when m is odd."""
    indices = tuple(range(n - m + 1, n + 1))
    signs = tuple(1 if i % 2 == 0 else -1 for i in range(m))
    spec = ReductionSpec(
        m=m,
        degenerate_indices=indices,
        signs=signs,
        perpendicular_survivor=1 if m % 2 else None,
    )
    spec.validate(n)
    return spec


def degenerate_settings(
    base: PlanarSettings, spec: ReductionSpec
) -> MeasurementSettings:
    """Apply a ReductionSpec to planar base angles.

    Degenerate particles get n_j' = s_j n_j; the perpendicular survivor (if
    any) gets phi_j' = phi_j + pi/2 overriding its base second angle; everyone
    else keeps (phi_j, phi_j').  m = 0 is the plain planar-to-vector conversion.
    """
    spec.validate(base.n)
    sign_of = dict(zip(spec.degenerate_indices, spec.signs))
    pairs = []
    for j, (phi, phi_prime) in enumerate(base.angles, start=1):
        a = UnitVector3.from_azimuth(phi)
        if j in sign_of:
            s = float(sign_of[j])
            b = UnitVector3(s * a.x, s * a.y, s * a.z)
        elif spec.perpendicular_survivor == j:
            b = UnitVector3.from_azimuth(phi + math.pi / 2.0)
        else:
            b = UnitVector3.from_azimuth(phi_prime)
        pairs.append(SettingPair(a, b))
    return MeasurementSettings(tuple(pairs))


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of one B^2(n|m) = 2^m B^2(n-m) check."""

    n: int
    m: int
    factor: float
    residual: float
    mu_max_full: float
    mu_max_reduced: float
    mu_max_ratio: float
    max_abs_full: float
    max_abs_reduced: float
    max_abs_ratio: float
    degenerate_indices: tuple[int, ...]
    signs: tuple[int, ...]
    perpendicular_survivor: int | None


def _lift(op: PauliOperator, positions: tuple[int, ...], n: int) -> PauliOperator:
    """Pad an operator on len(positions) particles with identities into n slots."""
    out = {}
    for s, c in op.terms.items():
        letters = ["I"] * n
        for letter, pos in zip(s, positions):
            letters[pos - 1] = letter
        out["".join(letters)] = c
    return PauliOperator(n, out)


def reduction_check(
    base: PlanarSettings, spec: ReductionSpec, dense_limit: int = DENSE_LIMIT
) -> ReductionReport:
    """Verify the collapse of B^2 when m single-particle commutators vanish.

    Builds the full operator from the degenerate settings, the reduced operator
    from the surviving particles alone, and compares B_full^2 against
    2^m * (reduced square padded with identities), coefficient by coefficient.
    Eigenvalue maxima of both squares come from dense diagonalization.
    """
    n = base.n
    spec.validate(n)
    if n > dense_limit:
        raise ResourceLimitError(
            f"reduction eigen-check needs dense matrices; n={n} exceeds {dense_limit}"
        )
    full = degenerate_settings(base, spec)
    b_full = mermin_operator(full)
    sq_full = b_full * b_full

    survivors = tuple(j for j in range(1, n + 1) if j not in spec.degenerate_indices)
    reduced = full.subset(survivors)
    b_reduced = mermin_operator(reduced)
    sq_reduced = b_reduced * b_reduced

    factor = float(2**spec.m)
    residual = sq_full.max_coeff_diff(_lift(sq_reduced, survivors, n).scale(factor))

    mu_full = float(np.linalg.eigvalsh(to_dense(sq_full, dense_limit))[-1])
    mu_reduced = float(np.linalg.eigvalsh(to_dense(sq_reduced, dense_limit))[-1])
    return ReductionReport(
        n=n,
        m=spec.m,
        factor=factor,
        residual=residual,
        mu_max_full=mu_full,
        mu_max_reduced=mu_reduced,
        mu_max_ratio=mu_full / mu_reduced,
        max_abs_full=math.sqrt(mu_full),
        max_abs_reduced=math.sqrt(mu_reduced),
        max_abs_ratio=math.sqrt(mu_full / mu_reduced),
        degenerate_indices=spec.degenerate_indices,
        signs=spec.signs,
        perpendicular_survivor=spec.perpendicular_survivor,
    )
