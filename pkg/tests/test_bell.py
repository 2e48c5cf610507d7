"""Bell-operator constructors, squared-operator expansions, planar closed forms."""

import math
from itertools import combinations

import numpy as np
import pytest

from merminlab.pauli import PauliOperator, ResourceLimitError, embed, single_spin_operator, to_dense
from merminlab.settings import (
    MeasurementSettings,
    PlanarSettings,
    SettingPair,
    random_planar,
    random_settings,
    random_unit_vector,
)
from merminlab.bell import (
    canonical_mermin,
    canonical_settings,
    chsh_operator,
    chsh_square_expansion,
    mermin_operator,
    mermin_square_expansion,
    planar_spectral_max,
    planar_square_diagonal,
    site_anticommutators,
    site_commutators,
    three_particle_operator,
    three_particle_square_expansion,
)
from merminlab.pauli import UnitVector3


def mermin_literal(settings):
    """The defining two-product form, built through the general multiply path."""
    n = settings.n
    plus = PauliOperator.identity(n)
    minus = PauliOperator.identity(n)
    for j, pair in enumerate(settings.pairs):
        sa = embed(single_spin_operator(pair.a), j + 1, n)
        sb = embed(single_spin_operator(pair.b), j + 1, n)
        plus = plus * (sa + sb.scale(1j))
        minus = minus * (sa + sb.scale(-1j))
    return (plus - minus).scale(-0.5j)


class TestCanonicalForms:
    def test_two_particle_canonical_is_xy_plus_yx(self):
        op = canonical_mermin(2)
        assert op.max_coeff_diff(PauliOperator(2, {"XY": 1.0, "YX": 1.0})) < 1e-14

    def test_three_particle_canonical(self):
        want = PauliOperator(3, {"YXX": 1.0, "XYX": 1.0, "XXY": 1.0, "YYY": -1.0})
        assert canonical_mermin(3).max_coeff_diff(want) < 1e-14

    def test_four_particle_canonical_signs(self):
        # odd-Y strings over {X,Y}: one Y -> +1, three Ys -> -1
        op = canonical_mermin(4)
        assert op.num_terms == 8
        for s, c in op.terms.items():
            ys = s.count("Y")
            assert ys % 2 == 1 and set(s) <= {"X", "Y"}
            assert abs(c - (-1.0) ** ((ys - 1) // 2)) < 1e-14

    def test_term_count_is_2_to_n_minus_1(self):
        for n in range(2, 8):
            assert canonical_mermin(n).num_terms == 2 ** (n - 1)

    def test_canonical_rejects_n_below_2(self):
        with pytest.raises(ValueError):
            canonical_mermin(1)


class TestOperatorConstruction:
    def test_matches_literal_two_product_form(self):
        rng = np.random.default_rng(21)
        for n in (2, 3, 4, 5):
            s = random_settings(n, rng)
            assert mermin_operator(s).max_coeff_diff(mermin_literal(s)) < 1e-12

    def test_always_hermitian(self):
        rng = np.random.default_rng(22)
        for n in (2, 4, 6):
            assert mermin_operator(random_settings(n, rng)).is_hermitian(1e-12)

    def test_three_particle_operator_equals_general_form(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            s = random_settings(3, rng)
            h = three_particle_operator(s)
            assert h.max_coeff_diff(mermin_operator(s)) < 1e-12

    def test_chsh_canonical_value(self):
        # x/y settings give sqrt(2)(XX + YY) ... actually XY + YX rotated;
        # check the spectrum instead: eigenvalues {+-2 sqrt(2), 0, 0}
        op = chsh_operator(canonical_settings(2))
        eigs = np.sort(np.linalg.eigvalsh(to_dense(op)))
        assert np.max(np.abs(np.sort(np.abs(eigs))[-1] - 2 * math.sqrt(2))) < 1e-9

    def test_wrong_n_rejected(self):
        rng = np.random.default_rng(24)
        with pytest.raises(ValueError):
            chsh_operator(random_settings(3, rng))
        with pytest.raises(ValueError):
            three_particle_operator(random_settings(2, rng))


class TestSquareExpansions:
    def test_chsh_square_residual(self):
        rng = np.random.default_rng(31)
        worst = max(
            chsh_square_expansion(random_settings(2, rng)).residual for _ in range(25)
        )
        assert worst < 1e-12

    def test_three_particle_square_residual(self):
        rng = np.random.default_rng(32)
        worst = max(
            three_particle_square_expansion(random_settings(3, rng)).residual
            for _ in range(25)
        )
        assert worst < 1e-12

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_mermin_square_residual(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(5):
            rep = mermin_square_expansion(random_settings(n, rng))
            assert rep.residual < 1e-10, f"n={n} residual {rep.residual}"

    def test_mermin_square_residual_n7(self):
        rng = np.random.default_rng(107)
        rep = mermin_square_expansion(random_settings(7, rng))
        assert rep.residual < 1e-10

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_group_counts_are_binomials(self, n):
        rng = np.random.default_rng(200 + n)
        rep = mermin_square_expansion(random_settings(n, rng))
        top = n - 1 if n % 2 else n - 2
        assert sorted(rep.group_term_counts) == list(range(2, top + 1, 2))
        for two_k, count in rep.group_term_counts.items():
            assert count == math.comb(n, two_k)
        assert rep.final_term_count == (2 if n % 2 == 0 else 0)

    def test_expansion_constant_term(self):
        # odd n: exactly 2^(n-1); even n: the closing anticommutator product is
        # a scalar and shifts it by -(-1)^(n/2) 2^(n-1) prod(n_j . n_j')
        rng = np.random.default_rng(41)
        for n in (3, 5):
            rep = mermin_square_expansion(random_settings(n, rng))
            assert abs(rep.expansion.coefficient("I" * n) - 2 ** (n - 1)) < 1e-10
        for n in (4, 6):
            s = random_settings(n, rng)
            rep = mermin_square_expansion(s)
            dots = math.prod(pair.a.dot(pair.b) for pair in s.pairs)
            want = 2 ** (n - 1) - (-1.0) ** (n // 2) * 2 ** (n - 1) * dots
            assert abs(rep.expansion.coefficient("I" * n) - want) < 1e-10

    def test_commutator_products_order_insensitive(self):
        rng = np.random.default_rng(42)
        s = random_settings(5, rng)
        cs = site_commutators(s)
        for subset in combinations(range(5), 4):
            fwd = PauliOperator.identity(5)
            for j in subset:
                fwd = fwd * cs[j]
            rev = PauliOperator.identity(5)
            for j in reversed(subset):
                rev = rev * cs[j]
            assert fwd.max_coeff_diff(rev) < 1e-12

    def test_anticommutators_are_scalar(self):
        rng = np.random.default_rng(43)
        s = random_settings(4, rng)
        for j, a in enumerate(site_anticommutators(s)):
            pair = s.pairs[j]
            want = PauliOperator.identity(4, 2.0 * pair.a.dot(pair.b))
            assert a.max_coeff_diff(want) < 1e-12

    def test_expansion_rejects_small_n(self):
        rng = np.random.default_rng(44)
        with pytest.raises(ValueError):
            mermin_square_expansion(random_settings(2, rng))


class TestDegenerateSquares:
    def test_all_commutators_vanishing_gives_scalar_square(self):
        # every pair aligned: B^2 is a multiple of the identity, and the
        # maximal |<B>| stays at or below the classical-scaling bound
        rng = np.random.default_rng(51)
        for n in (4, 5):
            pairs = []
            for _ in range(n):
                v = random_unit_vector(rng)
                pairs.append(SettingPair(v, v))
            s = MeasurementSettings(tuple(pairs))
            sq = mermin_operator(s) * mermin_operator(s)
            assert set(sq.terms) <= {"I" * n}
            top = math.sqrt(abs(sq.coefficient("I" * n)))
            assert top <= 2 ** (n / 2) + 1e-9

    def test_one_nonvanishing_commutator_still_scalar(self):
        # fewer than two surviving commutators cannot beat the scalar form
        rng = np.random.default_rng(52)
        n = 4
        pairs = [SettingPair(random_unit_vector(rng), random_unit_vector(rng))]
        for _ in range(n - 1):
            v = random_unit_vector(rng)
            pairs.append(SettingPair(v, v))
        s = MeasurementSettings(tuple(pairs))
        sq = mermin_operator(s) * mermin_operator(s)
        assert set(sq.terms) <= {"I" * n}


class TestPlanarClosedForms:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_diagonal_matches_dense_square(self, n):
        rng = np.random.default_rng(300 + n)
        for _ in range(5):
            p = random_planar(n, rng)
            closed = planar_square_diagonal(p)
            dense = to_dense(mermin_operator(p.to_measurement_settings()))
            square = dense @ dense
            off_diag = square - np.diag(np.diag(square))
            assert np.max(np.abs(off_diag)) < 1e-9
            assert np.max(np.abs(np.diag(square).real - closed)) < 1e-9

    def test_spectral_max_equals_diagonal_max(self):
        rng = np.random.default_rng(61)
        for n in (3, 4, 6, 8):
            p = random_planar(n, rng)
            assert abs(
                planar_spectral_max(p) - float(np.max(planar_square_diagonal(p)))
            ) < 1e-9

    def test_perpendicular_settings_diagonal_values(self):
        # theta_j = pi/2 everywhere: diagonal has 2^(2(n-1)) twice, zero elsewhere
        for n in (3, 4, 5):
            p = PlanarSettings(
                tuple((0.1 * j, 0.1 * j + math.pi / 2) for j in range(n))
            )
            diag = planar_square_diagonal(p)
            top = 2 ** (2 * (n - 1))
            assert int(np.sum(np.abs(diag - top) < 1e-9)) == 2
            assert int(np.sum(np.abs(diag) < 1e-9)) == (1 << n) - 2

    def test_one_zero_angle_halves_the_max(self):
        base = [math.pi / 2] * 4
        base[2] = 0.0
        p = PlanarSettings(tuple((0.0, t) for t in base))
        assert abs(planar_spectral_max(p) - 2 ** (2 * 3) / 2) < 1e-9

    def test_even_n_all_zero_angles(self):
        # n=4, all theta=0: closed form gives 2^(n-1)(1 - (-1)^(n/2) * 1) = 0
        p = PlanarSettings(tuple((0.3, 0.3) for _ in range(4)))
        diag = planar_square_diagonal(p)
        dense = to_dense(mermin_operator(p.to_measurement_settings()))
        square = dense @ dense
        assert np.max(np.abs(diag)) < 1e-9
        assert np.max(np.abs(square)) < 1e-9

    def test_diagonal_limit_enforced(self):
        p = PlanarSettings(tuple((0.0, 1.0) for _ in range(6)))
        with pytest.raises(ResourceLimitError):
            planar_square_diagonal(p, limit=5)

    def test_max_scales_by_half_per_extra_zero(self):
        # each additional zeroed angle halves the spectral maximum
        rng = np.random.default_rng(62)
        n = 6
        for m in (1, 2, 3):
            thetas = [math.pi / 2] * n
            for k in range(m):
                thetas[n - 1 - k] = 0.0
            p = PlanarSettings(tuple((0.0, t) for t in thetas))
            assert abs(
                planar_spectral_max(p) - 2 ** (2 * (n - 1) - m)
            ) < 1e-9
