"""Normalized-table and x-mod-q filter stages against direct definitions."""

import random

import numpy as np
import pytest

from pseudosieve.errors import InvalidConfigurationError
from pseudosieve.filters import (
    admissible_x_table,
    build_normalized_tables,
    build_secondary_filter,
    normalized_mask,
    passes_normalized,
    passes_secondary,
    secondary_evaluations,
    secondary_mask,
)
from pseudosieve.modarith import legendre_symbol
from pseudosieve.wheel import CUBE, SQUARE, production_moduli


class TestAdmissibleTable:
    @pytest.mark.parametrize("q", [3, 5, 7, 11, 101, 103, 107, 109])
    def test_square_counts_and_membership(self, q):
        table = admissible_x_table(SQUARE, q)
        assert table.sum() == (q - 1) // 2
        for a in range(q):
            assert table[a] == (legendre_symbol(a, q) == 1)

    @pytest.mark.parametrize("q", [7, 13, 193, 199, 211, 223])
    def test_cube_counts_1mod3(self, q):
        table = admissible_x_table(CUBE, q)
        assert table.sum() == (q - 1) // 3
        cubes = {x**3 % q for x in range(1, q)}
        assert set(np.nonzero(table)[0].tolist()) == cubes

    @pytest.mark.parametrize("q", [5, 11, 23])
    def test_cube_gcd_only_2mod3(self, q):
        table = admissible_x_table(CUBE, q)
        assert table.sum() == q - 1
        assert not table[0]

    def test_eight_and_nine(self):
        assert np.nonzero(admissible_x_table(SQUARE, 8))[0].tolist() == [1]
        assert np.nonzero(admissible_x_table(CUBE, 9))[0].tolist() == [1, 8]


class TestValidation:
    def test_prime_dividing_modulus_rejected(self):
        with pytest.raises(InvalidConfigurationError):
            build_normalized_tables(SQUARE, [7], 7 * 11, 120, 0)
        with pytest.raises(InvalidConfigurationError):
            build_secondary_filter(SQUARE, [5], 77, 120)

    def test_prime_below_two_rejected(self):
        with pytest.raises(InvalidConfigurationError):
            build_normalized_tables(SQUARE, [1], 77, 120, 0)

    def test_secondary_order_enforced(self):
        with pytest.raises(InvalidConfigurationError):
            build_secondary_filter(SQUARE, [17, 13], 77, 120)

    def test_unknown_mode(self):
        with pytest.raises(InvalidConfigurationError):
            build_normalized_tables("quartic", [13], 77, 120, 0)


class TestStagesAgree:
    def test_normalized_equals_secondary_randomized(self):
        # Same primes through both stages must accept the same pairs.
        rng = random.Random(23)
        mp, mn = 77, 120
        primes = (13, 17, 29)
        filt = build_secondary_filter(SQUARE, primes, mp, mn)
        for _ in range(300):
            t_n = rng.randrange(0, mn)
            tables = build_normalized_tables(SQUARE, primes, mp, mn, t_n)
            for _ in range(40):
                t_p = rng.randrange(0, 10**7)
                assert passes_normalized(t_p, tables) == passes_secondary(filt, t_p, t_n)

    def test_against_direct_definition(self):
        rng = random.Random(29)
        mp, mn = 77, 120
        for mode, primes in [(SQUARE, (13, 17)), (CUBE, (13, 19))]:
            filt = build_secondary_filter(mode, primes, mp, mn)
            for _ in range(2000):
                t_p = rng.randrange(0, 10**9)
                t_n = rng.randrange(0, mn)
                x = t_p * mn - t_n * mp
                want = all(admissible_x_table(mode, q)[x % q] for q in primes)
                assert passes_secondary(filt, t_p, t_n) == want

    def test_vector_matches_scalar(self):
        rng = random.Random(31)
        mp, mn = 701856356111039402, 693110504329192503
        primes = (193, 199, 211, 223)
        filt = build_secondary_filter(CUBE, primes, mp, mn)
        t_n = 123456789
        tables = build_normalized_tables(CUBE, primes, mp, mn, t_n)
        vals = np.array([rng.randrange(0, 2**62) for _ in range(5000)], dtype=np.int64)
        nm = normalized_mask(tables, vals)
        sm = secondary_mask(filt, vals, t_n)
        assert np.array_equal(nm, sm)
        for i in rng.sample(range(len(vals)), 200):
            t_p = int(vals[i])
            assert nm[i] == passes_normalized(t_p, tables)
            assert sm[i] == passes_secondary(filt, t_p, t_n)


class TestPassRates:
    def test_square_normalized_rate(self):
        # Four odd primes cut a random stream by about (1/2)^4.
        mp, mn = production_moduli(SQUARE)
        tables = build_normalized_tables(
            SQUARE, (101, 103, 107, 109), mp.product, mn.product, 987654321
        )
        rng = np.random.default_rng(42)
        vals = rng.integers(0, 2**62, size=1_000_000, dtype=np.int64)
        rate = normalized_mask(tables, vals).mean()
        assert abs(rate - 1 / 16) / (1 / 16) < 0.2

    def test_cube_normalized_rate(self):
        # Four primes = 1 mod 3 cut by about (1/3)^4.
        mp, mn = production_moduli(CUBE)
        tables = build_normalized_tables(
            CUBE, (193, 199, 211, 223), mp.product, mn.product, 192837465
        )
        rng = np.random.default_rng(43)
        vals = rng.integers(0, 2**62, size=1_000_000, dtype=np.int64)
        rate = normalized_mask(tables, vals).mean()
        assert abs(rate - 1 / 81) / (1 / 81) < 0.2

    def test_mean_secondary_evaluations(self):
        # Geometric stopping: ~2 primes examined on average per rejection.
        mp, mn = production_moduli(SQUARE)
        filt = build_secondary_filter(SQUARE, (113, 127, 131, 137), mp.product, mn.product)
        rng = random.Random(47)
        total = 0
        n = 20_000
        for _ in range(n):
            total += secondary_evaluations(filt, rng.randrange(2**62), rng.randrange(2**62))
        assert total / n < 3.0


class TestTableRowSoundness:
    def test_known_value_passes_filters(self):
        # 196265095009 verifies at every odd prime through 113, so after
        # decomposition it must clear filters built on primes 101..109.
        mp, mn = production_moduli(SQUARE)
        big = 196265095009
        t_n = -big * pow(mp.product, -1, mn.product) % mn.product
        t_p = (big + t_n * mp.product) // mn.product
        assert t_p * mn.product - t_n * mp.product == big
        primes = (101, 103, 107, 109)
        tables = build_normalized_tables(SQUARE, primes, mp.product, mn.product, t_n)
        filt = build_secondary_filter(SQUARE, primes, mp.product, mn.product)
        assert passes_normalized(t_p, tables)
        assert passes_secondary(filt, t_p, t_n)
        assert normalized_mask(tables, np.array([t_p], dtype=np.int64))[0]
        assert secondary_mask(filt, np.array([t_p], dtype=np.int64), t_n)[0]
