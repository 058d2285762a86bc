"""Bundled tables, brute-force scan oracle, ratio and crossover statistics."""

import math

import numpy as np
import pytest

from pseudosieve.analysis import (
    BRUTE_FORCE_BOUND_LIMIT,
    PseudoRecord,
    brute_force_all,
    brute_force_min,
    bundled_table,
    conjecture_ratio,
    crossover_ratio,
    crossover_table,
    crossover_value,
    load_table,
    table_stats,
)
from pseudosieve.errors import InvalidConfigurationError, InvalidRecordError
from pseudosieve.modarith import is_cubic_residue, is_perfect_cube, is_perfect_square, legendre_symbol
from pseudosieve.primes import nth_prime, nth_prime_1mod3, odd_primes_up_to, primes_1mod3_up_to, primes_up_to
from pseudosieve.wheel import CUBE, SQUARE


def scalar_square_scan(p_max, bound):
    out = []
    primes = odd_primes_up_to(p_max)
    for x in range(1, bound + 1):
        if x % 8 != 1:
            continue
        if any(legendre_symbol(x, q) != 1 for q in primes):
            continue
        if is_perfect_square(x):
            continue
        out.append(x)
    return out


def scalar_cube_scan(p_max, bound):
    out = []
    res_primes = primes_1mod3_up_to(p_max)
    all_primes = primes_up_to(p_max)
    for x in range(1, bound + 1):
        if x % 9 not in (1, 8):
            continue
        if any(x % q == 0 for q in all_primes):
            continue
        if any(not is_cubic_residue(x, q) for q in res_primes):
            continue
        if is_perfect_cube(x):
            continue
        out.append(x)
    return out


class TestBundledTables:
    def test_square_table_shape(self):
        recs = bundled_table(SQUARE)
        assert len(recs) == 73
        assert recs[0] == PseudoRecord(2, 3, 73, SQUARE)
        assert recs[-1].n == 74 and recs[-1].prime == 373
        for r in recs:
            assert r.kind == SQUARE and r.prime == nth_prime(r.n)
        values = [r.value for r in recs]
        assert values == sorted(values)

    def test_cube_table_shape(self):
        recs = bundled_table(CUBE)
        assert len(recs) == 44
        assert recs[0] == PseudoRecord(10, 79, 7235857, CUBE)
        assert recs[-1].n == 53 and recs[-1].prime == 613
        for r in recs:
            assert r.kind == CUBE and r.prime == nth_prime_1mod3(r.n)
        values = [r.value for r in recs]
        assert values == sorted(values)

    def test_known_rows(self):
        sq = {r.n: r.value for r in bundled_table(SQUARE)}
        assert sq[2] == 73
        assert sq[3] == 241
        assert sq[30] == 196265095009
        cu = {r.n: r.value for r in bundled_table(CUBE)}
        assert cu[21] == 20365764119


class TestLoadTable:
    def test_round_trip(self):
        recs = load_table("2 3 73\n3 5 241\n")
        assert [r.value for r in recs] == [73, 241]

    def test_kind_inference(self):
        assert load_table("10 79 7235857")[0].kind == CUBE
        assert load_table("2 3 73")[0].kind == SQUARE

    def test_mixed_kinds_rejected(self):
        with pytest.raises(InvalidRecordError):
            load_table("2 3 73\n10 79 7235857\n")

    def test_empty_rejected(self):
        with pytest.raises(InvalidRecordError):
            load_table("# nothing\n")

    def test_wrong_prime_rejected(self):
        with pytest.raises(InvalidRecordError):
            load_table("2 5 73")

    def test_bad_field_rejected(self):
        with pytest.raises(InvalidRecordError):
            load_table("2 3 seventy")
        with pytest.raises(InvalidRecordError):
            load_table("2 3")


class TestBruteForce:
    def test_square_matches_scalar_reference(self):
        for p_max, bound in [(3, 2000), (5, 20000), (7, 50000)]:
            got = brute_force_all(SQUARE, p_max, bound)
            assert got.tolist() == scalar_square_scan(p_max, bound)

    def test_cube_matches_scalar_reference(self):
        for p_max, bound in [(7, 100000), (13, 100000)]:
            got = brute_force_all(CUBE, p_max, bound)
            assert got.tolist() == scalar_cube_scan(p_max, bound)

    def test_frozen_minima(self):
        assert brute_force_min(SQUARE, 3, 10**3) == 73
        assert brute_force_min(SQUARE, 5, 10**3) == 241
        assert brute_force_min(SQUARE, 7, 10**4) == 1009
        assert brute_force_min(CUBE, 7, 10**5) == 71
        assert brute_force_min(CUBE, 79, 10**7 + 300000) == 7235857

    def test_min_none_when_absent(self):
        assert brute_force_min(SQUARE, 47, 10**4) is None

    def test_excludes_perfect_powers(self):
        # 49 = 7^2 meets every mod condition for p_max = 3 but is a square.
        assert 49 not in brute_force_all(SQUARE, 3, 100).tolist()
        assert 1 not in brute_force_all(SQUARE, 3, 100).tolist()
        assert 8 not in brute_force_all(CUBE, 2, 100).tolist()

    def test_bound_limit(self):
        with pytest.raises(InvalidConfigurationError):
            brute_force_all(SQUARE, 3, BRUTE_FORCE_BOUND_LIMIT + 1)

    def test_bad_args(self):
        with pytest.raises(InvalidConfigurationError):
            brute_force_all(SQUARE, 4, 100)
        with pytest.raises(InvalidConfigurationError):
            brute_force_all("quartic", 3, 100)
        with pytest.raises(InvalidConfigurationError):
            brute_force_all(SQUARE, 3, 0)


class TestConjectureRatios:
    def test_square_spot_values(self):
        recs = {r.n: r for r in bundled_table(SQUARE)}
        assert conjecture_ratio(recs[2]) == pytest.approx(73 / (4 * math.log(3)))
        assert conjecture_ratio(recs[2]) == pytest.approx(16.61, abs=0.01)
        assert conjecture_ratio(recs[66]) == pytest.approx(5.04, abs=0.01)

    def test_cube_spot_values(self):
        recs = {r.n: r for r in bundled_table(CUBE)}
        assert conjecture_ratio(recs[10]) == pytest.approx(
            7235857 / (3**10 * math.log(79) ** 2)
        )
        assert conjecture_ratio(recs[10]) == pytest.approx(6.42, abs=0.01)

    def test_repeated_value_scaling(self):
        # When consecutive rows share one L, the ratio scales by exactly
        # 2 * ln(p_n) / ln(p_{n+1}).
        recs = {r.n: r for r in bundled_table(SQUARE)}
        for n in range(2, 74):
            a, b = recs[n], recs[n + 1]
            if a.value == b.value:
                want = conjecture_ratio(a) * math.log(a.prime) / (2 * math.log(b.prime))
                assert conjecture_ratio(b) == pytest.approx(want, rel=1e-12)

    def test_table_one_stats(self):
        lo, hi, mean = table_stats(conjecture_ratio(r) for r in bundled_table(SQUARE))
        assert lo == pytest.approx(5.04, abs=0.01)
        assert hi == pytest.approx(161.79, abs=0.01)
        assert mean == pytest.approx(46.152, abs=0.01)

    def test_table_two_stats(self):
        lo, hi, mean = table_stats(conjecture_ratio(r) for r in bundled_table(CUBE))
        assert lo > 0.05
        assert hi < 6.5
        assert 1.1 <= mean <= 1.35


class TestCrossover:
    def test_identity_on_matched_powers(self):
        # k^3 and k^2 share the same growth point: ratio exactly 1.
        k = 12345
        assert crossover_value(k**3, k**2) == pytest.approx(1.0, rel=1e-12)

    def test_record_wrapper_validates(self):
        sq = PseudoRecord(12, 37, 1, SQUARE)
        cu = PseudoRecord(12, 103, 1, CUBE)
        assert crossover_ratio(sq, cu) == crossover_value(1, 1)
        with pytest.raises(InvalidRecordError):
            crossover_ratio(cu, sq)
        with pytest.raises(InvalidRecordError):
            crossover_ratio(sq, PseudoRecord(13, 109, 1, CUBE))

    def test_published_crossover_point(self):
        sq = {r.n: r for r in bundled_table(SQUARE)}
        cu = {r.n: r for r in bundled_table(CUBE)}
        assert crossover_ratio(sq[48], cu[48]) == pytest.approx(2.214, abs=0.005)

    def test_table_spans_shared_indices(self):
        rows = crossover_table(bundled_table(SQUARE), bundled_table(CUBE))
        ns = [n for n, _ in rows]
        assert ns == list(range(10, 54))
        ratios = dict(rows)
        assert ratios[48] == pytest.approx(2.214, abs=0.005)

    def test_positive_values_required(self):
        with pytest.raises(ValueError):
            crossover_value(0, 5)


class TestStats:
    def test_single_record(self):
        assert table_stats([3.5]) == (3.5, 3.5, 3.5)

    def test_empty_rejected(self):
        with pytest.raises(InvalidRecordError):
            table_stats([])

    def test_simple(self):
        lo, hi, mean = table_stats([1.0, 2.0, 6.0])
        assert (lo, hi, mean) == (1.0, 6.0, 3.0)
