"""Bound table rows: covering counts, individual bounds, table assembly."""

import itertools
import math

import pytest

from gtreadout import bounds
from gtreadout.bounds import (
    BoundResult,
    cover_count,
    lb_info,
    lb_private_pairs,
    lb_ruszinko,
    r_coverings,
    sandwich_ok,
    table3,
    to_tsv,
    ub_bernoulli,
    ub_hwang_sos,
    ub_sequential,
)


def brute_coverings(d: int, t: int, w: int, i: int) -> int:
    """Ordered d-tuples of w-subsets of [t] whose union contains {0..w-i-1}."""
    fixed = set(range(w - i))
    subsets = list(itertools.combinations(range(t), w))
    count = 0
    for tup in itertools.product(subsets, repeat=d):
        union = set()
        for s in tup:
            union.update(s)
        if fixed <= union:
            count += 1
    return count


class TestCoverings:
    def test_recursion_matches_brute_force(self):
        for d in range(1, 4):
            for t in range(1, 9):
                for w in range(1, min(4, t) + 1):
                    for i in range(w + 1):
                        assert r_coverings(d, t, w, i) == brute_coverings(d, t, w, i)

    def test_closed_form_matches_recursion(self):
        for d in range(1, 5):
            for t in range(1, 12):
                for w in range(1, min(6, t) + 1):
                    for i in range(w + 1):
                        assert cover_count(d, t, w, i) == r_coverings(d, t, w, i)

    def test_spot_value(self):
        assert r_coverings(2, 6, 3, 0) == 147

    def test_full_coverage_base(self):
        # i = w: nothing left to cover, so all C(t,w)^d tuples qualify
        assert r_coverings(3, 7, 3, 3) == math.comb(7, 3) ** 3

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            r_coverings(0, 5, 2)
        with pytest.raises(ValueError):
            cover_count(1, 3, 5)


class TestIndividualRows:
    def test_info_bound_brute(self):
        # smallest t with 2^t >= number of supports of size <= d
        for n, d in [(10, 2), (50, 3), (100, 2)]:
            total = sum(math.comb(n, i) for i in range(d + 1))
            t = lb_info(n, d)
            assert 2**t >= total > 2 ** (t - 1)

    def test_info_monotone_in_n_and_d(self):
        assert lb_info(200, 2) <= lb_info(400, 2)
        assert lb_info(200, 2) <= lb_info(200, 3)

    def test_hwang_sos_formula(self):
        # floor(16 d^2 log_3 2 (log_2 n - 1)) at comfortable distance from
        # integer boundaries
        v = ub_hwang_sos(1000, 2)
        expect = 16 * 4 * (math.log(2) / math.log(3)) * (math.log2(1000) - 1)
        assert v == int(expect)

    def test_bernoulli_matches_float_formula(self):
        for n, d in [(100, 2), (500, 3)]:
            rr = 1 - d**d / (d + 1) ** (d + 1)
            approx = 1 - math.log(n * math.comb(n - 1, d)) / math.log(rr)
            assert abs(ub_bernoulli(n, d) - approx) < 2

    def test_sequential_returns_feasible_t(self):
        r = ub_sequential(100, 2)
        assert isinstance(r, BoundResult)
        assert r.value >= lb_info(100, 2)

    def test_lower_bounds_below_upper_bounds(self):
        for d in (2, 3):
            lo = max(lb_info(400, d), lb_private_pairs(400, d).value)
            hi = min(ub_bernoulli(400, d), ub_sequential(400, d).value)
            assert lo <= hi

    def test_ruszinko_variants(self):
        exact = lb_ruszinko(400, 2, variant="exact")
        floored = lb_ruszinko(400, 2, variant="floor")
        assert floored.value <= exact.value


class TestTable:
    def test_rejects_d_below_2(self):
        with pytest.raises(ValueError):
            table3(100, [1, 2])

    def test_rejects_unknown_row(self):
        with pytest.raises(ValueError):
            table3(100, [2], rows=["z"])

    def test_small_n_all_computed_rows(self):
        results = table3(100, [2], rows=list("acdefghipst"))
        got = {r.row_id for r in results}
        assert got == set("acdefghipst")
        assert sandwich_ok(results)

    def test_literature_rows_only_at_3600(self):
        r100 = table3(100, [2], rows=["b"])
        assert r100 == []
        r3600 = table3(3600, [2], rows=["b"])
        assert len(r3600) == 1 and r3600[0].status == "literature"

    def test_construction_rows_use_codes(self):
        from gtreadout.construct import greedy_construct

        code = greedy_construct(30, 5, 2, 100, seed=1, budget=10**5)
        results = table3(100, [2], rows=["l"], codes={2: code})
        assert len(results) == 1 and results[0].value == 30
        assert results[0].status == "constructed"

    def test_to_tsv_shape(self):
        results = table3(100, [2, 3], rows=["t", "p"])
        text = to_tsv(results)
        lines = text.strip().split("\n")
        assert lines[0].split("\t") == ["row_id", "d", "value", "optimizer", "status"]
        assert len(lines) == 1 + len(results)

    def test_ruszinko_printed_reference_emitted_at_3600(self):
        results = table3(3600, [2], rows=["s"])
        statuses = sorted(r.status for r in results)
        assert statuses == ["computed", "literature"]
        lit = next(r for r in results if r.status == "literature")
        assert lit.value == bounds.RUSZINKO_PRINTED_3600[2]
