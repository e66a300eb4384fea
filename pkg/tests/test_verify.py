"""Disjunctness verification: certificates, exact search, randomized checks."""

import numpy as np
import pytest

from gtreadout.binmat import BinaryCode, reference_design
from gtreadout.construct import greedy_construct
from gtreadout.verify import (
    VerdictKind,
    check_overlap_certificate,
    check_separable,
    exact_check,
    naive_check,
    random_check,
)


def random_code(rng, t, n, w):
    cols = tuple(
        tuple(sorted(rng.choice(t, size=w, replace=False).tolist()))
        for _ in range(n)
    )
    return BinaryCode(t, n, cols)


class TestCertificate:
    def test_certifies_greedy_code(self):
        code = greedy_construct(30, 5, 2, 40, seed=1, budget=10**5)
        v = check_overlap_certificate(code, 2)
        assert v.kind is VerdictKind.CERTIFIED_TRUE

    def test_beyond_certificate_is_inconclusive(self):
        code = greedy_construct(30, 5, 2, 40, seed=1, budget=10**5)
        v = check_overlap_certificate(code, 5)
        assert v.kind is VerdictKind.NO_VIOLATION_FOUND

    def test_nonuniform_weight_inapplicable(self):
        code = BinaryCode(4, 2, ((0,), (1, 2)))
        v = check_overlap_certificate(code, 1)
        assert v.kind is VerdictKind.NO_VIOLATION_FOUND
        assert "inapplicable" in v.scope

    def test_disjoint_columns(self):
        code = reference_design("per_pixel", 3)
        v = check_overlap_certificate(code, 8)
        assert v.kind is VerdictKind.CERTIFIED_TRUE


class TestExactCheck:
    def test_finds_cross_strip_violation(self):
        code = reference_design("cross_strip", 5)
        v = exact_check(code, 2)
        assert v.kind is VerdictKind.CERTIFIED_FALSE
        j, others = v.witness
        union = set()
        for i in others:
            union.update(code.columns[i])
        assert set(code.columns[j]) <= union

    def test_cross_strip_is_1_disjunct(self):
        code = reference_design("cross_strip", 5)
        assert exact_check(code, 1).kind is VerdictKind.CERTIFIED_TRUE

    def test_agrees_with_naive_small_random(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            t = int(rng.integers(6, 12))
            n = int(rng.integers(4, 14))
            w = int(rng.integers(2, min(5, t)))
            d = int(rng.integers(1, 4))
            code = random_code(rng, t, n, w)
            a = exact_check(code, d)
            b = naive_check(code, d)
            assert a.ok == b.ok
            assert (a.kind is VerdictKind.CERTIFIED_FALSE) == (
                b.kind is VerdictKind.CERTIFIED_FALSE
            )

    def test_target_subset_scope(self):
        code = reference_design("cross_strip", 4)
        v = exact_check(code, 2, targets=[0, 1])
        assert "2 targets" in v.scope

    def test_workers_agree(self):
        code = greedy_construct(25, 5, 2, 30, seed=2, budget=10**5)
        a = exact_check(code, 2, workers=1)
        b = exact_check(code, 2, workers=4)
        assert a.kind == b.kind == VerdictKind.CERTIFIED_TRUE

    def test_budget_exhaustion(self):
        code = reference_design("cross_strip", 8)
        v = exact_check(code, 3, node_budget=1)
        assert v.kind is VerdictKind.NO_VIOLATION_FOUND
        assert "budget" in v.scope

    def test_rejects_bad_d(self):
        with pytest.raises(ValueError):
            exact_check(reference_design("per_pixel", 2), 0)


class TestRandomCheck:
    def test_finds_easy_violation(self):
        code = reference_design("cross_strip", 10)
        v = random_check(code, 2, 10**4, seed=0)
        assert v.kind is VerdictKind.CERTIFIED_FALSE
        j, others = v.witness
        union = set()
        for i in others:
            union.update(code.columns[i])
        assert set(code.columns[j]) <= union

    def test_no_violation_on_certified_code(self):
        code = greedy_construct(30, 5, 2, 40, seed=1, budget=10**5)
        v = random_check(code, 2, 5000, seed=3)
        assert v.kind is VerdictKind.NO_VIOLATION_FOUND

    def test_rejects_bad_d(self):
        code = reference_design("per_pixel", 2)
        with pytest.raises(ValueError):
            random_check(code, 4, 10)


class TestSeparable:
    def test_per_pixel_separable(self):
        code = reference_design("per_pixel", 2)
        assert check_separable(code, 2).kind is VerdictKind.CERTIFIED_TRUE

    def test_binary_counting_not_2_separable(self):
        # columns encode the numbers 1..n, so {1,2} and {3} collide
        code = reference_design("binary_counting", 2)
        v = check_separable(code, 2)
        assert v.kind is VerdictKind.CERTIFIED_FALSE

    def test_limit_enforced(self):
        code = reference_design("per_pixel", 10)
        with pytest.raises(ValueError):
            check_separable(code, 5, limit=10)
