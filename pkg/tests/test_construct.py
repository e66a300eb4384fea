"""Constructions: sieve, greedy, concatenation, shortening, recipes."""

import io

import numpy as np
import pytest

from gtreadout import binmat, verify
from gtreadout.binmat import BinaryCode, CodeMeta, max_overlap
from gtreadout.construct import (
    PrimePowerSet,
    build_recipe,
    catalog_descriptor,
    concat_identity,
    concat_inner,
    crt_sieve,
    extend_greedy,
    greedy_construct,
    import_code,
    inner_affine_lines,
    max_zero_shortening_steps,
    parse_recipe,
    shorten_weight,
    shorten_zero,
)
from gtreadout.gf import field_make, rs_code


def as_dense(code: BinaryCode) -> np.ndarray:
    out = np.zeros((code.t, code.n), dtype=np.int8)
    for j, col in enumerate(code.columns):
        out[list(col), j] = 1
    return out


class TestCrtSieve:
    def test_worked_example_bit_for_bit(self):
        # remainder sieve over {2, 3} gives the documented 1-disjunct
        # 5 x 6 matrix: a mod-2 block stacked on a mod-3 block
        code = crt_sieve(PrimePowerSet((2, 3)), 6)
        expected = np.array(
            [
                [1, 0, 1, 0, 1, 0],
                [0, 1, 0, 1, 0, 1],
                [1, 0, 0, 1, 0, 0],
                [0, 1, 0, 0, 1, 0],
                [0, 0, 1, 0, 0, 1],
            ],
            dtype=np.int8,
        )
        assert (as_dense(code) == expected).all()
        assert code.meta.certified_d == 1

    def test_length_is_sum_of_moduli(self):
        code = crt_sieve(PrimePowerSet((4, 3, 5, 7)), 100)
        assert code.t == 4 + 3 + 5 + 7

    def test_certificate_from_product(self):
        # product 4*3*5*7 = 420 >= 100^1 but < 100^2: certified exactly d=1
        code = crt_sieve(PrimePowerSet((4, 3, 5, 7)), 100)
        assert code.meta.certified_d == 1
        # 3*5*7*11*13 = 15015 >= 100^2: certified d=2
        code2 = crt_sieve(PrimePowerSet((3, 5, 7, 11, 13)), 100)
        assert code2.meta.certified_d == 2

    def test_certificate_holds_exactly(self):
        code = crt_sieve(PrimePowerSet((3, 5, 7, 11, 13)), 100)
        assert verify.exact_check(code, 2).kind is verify.VerdictKind.CERTIFIED_TRUE


class TestGreedy:
    def test_reaches_target_and_respects_overlap(self):
        code = greedy_construct(30, 5, 2, 50, seed=5, budget=10**5)
        assert code.n == 50
        assert all(len(c) == 5 for c in code.columns)
        mu, _ = max_overlap(code)
        assert mu <= (5 - 1) // 2
        assert code.meta.certified_d == 2

    def test_deterministic_given_seed(self):
        a = greedy_construct(30, 5, 2, 40, seed=9, budget=10**5)
        b = greedy_construct(30, 5, 2, 40, seed=9, budget=10**5)
        assert a.columns == b.columns

    def test_budget_exhaustion_flagged(self):
        code = greedy_construct(10, 5, 2, 10**4, seed=0, budget=200)
        assert code.n < 10**4
        assert "stopped:budget" in code.meta.flags

    def test_extend_greedy(self):
        base = greedy_construct(30, 5, 2, 20, seed=1, budget=10**5)
        bigger = extend_greedy(base, 40, seed=2, budget=10**5)
        assert bigger.n == 40
        assert bigger.columns[:20] == base.columns
        mu, _ = max_overlap(bigger)
        assert mu <= base.meta.max_overlap


class TestConcatenation:
    def test_symbol_mapping_block(self):
        # the documented mapping of the word (2,0,1,2,1,1,0) over GF(3):
        # symbol v in block b becomes a one at row b*q + v
        word = (2, 0, 1, 2, 1, 1, 0)
        expected_block = np.array(
            [
                [0, 1, 0, 0, 0, 0, 1],
                [0, 0, 1, 0, 1, 1, 0],
                [1, 0, 0, 1, 0, 0, 0],
            ],
            dtype=np.int8,
        )
        rows = {b * 3 + v for b, v in enumerate(word)}
        got = np.zeros((3, 7), dtype=np.int8)
        for b in range(7):
            for v in range(3):
                if b * 3 + v in rows:
                    got[v, b] = 1
        assert (got == expected_block).all()

    def test_concat_identity_follows_mapping(self):
        qc = rs_code(field_make(5), 5, 2)
        code = concat_identity(qc)
        from gtreadout.gf import enumerate_codewords

        words = enumerate_codewords(qc)
        for j in range(code.n):
            assert code.columns[j] == tuple(
                b * 5 + int(v) for b, v in enumerate(words[j])
            )

    def test_concat_identity_certificate(self):
        # mu = n_q - d_q = 1, w = n_q = 5 gives certified d = 4
        qc = rs_code(field_make(5), 5, 2)
        code = concat_identity(qc)
        assert code.meta.weight == 5
        assert code.meta.max_overlap == 1
        assert code.meta.certified_d == 4
        mu, _ = max_overlap(code)
        assert mu == 1

    def test_concat_inner_affine(self):
        inner = inner_affine_lines(3)
        assert inner.t == 9 and inner.n == 12
        assert inner.meta.weight == 3 and inner.meta.max_overlap == 1
        assert inner.meta.certified_d == 2
        qc = rs_code(field_make(7), 7, 2)
        code = concat_inner(qc, inner)
        assert code.t == 7 * 9
        assert code.meta.weight == 7 * 3

    def test_concat_inner_requires_certificate(self):
        qc = rs_code(field_make(5), 5, 2)
        naked = BinaryCode(5, 5, tuple((j,) for j in range(5)))
        with pytest.raises(ValueError):
            concat_inner(qc, naked)


class TestShortening:
    def test_shorten_weight_drops_weight(self):
        qc = rs_code(field_make(5), 5, 2)
        code = concat_identity(qc)
        short = shorten_weight(code)
        assert short.t == code.t - 1
        assert short.meta.weight == code.meta.weight - 1
        assert short.n >= 1

    def test_shorten_zero_preserves_weight(self):
        qc = rs_code(field_make(11), 10, 4)
        code = concat_identity(qc, n=400)
        short = shorten_zero(code, 5)
        assert short.t == code.t - 5
        assert short.meta.weight == code.meta.weight
        assert short.meta.certified_d == code.meta.certified_d
        mu, _ = max_overlap(short)
        assert mu <= code.meta.max_overlap

    def test_shorten_zero_zero_steps(self):
        qc = rs_code(field_make(5), 5, 2)
        code = concat_identity(qc)
        assert shorten_zero(code, 0) is code

    def test_max_zero_shortening_steps(self):
        qc = rs_code(field_make(11), 10, 4)
        code = concat_identity(qc, n=400)
        steps = max_zero_shortening_steps(code)
        assert steps >= 1
        shortened = shorten_zero(code, steps)
        assert shortened.n >= 1


class TestRecipes:
    def test_parse_fields(self):
        rec = parse_recipe("(13,4,10)_13^Iq,s(8)")
        assert (rec.n_q, rec.k_dim, rec.d_q, rec.q) == (13, 4, 10, 13)
        assert rec.inner == "Iq"
        assert rec.shorten_steps == 8

    def test_parse_affine_inner(self):
        rec = parse_recipe("(7,4,4)_11^A(9,4,3)")
        assert rec.inner == "A(9,4,3)"

    def test_parse_rejects_garbage(self):
        for bad in ["(13,4)_13", "13,4,10_13^Iq", "(13,4,10)_13^Zz", ""]:
            with pytest.raises(ValueError):
                parse_recipe(bad)

    def test_build_small_recipe(self):
        code = build_recipe("(5,2,4)_5^Iq")
        assert code.t == 25 and code.n == 25
        assert code.meta.certified_d == 4

    def test_truncation_is_prefix(self):
        full = build_recipe("(5,2,4)_5^Iq")
        cut = build_recipe("(5,2,4)_5^Iq", n=10)
        assert cut.columns == full.columns[:10]

    def test_truncation_beyond_size_rejected(self):
        with pytest.raises(ValueError):
            build_recipe("(5,2,4)_5^Iq", n=26)

    def test_catalog_descriptor(self):
        assert catalog_descriptor(14400, 3) == "(10,4,7)_11^Iq"
        with pytest.raises(KeyError):
            catalog_descriptor(3600, 2)  # external construction
        with pytest.raises(KeyError):
            catalog_descriptor(77, 2)


class TestImport:
    def test_round_trip_via_gtmx(self):
        code = greedy_construct(20, 4, 2, 15, seed=3, budget=10**5)
        buf = io.StringIO()
        binmat.save(code, buf)
        buf.seek(0)
        back = import_code(buf, weight=4)
        assert back.columns == code.columns
        assert back.meta.certified_d == code.meta.certified_d

    def test_declared_weight_mismatch(self):
        code = greedy_construct(20, 4, 2, 15, seed=3, budget=10**5)
        buf = io.StringIO()
        binmat.save(code, buf)
        buf.seek(0)
        with pytest.raises(ValueError):
            import_code(buf, weight=5)

    def test_declared_overlap_mismatch(self):
        code = greedy_construct(20, 4, 2, 15, seed=3, budget=10**5)
        buf = io.StringIO()
        binmat.save(code, buf)
        buf.seek(0)
        with pytest.raises(ValueError):
            import_code(buf, overlap=0)

    def test_plain_column_list(self):
        text = "0 2\n1 3\n0 1\n"
        back = import_code(io.StringIO(text), length=4)
        assert back.n == 3 and back.t == 4
        assert back.columns == ((0, 2), (1, 3), (0, 1))
