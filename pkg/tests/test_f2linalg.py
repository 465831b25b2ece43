import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftqc import f2linalg as f2
from ftqc.errors import DecodeFailure, UnsupportedCodeError


def bitmat_strategy(max_rows=6, max_cols=10):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            min_size=1, max_size=max_rows,
        )
    )


@given(bitmat_strategy())
def test_rref_is_idempotent(rows):
    m = f2.bitmat(rows)
    r1, p1 = f2.rref(m)
    if r1.shape[0] == 0:
        return
    r2, p2 = f2.rref(r1)
    assert np.array_equal(r1, r2)
    assert p1 == p2


@given(bitmat_strategy())
def test_rref_preserves_row_space(rows):
    m = f2.bitmat(rows)
    r, pivots = f2.rref(m)
    # every original row reduces to zero against the basis
    for row in m:
        assert not f2.reduce_vector(row, r, pivots).any()


@given(bitmat_strategy(max_rows=5, max_cols=8))
def test_nullspace_annihilates(rows):
    m = f2.bitmat(rows)
    ns = f2.nullspace(m)
    for v in ns:
        assert not f2.syndrome(m, v).any()
    r, _ = f2.rref(m)
    assert ns.shape[0] == m.shape[1] - r.shape[0]


def test_weight():
    assert f2.weight(f2.bitvec("1011001")) == 4
    assert f2.weight(f2.bitvec("0000")) == 0


class TestReedMuller:
    def test_rm13_parameters(self):
        code = f2.reed_muller(1, 3)
        assert (code.n, code.k) == (8, 4)
        assert f2.min_distance(code) == 4

    def test_rm13_self_dual_doubly_even(self):
        cls = f2.classify(f2.reed_muller(1, 3))
        assert cls.self_dual
        assert cls.doubly_even
        assert cls.contains_dual

    def test_rm13_weights(self):
        weights = {f2.weight(w) for w in f2.reed_muller(1, 3).codewords()}
        assert weights == {0, 4, 8}

    def test_rm25_parameters(self):
        code = f2.reed_muller(2, 5)
        assert (code.n, code.k) == (32, 16)
        assert f2.min_distance(code) == 8

    def test_rm01_repetition(self):
        code = f2.reed_muller(0, 3)
        assert (code.n, code.k) == (8, 1)
        assert f2.min_distance(code) == 8

    def test_rejects_bad_orders(self):
        with pytest.raises(ValueError):
            f2.reed_muller(3, 2)
        with pytest.raises(ValueError):
            f2.reed_muller(-1, 3)


class TestPuncture:
    def test_steane_parameters(self):
        code = f2.puncture(f2.reed_muller(1, 3))
        assert (code.n, code.k) == (7, 4)
        assert f2.min_distance(code) == 3

    def test_steane_contains_dual_not_self_dual(self):
        cls = f2.classify(f2.puncture(f2.reed_muller(1, 3)))
        assert cls.contains_dual
        assert not cls.self_dual
        assert not cls.doubly_even

    def test_all_ones_is_a_codeword(self):
        code = f2.puncture(f2.reed_muller(1, 3))
        assert code.contains(np.ones(7, dtype=np.uint8))

    def test_explicit_coordinate(self):
        a = f2.puncture(f2.reed_muller(1, 3), 0)
        assert (a.n, a.k) == (7, 4)

    def test_rank_drop_rejected(self):
        # deleting coordinate 0 of {10, 01} collapses the first generator
        full = f2.LinearCode.from_generator(f2.bitmat(["10", "01"]))
        with pytest.raises(UnsupportedCodeError):
            f2.puncture(full, 0)


def test_dual_of_dual(steane_classical):
    assert f2.dual(f2.dual(steane_classical)) == steane_classical


def test_dual_dimensions(steane_classical):
    d = f2.dual(steane_classical)
    assert (d.n, d.k) == (7, 3)
    # dual-containing: every dual word is a codeword
    for w in d.codewords():
        assert steane_classical.contains(w)


class TestDecodeTable:
    def test_steane_table_complete(self, steane_classical):
        table = f2.build_decode_table(steane_classical, 1)
        # zero syndrome plus one entry per position: syndromes exhaust F2^3
        assert len(table.entries) == 8

    def test_roundtrip_all_single_errors(self, steane_classical):
        table = f2.build_decode_table(steane_classical, 1)
        h = steane_classical.parity_check
        for j in range(7):
            e = np.zeros(7, dtype=np.uint8)
            e[j] = 1
            assert np.array_equal(table.lookup(f2.syndrome(h, e)), e)

    def test_zero_syndrome_zero_error(self, steane_classical):
        table = f2.build_decode_table(steane_classical, 1)
        assert not table.lookup(np.zeros(3, dtype=np.uint8)).any()

    def test_rejects_radius_beyond_distance(self, steane_classical):
        with pytest.raises(ValueError):
            f2.build_decode_table(steane_classical, 2)

    def test_unknown_syndrome_raises(self):
        # [8,2,4] code: a weight-2 error pattern has no weight-<=1 coset
        # representative, so its syndrome is outside the t=1 table
        code = f2.LinearCode.from_generator(f2.bitmat(["11110000", "00001111"]))
        table = f2.build_decode_table(code, 1)
        e = np.zeros(8, dtype=np.uint8)
        e[0] = e[4] = 1
        with pytest.raises(DecodeFailure):
            table.lookup(f2.syndrome(code.parity_check, e))


def test_code_file_roundtrip(tmp_path, steane_classical):
    text = f2.format_code_file(steane_classical, comment="roundtrip check")
    path = tmp_path / "t.code"
    path.write_text(text)
    assert f2.load_code_file(path) == steane_classical


def test_code_file_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.code"
    path.write_text("7\n1001011\n")
    with pytest.raises(ValueError):
        f2.load_code_file(path)


@given(st.integers(0, 2**7 - 1))
def test_syndrome_zero_iff_codeword(steane_classical, word_bits):
    word = np.array([(word_bits >> i) & 1 for i in range(7)], dtype=np.uint8)
    syn = f2.syndrome(steane_classical.parity_check, word)
    assert (not syn.any()) == steane_classical.contains(word)


def test_codewords_count(steane_classical):
    words = steane_classical.codewords()
    assert len(words) == 16
    # closed under addition (spot check a generator pair)
    g = steane_classical.generator
    s = (g[0] ^ g[1])
    assert steane_classical.contains(s)
