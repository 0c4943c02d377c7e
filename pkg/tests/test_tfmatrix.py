import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rstab import RatFun, SignalSpace, TFMatrix, embed, shift_identity
from rstab.errors import SingularMatrixError, SpaceMismatchError

from helpers import adjugate_inverse, rand_ratfun

SP = SignalSpace.make(x=1, u=1)
G = RatFun(1, [0, 1])  # z^{-1}
K = RatFun(F(1, 2))


def loop_matrix(g=G, k=K):
    return TFMatrix.from_blocks(SP, SP, {("x", "u"): [[g]], ("u", "x"): [[k]]})


class TestSignalSpace:
    def test_duplicate_names_rejected(self):
        with pytest.raises(SpaceMismatchError):
            SignalSpace((("x", 1), ("x", 2)))

    def test_offsets(self):
        sp = SignalSpace.make(x=2, u=1, y=3)
        assert sp.total == 6
        assert sp.offset("u") == 2
        assert list(sp.index_range("y")) == [3, 4, 5]
        with pytest.raises(SpaceMismatchError):
            sp.offset("w")


class TestBlocks:
    def test_block_access(self):
        m = loop_matrix()
        assert m.block("x", "u")[0, 0] == G
        assert m.block("u", "u").is_zero
        assert TFMatrix.identity(SP).block("x", "u").is_zero

    def test_unknown_block_name(self):
        with pytest.raises(SpaceMismatchError):
            loop_matrix().block("x", "w")

    def test_block_reassembly_roundtrip(self):
        rng = random.Random(3)
        sp = SignalSpace.make(a=2, b=1)
        m = TFMatrix(sp, sp, [[rand_ratfun(rng, 2) for _ in range(3)] for _ in range(3)])
        blocks = {(r, c): m.block(r, c) for r in sp.names for c in sp.names}
        assert TFMatrix.from_blocks(sp, sp, blocks) == m

    def test_row_blocks_reassemble_via_embed(self):
        rng = random.Random(5)
        sp = SignalSpace.make(a=2, b=1)
        cols = SignalSpace.single("w", 2)
        m = TFMatrix(sp, cols, [[rand_ratfun(rng, 2) for _ in range(2)] for _ in range(3)])
        total = TFMatrix.zeros(sp, cols)
        for name in sp.names:
            total = total + embed(sp, name) @ m.row_block(name)
        assert total == m


class TestArithmetic:
    def test_identity_neutral(self):
        m = loop_matrix()
        assert TFMatrix.identity(SP) @ m == m
        assert m @ TFMatrix.identity(SP) == m

    def test_additive_inverse(self):
        m = loop_matrix()
        assert (m + (-m)).is_zero

    def test_offdiagonal_square(self):
        # [[0, G], [K, 0]]^2 = [[GK, 0], [0, KG]]
        m = loop_matrix()
        sq = m @ m
        assert sq.block("x", "x")[0, 0] == G * K
        assert sq.block("u", "u")[0, 0] == K * G
        assert sq.block("x", "u").is_zero and sq.block("u", "x").is_zero

    def test_space_mismatch(self):
        other = TFMatrix.identity(SignalSpace.make(a=2))
        with pytest.raises(SpaceMismatchError):
            loop_matrix() + other
        with pytest.raises(SpaceMismatchError):
            loop_matrix() @ other


class TestInverse:
    def test_identity(self):
        eye = TFMatrix.identity(SP)
        assert eye.inverse() == eye

    def test_unitriangular(self):
        m = TFMatrix(SP, SP, [[1, -G], [0, 1]])
        assert m.inverse() == TFMatrix(SP, SP, [[1, G], [0, 1]])

    def test_two_by_two_adjugate_example(self):
        m = TFMatrix(SP, SP, [[RatFun([F(-1, 2), 1]), RatFun(-1)], [RatFun(F(1, 2)), RatFun(1)]])
        zinv = RatFun(1, [0, 1])
        expected = TFMatrix(
            SP, SP,
            [[zinv, zinv], [RatFun(F(-1, 2), [0, 1]), RatFun([F(-1, 2), 1], [0, 1])]],
        )
        assert m.inverse() == expected

    def test_singular_detected(self):
        m = TFMatrix(SP, SP, [[1, 1], [1, 1]])
        with pytest.raises(SingularMatrixError):
            m.inverse()

    def test_matches_adjugate_oracle(self):
        rng = random.Random(11)
        sp = SignalSpace.make(a=1, b=1, c=1)
        for _ in range(8):
            m = TFMatrix(sp, sp, [[rand_ratfun(rng, 2) for _ in range(3)] for _ in range(3)])
            try:
                got = m.inverse()
            except SingularMatrixError:
                continue
            assert got == adjugate_inverse(m)

    @settings(max_examples=15)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_inverse_times_self_is_identity(self, seed):
        rng = random.Random(seed)
        dim = rng.randint(1, 4)
        sp = SignalSpace(tuple((f"s{i}", 1) for i in range(dim)))
        m = TFMatrix(sp, sp, [[rand_ratfun(rng, 3) for _ in range(dim)] for _ in range(dim)])
        try:
            inv = m.inverse()
        except SingularMatrixError:
            return
        eye = TFMatrix.identity(sp)
        assert m @ inv == eye
        assert inv @ m == eye


class TestClassify:
    def test_identity(self):
        cls = TFMatrix.identity(SP).classify()
        assert cls.all_proper and cls.in_rh_inf and not cls.all_strictly_proper

    def test_shifted_identity(self):
        cls = shift_identity(SP, -1).classify()
        assert cls.in_zinv_rh_inf

    def test_unstable_entry(self):
        m = TFMatrix(SignalSpace.make(x=1), SignalSpace.make(x=1), [[RatFun(1, [-2, 1])]])
        cls = m.classify()
        assert cls.all_proper and not cls.in_rh_inf


class TestEmbed:
    def test_single_channel(self):
        e = embed(SP, "u")
        assert e.entries == ((RatFun.zero(),), (RatFun.one(),))

    def test_whole_space(self):
        sp = SignalSpace.make(x=2)
        assert embed(sp, "x") == TFMatrix.identity(sp)
