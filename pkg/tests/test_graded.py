from itertools import permutations
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linfty.graded import (GradedSpace, Permutation, all_permutations, antisym_sign, koszul_sign,
                           multi_shuffles, shuffles)
from linfty.scalars import Context, Scalar, TScalar, fmt_q, qq, to_q


def bubble_sign(images, degrees):
    """Oracle: bubble sort the factor sequence, accumulating pairwise signs."""
    seq = [(images[p], degrees[images[p] - 1]) for p in range(len(images))]
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j][0] > seq[j + 1][0]:
                sign *= (-1) ** (seq[j][1] * seq[j + 1][1])
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
    return sign


class TestKoszul:
    def test_examples(self):
        assert koszul_sign((2, 1), [1, 1]) == -1
        assert koszul_sign((2, 1), [0, 1]) == 1
        assert koszul_sign((3, 1, 2), [1, 1, 1]) == 1

    @given(st.permutations(range(1, 6)), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
    def test_matches_bubble_sort(self, images, degrees):
        assert koszul_sign(images, degrees) == bubble_sign(list(images), degrees)

    @given(st.permutations(range(1, 6)), st.permutations(range(1, 6)),
           st.lists(st.integers(0, 3), min_size=5, max_size=5))
    def test_multiplicative(self, a, b, degrees):
        sa, sb = Permutation(a), Permutation(b)
        # eps(sa sb; d) = eps(sa; d) eps(sb; d transported along sa)
        moved = [degrees[sa(i) - 1] for i in range(1, 6)]
        assert koszul_sign(sa * sb, degrees) == koszul_sign(sa, degrees) * koszul_sign(sb, moved)

    @given(st.permutations(range(1, 6)))
    def test_even_degrees(self, images):
        sigma = Permutation(images)
        assert koszul_sign(sigma, [0, 2, 0, 4, 2]) == 1
        assert antisym_sign(sigma, [0, 2, 0, 4, 2]) == sigma.sign()

    def test_degree_count_mismatch(self):
        with pytest.raises(ValueError):
            koszul_sign((1, 2), [1])


class TestShuffles:
    def test_examples(self):
        assert len(list(shuffles(2, 2))) == 6
        assert list(shuffles(0, 3)) == [Permutation.identity(3)]
        assert list(shuffles(3, 0)) == [Permutation.identity(3)]
        got = {p.images for p in shuffles(1, 2)}
        assert got == {(1, 2, 3), (2, 1, 3), (3, 1, 2)}

    @pytest.mark.parametrize("k", range(0, 9))
    @pytest.mark.parametrize("m", range(0, 9))
    def test_counts(self, k, m):
        assert sum(1 for _ in shuffles(k, m)) == comb(k + m, k)

    def test_shuffle_predicate_oracle(self):
        for k in range(4):
            want = {p for p in permutations(range(1, 5))
                    if list(p[:k]) == sorted(p[:k]) and list(p[k:]) == sorted(p[k:])}
            assert {p.images for p in shuffles(k, 4 - k)} == want

    def test_multi(self):
        assert list(multi_shuffles([2])) == [Permutation.identity(2)]
        assert sum(1 for _ in multi_shuffles([1, 1, 1])) == 6
        assert sum(1 for _ in multi_shuffles([1, 1], dedup=True)) == 1

    def test_dedup_counts_set_partitions(self):
        # raw count / p! for equal blocks equals the number of unordered partitions
        for sizes in ([1, 1], [2, 2], [1, 1, 1], [2, 2, 2]):
            raw = sum(1 for _ in multi_shuffles(sizes))
            ded = sum(1 for _ in multi_shuffles(sizes, dedup=True))
            assert raw == ded * factorial(len(sizes))

    def test_bad_block(self):
        with pytest.raises(ValueError):
            list(multi_shuffles([0, 2]))

    def test_all_permutations(self):
        assert sum(1 for _ in all_permutations(4)) == 24


class TestSpace:
    def test_canonical_order_and_shift(self):
        V = GradedSpace([("z", 1), ("y", 0), ("x", 0)])
        assert V.labels == ("x", "y", "z")
        S = V.shift(1)
        assert S.degrees == (-1, -1, 0)
        assert S.unshifted() == V
        assert V.shift(1) is S

    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            GradedSpace([("x", 0), ("x", 1)])

    def test_words_skip_repeated_odd(self, mixed_space):
        S = mixed_space
        odd = [i for i in range(S.dim) if S.parity[i]]
        for w in S.words(3):
            assert all(not (w[j] == w[j + 1] and S.parity[w[j]]) for j in range(2))
        assert (odd[0], odd[0]) not in S.words(2)

    def test_sort_word(self, mixed_space):
        S = mixed_space
        o1, o2 = [i for i in range(S.dim) if S.parity[i]]
        assert S.sort_word((o2, o1)) == (-1, (o1, o2))
        assert S.sort_word((o1, o1))[0] == 0
        e = next(i for i in range(S.dim) if not S.parity[i])
        assert S.sort_word((o1, e)) == (1, tuple(sorted((o1, e))))

    def test_parse_word(self, mixed_space):
        # a and d are odd in L[1], b and c even
        s, w = mixed_space.parse_word(["d", "a"])
        assert s == -1 and mixed_space.word_labels(w) == ["a", "d"]
        assert mixed_space.parse_word(["c", "b"])[0] == 1
        with pytest.raises(ValueError):
            mixed_space.parse_word(["nope"])


rationals = st.fractions(max_denominator=7).map(lambda f: qq(f.numerator, f.denominator))
scalars3 = st.lists(rationals, min_size=4, max_size=4).map(lambda cs: Scalar(cs, 3))


class TestScalars:
    def test_to_q(self):
        assert to_q("3/6") == qq(1, 2)
        assert to_q(" -4 ") == qq(-4)
        assert fmt_q(qq(6, 3)) == "2"
        assert fmt_q(qq(-1, 3)) == "-1/3"
        for bad in ("", "1/0", True, 1.5):
            with pytest.raises((TypeError, ValueError)):
                to_q(bad)

    def test_context(self):
        with pytest.raises(ValueError):
            Context(-1, 2)

    @given(scalars3, scalars3, scalars3)
    def test_ring_laws(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a - a == Scalar([0], 3)

    @given(scalars3)
    def test_inverse(self, a):
        if not a.coeffs[0]:
            with pytest.raises(ZeroDivisionError):
                a.inverse()
        else:
            assert a * a.inverse() == 1

    def test_truncation(self):
        h = Scalar.hbar(3)
        assert (h * h * h * h) == 0
        assert (h * h).order() == 2
        assert Scalar([1, 2, 3, 4, 5, 6], 3).coeffs == (1, 2, 3, 4)
        # truncation is idempotent
        x = Scalar([1, 2, 3, 4, 5], 3)
        assert Scalar(x.coeffs, 3) == x

    def test_tscalar(self):
        p = TScalar({(0, 1): 1, (1, 2): 3}, 2)
        assert p.at(qq(1, 2)) == Scalar([qq(1, 2), qq(3, 4)], 2)
        assert p.derivative() == TScalar({(0, 0): 1, (1, 1): 6}, 2)
        q = p * p
        assert q.terms[(0, 2)] == 1 and (2, 4) in q.terms
