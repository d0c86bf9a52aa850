import random
from math import factorial

import pytest

from linfty.coalgebra import (UNIT, SymMap, add_maps, conv_exp, conv_log, conv_power, convolve,
                              extend_coderivation, extend_morphism, extend_morphism_literal,
                              identity_map, map_from_taylor, projection_map, unit_map, vee, word_vec)
from linfty.library import random_taylor
from linfty.scalars import qq
from linfty.vec import first_difference, scale

from oracles import (coassoc_sides, coderivation_defect, counit_sides, morphism_defect,
                     plain_coproduct, twisted_coproduct)

N = 2


def all_words(S, wmax):
    return S.words_upto(wmax)


class TestCoproduct:
    def test_examples(self, mixed_space):
        S = mixed_space
        assert S.coproduct(UNIT) == (((), (), 1),)
        x = (0,)
        assert set(S.coproduct(x)) == {((), x, 1), (x, (), 1)}
        assert S.reduced_coproduct(x) == ()
        with pytest.raises(ValueError):
            S.reduced_coproduct(UNIT)

    def test_two_odd_factors(self, mixed_space):
        S = mixed_space
        a, d = S.index["a"], S.index["d"]  # both odd in L[1]
        terms = {(l, r): c for l, r, c in S.coproduct((a, d))}
        assert len(terms) == 4
        assert terms[((a,), (d,))] == 1
        assert terms[((d,), (a,))] == -1

    def test_repeated_even_factor(self, mixed_space):
        S = mixed_space
        b = S.index["b"]
        terms = {(l, r): c for l, r, c in S.coproduct((b, b))}
        assert terms[((b,), (b,))] == 2

    def test_reduced_weight_two(self, mixed_space):
        S = mixed_space
        w = (S.index["a"], S.index["b"])
        red = S.reduced_coproduct(w)
        assert len(red) == 2 and all(l and r for l, r, _ in red)
        # reduced coproduct applied again to the weight-one pieces vanishes
        assert all(S.reduced_coproduct(l) == () for l, _, _ in red)

    def test_laws_weight_5(self, mixed_space):
        S = mixed_space
        for w in all_words(S, 5):
            left, right = coassoc_sides(S, w)
            assert left == right, w
            assert twisted_coproduct(S, w) == plain_coproduct(S, w), w
            lc, rc = counit_sides(S, w)
            assert lc == {w: 1} and rc == {w: 1}, w


class TestProducts:
    def test_vee_graded_commutative(self, mixed_space):
        S = mixed_space
        for i in range(S.dim):
            for j in range(S.dim):
                u, v = word_vec((i,)), word_vec((j,))
                s = -1 if S.parity[i] and S.parity[j] else 1
                assert vee(S, u, v, N) == scale(vee(S, v, u, N), s)

    def test_projection_identity(self, mixed_space):
        S = mixed_space
        pr1 = projection_map(S, N, 1)
        for n in range(1, 5):
            lhs = projection_map(S, N, n)
            rhs = conv_power(pr1, n)
            for w in all_words(S, 5):
                assert first_difference(lhs.word(w), scale(rhs.word(w), qq(1, factorial(n)))) is None


def rand_map(S, deg, seed, arities=(0, 1, 2, 3), min_order=0):
    rng = random.Random(seed)
    data = random_taylor(S, S, deg, arities, rng, N, min_order, density=0.4)
    return map_from_taylor(S, S, data, deg, N)


class TestConvolution:
    def test_unit(self, mixed_space):
        S = mixed_space
        f = rand_map(S, 1, 1)
        u = unit_map(S, S, N)
        for w in all_words(S, 4):
            assert convolve(f, u).word(w) == f.word(w)
            assert convolve(u, f).word(w) == f.word(w)

    @pytest.mark.parametrize("seed", range(3))
    def test_associative(self, mixed_space, seed):
        S = mixed_space
        f, g, h = rand_map(S, 1, seed), rand_map(S, 0, seed + 10), rand_map(S, -1, seed + 20)
        a = convolve(convolve(f, g), h)
        b = convolve(f, convolve(g, h))
        for w in all_words(S, 4):
            assert first_difference(a.word(w), b.word(w)) is None, w

    @pytest.mark.parametrize("seed", range(3))
    def test_exp_log(self, mixed_space, seed):
        S = mixed_space
        f = rand_map(S, 0, seed, arities=(1, 2, 3))
        e = conv_exp(f, 5)
        back = conv_log(e, 5)
        for w in all_words(S, 5):
            if w:
                assert first_difference(back.word(w), f.word(w)) is None, w
            if len(w) == 1:
                assert e.word(w) == f.word(w)
        zero = map_from_taylor(S, S, {}, 0, N)
        z = conv_exp(zero, 3)
        assert z.word(UNIT) == word_vec(UNIT) and not z.word((0,))

    def test_exp_rejects_unit_term(self, mixed_space):
        f = rand_map(mixed_space, 0, 3, arities=(0,), min_order=0)
        f = add_maps(f, unit_map(mixed_space, mixed_space, N))
        with pytest.raises(ValueError):
            conv_exp(f, 3).word((0,))


class TestExtensions:
    def test_leibniz(self, mixed_space):
        S = mixed_space
        data = random_taylor(S, S, 1, (1,), random.Random(4), N, 0, density=0.6)
        D = extend_coderivation(map_from_taylor(S, S, data, 1, N))
        a, b = S.index["a"], S.index["b"]
        want = vee(S, data.get((a,), {}), word_vec((b,)), N)
        s = -1 if S.parity[a] else 1
        for key, c in vee(S, word_vec((a,)), data.get((b,), {}), N).items():
            want[key] = want.get(key, 0) + s * c
        want = {k: c for k, c in want.items() if c}
        assert D.word(tuple(sorted((a, b)))) == want

    def test_curvature_term(self, mixed_space):
        S = mixed_space
        c = {((S.index["b"],), 1, 0): qq(3)}
        D = extend_coderivation(map_from_taylor(S, S, {UNIT: c}, 1, N))
        assert D.word(UNIT) == c

    @pytest.mark.parametrize("seed", range(3))
    def test_coderivation_identity(self, mixed_space, seed):
        S = mixed_space
        t = rand_map(S, 1, seed)
        D = extend_coderivation(t)
        I = identity_map(S, N)
        for w in all_words(S, 4):
            assert coderivation_defect(D, I, w) == {}, w
            # D = taylor * id
            assert first_difference(D.word(w), convolve(t, I).word(w)) is None

    @pytest.mark.parametrize("seed", range(3))
    def test_coderivation_along_morphism(self, mixed_space, seed):
        S = mixed_space
        F = extend_morphism(rand_map(S, 0, seed + 5, arities=(1, 2)))
        t = rand_map(S, 1, seed)
        D = extend_coderivation(t, along=F)
        for w in all_words(S, 4):
            assert coderivation_defect(D, F, w) == {}, w

    @pytest.mark.parametrize("seed", range(3))
    def test_morphism_identities(self, mixed_space, seed):
        S = mixed_space
        t = rand_map(S, 0, seed, arities=(1, 2, 3))
        F = extend_morphism(t)
        lit = extend_morphism_literal(t)
        ex = conv_exp(t, 5)
        for w in all_words(S, 4):
            assert morphism_defect(F, w) == {}, w
            assert F.word(w) == lit.word(w), w
            assert first_difference(F.word(w), ex.word(w)) is None, w

    def test_strict_morphism(self, mixed_space):
        S = mixed_space
        data = random_taylor(S, S, 0, (1,), random.Random(8), N, 0, density=0.7)
        F = extend_morphism(map_from_taylor(S, S, data, 0, N))
        for w in all_words(S, 3):
            want = word_vec(UNIT)
            for i in w:
                want = vee(S, want, data.get((i,), {}), N)
            assert F.word(w) == want

    def test_weight_two(self, mixed_space):
        S = mixed_space
        t = rand_map(S, 0, 9, arities=(1, 2))
        F = extend_morphism(t)
        a, b = S.index["a"], S.index["c"]
        want = dict(t.word((a, b)))
        for key, c in vee(S, t.word((a,)), t.word((b,)), N).items():
            want[key] = want.get(key, 0) + c
        want = {k: c for k, c in want.items() if c}
        assert F.word((a, b)) == want

    def test_curved_morphism_factor(self, mixed_space):
        S = mixed_space
        alpha = {((S.index["b"],), 1, 0): qq(1)}
        t = rand_map(S, 0, 2, arities=(1, 2))
        curved = SymMap(S, S, lambda w: alpha if not w else t.word(w), 0, N)
        F = extend_morphism(curved)
        assert F.word(UNIT)[((), 0, 0)] == 1
        for w in all_words(S, 3):
            assert morphism_defect(F, w) == {}, w
        with pytest.raises(ValueError):
            extend_morphism(curved, curved=False)
        with pytest.raises(ValueError):
            extend_morphism_literal(curved).word((0,))
