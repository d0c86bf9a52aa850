import random

import pytest

from linfty.coalgebra import UNIT
from linfty.dgla import from_dgla
from linfty.elements import element
from linfty.homotopy import exact_gauge_witness
from linfty.library import (end_dgla, random_vector, tensor_dgla, three_term_complex,
                            transported_structure)
from linfty.mc import integrate_homotopy
from linfty.modules import (ModuleMorphism, adjoint_module, bullet, check_dgla_module_twist_path,
                            check_gamma, check_gamma_bullet, check_module, check_module_homotopy,
                            check_module_mc, check_module_morphism, check_module_morphism_oracle,
                            check_module_oracle, comod_keys, dgla_module, dgla_module_twist_endpoint,
                            end_module, hdiff, hmap, identity_module_morphism, invert_module_morphism,
                            module_as_morphism, module_gauge, module_morphism_twist_homotopy,
                            morphism_as_module, morphism_module, mvec, perturbed_morphism,
                            pullback_map, pullback_module, twist_module, zero_module)
from linfty.scalars import Context, qq
from linfty.structures import LInftyMorphism, check_morphism, identity_morphism, invert
from linfty.vec import at_t, scale

CTX = Context(3, 3)
N = CTX.N


def random_hmap(mod, rng, deg, arity=1, density=0.4, min_order=0):
    """Random element of h_{M,L} of the given degree, arities <= arity."""
    out = {}
    for key in comod_keys(mod.S, mod.M, arity):
        w, j = key
        want = mod.S.word_degree(w) + mod.M.degrees[j] + deg
        for jj in range(mod.M.dim):
            if mod.M.degrees[jj] == want and rng.random() < density:
                h = rng.randint(max(min_order, 0 if w else 1), 2)
                out[key] = {(((), jj), h, 0): qq(rng.randint(-2, 2)) or qq(1)}
    return out


def same_map(f, g, S, M, W):
    return all(f.word(k) == g.word(k) for k in comod_keys(S, M, W))


@pytest.fixture(scope="module")
def end_mod():
    M, b = three_term_complex()
    Q = from_dgla(end_dgla(M, b, CTX, "End"))
    return Q, end_module(Q)


@pytest.fixture(scope="module")
def ad_mod():
    Q = from_dgla(tensor_dgla("sl2", "eps", CTX))
    return Q, adjoint_module(Q)


class TestModules:
    @pytest.mark.parametrize("which", ["end", "ad"])
    def test_dgla_modules(self, which, end_mod, ad_mod):
        _, mod = end_mod if which == "end" else ad_mod
        assert check_module(mod, 3).ok
        assert check_module_oracle(mod, 3).ok
        assert check_module_mc(mod, 3).ok

    def test_dgla_module_signs(self, end_mod):
        Q, mod = end_mod
        M = mod.M
        m0, m1 = M.index["m0"], M.index["m1"]
        assert mod.phi1.word((UNIT, m0)) == scale(mvec(m1), -1)
        e = Q.S.index["m1|m0"]  # degree 1 in End, even in the shift
        assert mod.phi1.word(((e,), m0)) == scale(mvec(m1), -1)
        f = Q.S.index["m0|m0"]  # degree 0, odd in the shift
        assert mod.phi1.word(((f,), m0)) == mvec(m0)

    def test_zero_and_morphism_modules(self, ad_mod):
        Q, _ = ad_mod
        assert check_module(zero_module(Q, Q.L), 3).ok
        Qt, Psi = transported_structure(Q, random.Random(2))
        F = LInftyMorphism(Q, Qt, Psi.f1.word, CTX, "Psi")
        mm = morphism_module(F)
        assert check_module(mm, 2).ok and check_module_oracle(mm, 2).ok

    def test_corrupted_module(self, end_mod):
        Q, mod = end_mod
        rho = dict(mod.rho)
        key = sorted(rho)[0]
        rho[key] = scale(rho[key], -1)
        bad = dgla_module(Q, mod.M, mod.b, rho, "bad")
        assert not check_module(bad, 2).ok
        assert not check_module_oracle(bad, 2).ok
        assert not check_module_mc(bad, 2).ok
        assert not check_morphism(module_as_morphism(bad), 2).ok

    @pytest.mark.parametrize("which", ["end", "ad"])
    def test_adjunction(self, which, end_mod, ad_mod):
        _, mod = end_mod if which == "end" else ad_mod
        F = module_as_morphism(mod)
        assert check_morphism(F, 3).ok
        back = morphism_as_module(F, mod.M, mod.phi0())
        assert same_map(back.phi1, mod.phi1, mod.S, mod.M, 3)

    def test_twist(self, ad_mod):
        Q, mod = ad_mod
        assert same_map(twist_module(mod, {}).phi1, mod.phi1, mod.S, mod.M, 3)
        rng = random.Random(4)
        pi = at_t(integrate_homotopy(Q, {}, random_vector(Q.S, -1, rng, N)), 1)
        assert check_module(twist_module(mod, pi), 3).ok


class TestGauge:
    @pytest.mark.parametrize("seed", range(3))
    def test_A_h(self, seed, ad_mod):
        _, mod = ad_mod
        h = random_hmap(mod, random.Random(seed), 0)
        new, A = module_gauge(mod, h, 3)
        assert check_module(new, 3).ok
        assert check_module_morphism(A, 3).ok
        # A_h o phihat_0 = phihat_1 o A_h on the whole comodule
        assert check_module_morphism_oracle(A, 3).ok
        G = invert_module_morphism(A, 3)
        assert check_module_morphism(G, 3).ok

    def test_rejects_unfiltered_h(self, ad_mod):
        _, mod = ad_mod
        j = mod.M.indices_of_degree(0)[0]
        with pytest.raises(ValueError):
            module_gauge(mod, {(UNIT, j): mvec(j)}, 2)


class TestMorphisms:
    def test_homotopy(self, ad_mod):
        _, mod = ad_mod
        k = identity_module_morphism(mod)
        h = random_hmap(mod, random.Random(1), -1)
        kp = perturbed_morphism(k, h)
        assert check_module_morphism(kp, 3).ok
        assert check_module_morphism_oracle(kp, 3).ok
        assert check_module_homotopy(k, kp, h, 3).ok
        assert check_module_homotopy(k, k, {}, 3).ok
        assert not check_module_homotopy(k, kp, {key: scale(v, 2) for key, v in h.items()}, 3).ok

    def test_chain_map(self, end_mod):
        Q, mod = end_mod
        # kappa_0 = id is a chain map; so is -id
        neg = ModuleMorphism(mod, mod, lambda key: scale(mvec(key[1]), -1) if not key[0] else {})
        assert check_module_morphism(neg, 3).ok
        skew = ModuleMorphism(mod, mod, lambda key: mvec(key[1], 1 + key[1]) if not key[0] else {})
        assert not check_module_morphism(skew, 3).ok

    def test_inverse(self, ad_mod):
        _, mod = ad_mod
        h = random_hmap(mod, random.Random(5), -1, min_order=1)
        kp = perturbed_morphism(identity_module_morphism(mod), h)
        G = invert_module_morphism(kp, 3)
        for key in comod_keys(mod.S, mod.M, 3):
            want = mvec(key[1]) if not key[0] else {}
            assert G.k1(kp.hat.word(key)) == want


class TestPullback:
    def test_identity(self, ad_mod):
        Q, mod = ad_mod
        pb = pullback_module(identity_morphism(Q), mod)
        assert same_map(pb.phi1, mod.phi1, mod.S, mod.M, 3)

    def test_dgla_morphism(self, ad_mod):
        Q, mod = ad_mod
        Qt, Psi = transported_structure(Q, random.Random(3))
        F = LInftyMorphism(Qt, Q, invert(LInftyMorphism(Q, Qt, Psi.f1.word, CTX)).f1.word, CTX, "F")
        assert check_morphism(F, 3).ok
        pb = pullback_module(F, mod)
        assert check_module(pb, 3).ok
        X = random_hmap(mod, random.Random(8), 1)
        Y = random_hmap(mod, random.Random(9), 0)
        Xm, Ym = hmap(Q, mod.M, X, 1), hmap(Q, mod.M, Y, 0)
        lhs = pullback_map(F, bullet(Xm, Ym, Q.S, mod.M, N), mod.M)
        rhs = bullet(pullback_map(F, Xm, mod.M), pullback_map(F, Ym, mod.M), Qt.S, mod.M, N)
        assert same_map(lhs, rhs, Qt.S, mod.M, 3)
        lhs = pullback_map(F, hdiff(Q, Xm, mod.M), mod.M)
        rhs = hdiff(Qt, pullback_map(F, Xm, mod.M), mod.M)
        assert same_map(lhs, rhs, Qt.S, mod.M, 3)


class TestGamma:
    def test_gamma_transport(self, end_mod):
        Q, mod = end_mod
        E = Q.dgla
        wit, _ = exact_gauge_witness(Q, element(E.g, {"m0|m1": [0, 1], "n0|m1": [0, 2, 1]}, N))
        assert check_gamma(wit, 3).ok
        X = mod.phi1
        assert check_gamma_bullet(wit, X, X, mod.M, 2).ok
        Y = hmap(Q, mod.M, random_hmap(mod, random.Random(2), 0), 0)
        assert check_gamma_bullet(wit, X, Y, mod.M, 2).ok


@pytest.fixture(scope="module")
def setup():
    rng = random.Random(4)
    Q = from_dgla(tensor_dgla("b2", "cone", CTX))
    ad = adjoint_module(Q)
    lam = random_vector(Q.S, -1, rng, N)
    pi_t = integrate_homotopy(Q, {}, lam)
    h = random_hmap(ad, rng, -1)
    kp = perturbed_morphism(identity_module_morphism(ad), h)
    return Q, ad, lam, pi_t, kp


class TestTwistHomotopy:
    def test_certificate(self, setup):
        Q, ad, lam, pi_t, kp = setup
        assert check_module_morphism(kp, 2).ok
        cert = module_morphism_twist_homotopy(kp, pi_t, lam, 2)
        assert cert.verify(2).ok
        de = dgla_module_twist_endpoint(kp, lam)
        assert same_map(de.k1, cert.endpoint.k1, ad.S, ad.M, 2)
        assert check_dgla_module_twist_path(kp, lam, 2).ok

    def test_trivial_path(self, setup):
        Q, ad, _, _, kp = setup
        cert = module_morphism_twist_homotopy(kp, {}, {}, 2)
        assert cert.verify(2).ok
        assert same_map(cert.endpoint.k1, kp.k1, ad.S, ad.M, 2)

    def test_rejects_time_dependent_lambda(self, setup):
        Q, ad, lam, pi_t, kp = setup
        lam_t = {(w, h, 1): c for (w, h, _), c in lam.items()}
        with pytest.raises(ValueError):
            module_morphism_twist_homotopy(kp, pi_t, lam_t, 2)
        with pytest.raises(ValueError):
            dgla_module_twist_endpoint(kp, lam_t)
