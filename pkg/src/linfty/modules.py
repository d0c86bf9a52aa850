"""L-infinity modules over (curved) L-infinity algebras.

The comodule Sym(L[1]) (x) M has basis keys (w, j): a canonical word w of the
shifted space and a basis index j of M.  M-valued vectors are comodule
vectors supported on the unit word, i.e. keys ((), j).  All maps below are
SymMaps on these keys; phi^1 has degree 1 and module morphisms degree 0.
"""

from dataclasses import dataclass
from math import factorial

from .coalgebra import UNIT, SymMap, convolve, exp_vee, extend_morphism, vee, word_vec
from .dgla import DGLAData, from_dgla, gauge_series
from .graded import GradedSpace
from .homotopy import phi_t
from .mc import require_degree, require_filtered, twist_structure, verify_path
from .scalars import ONE, qq
from .structures import LInftyMorphism, Report, scan_words
from .vec import add_term, add_to, apply_linear, at_t, d_dt, hbar_order, integrate_t, scale, sub


def mvec(j, c=ONE):
    return {((UNIT, j), 0, 0): qq(c)} if c else {}


def key_degree(S, M, key):
    w, j = key
    return S.word_degree(w) + M.degrees[j]


def comod_keys(S, M, max_weight, start=0):
    for n in range(start, max_weight + 1):
        for w in S.words(n):
            for j in range(M.dim):
                yield (w, j)


def _tensor(S, wvec, j, N):
    """(sum c w) (x) m_j."""
    return {((w, j), h, k): c for (w, h, k), c in wvec.items() if h <= N}


def _left_mult(S, wvec, v, N):
    """u v (w' (x) m) = (u v w') (x) m for u in Sym(S), v a comodule vector."""
    out = {}
    for (u, h1, k1), c1 in wvec.items():
        for ((w, j), h2, k2), c2 in v.items():
            h = h1 + h2
            if h > N:
                continue
            s, m = S.merge(u, w)
            if s:
                add_term(out, ((m, j), h, k1 + k2), s * c1 * c2)
    return out


def hat(X, S, M, N, deg=None):
    """(id (x) X) o (Delta (x) id): the comodule map cogenerated by X.

    X(w, j) may be any comodule vector; the left coproduct factor is merged
    into its word with the Koszul sign (-1)^{|X||w1|}.
    """
    d = X.deg if deg is None else deg

    def fn(key):
        w, j = key
        out = {}
        for w1, w2, c in S.coproduct(w):
            v = X.word((w2, j))
            if not v:
                continue
            s = c
            if d & 1 and S.word_degree(w1) & 1:
                s = -s
            add_to(out, _left_mult(S, word_vec(w1), v, N), s)
        return out

    return SymMap((S, M), (S, M), fn, d, N, "hat")


def q_tensor_id(Q, M):
    QQ = Q.Q

    def fn(key):
        w, j = key
        return _tensor(Q.S, QQ.word(w), j, Q.N)

    return SymMap((Q.S, M), (Q.S, M), fn, 1, Q.N, "Q(x)id")


def proj_m(v):
    """pr_M: the part supported on the unit word."""
    return {key: c for key, c in v.items() if not key[0][0]}


def mcompose(f, g):
    return SymMap(g.src, f.tgt, lambda key: f(g.word(key)), f.deg + g.deg, max(f.N, g.N))


# -- the DGLA h_{M,L} ------------------------------------------------------


def hdiff(Q, X, M):
    """del X = -(-1)^{|X|} X o (Q (x) id)."""
    qt = q_tensor_id(Q, M)
    s = 1 if X.deg & 1 else -1
    return SymMap(X.src, X.tgt, lambda key: scale(X(qt.word(key)), s), X.deg + 1, X.N, "del")


def bullet(X, Y, S, M, N):
    """X . Y = X o (id (x) Y) o (Delta (x) id)."""
    Yh = hat(Y, S, M, N)
    return SymMap(X.src, X.tgt, lambda key: X(Yh.word(key)), X.deg + Y.deg, N, "bullet")


def hbracket(X, Y, S, M, N):
    s = -1 if (X.deg * Y.deg) & 1 else 1
    a, b = bullet(X, Y, S, M, N), bullet(Y, X, S, M, N)

    def fn(key):
        out = dict(a.word(key))
        add_to(out, b.word(key), -s)
        return out

    return SymMap(X.src, X.tgt, fn, X.deg + Y.deg, N, "[,]")


def hmap(Q, M, fn, deg, name=None):
    if isinstance(fn, SymMap):
        return fn
    if isinstance(fn, dict):
        data = fn
        fn = lambda key: data.get(key, {})  # noqa: E731
    return SymMap((Q.S, M), (Q.S, M), fn, deg, Q.N, name)


# -- modules -----------------------------------------------------------------


class LInftyModule:
    """phi^1_n : Sym^n(L[1]) (x) M -> M of degree 1 over the structure Q."""

    def __init__(self, Q, M, taylor, name="M"):
        self.Q = Q
        self.M = M
        self.S = Q.S
        self.N = Q.N
        self.name = name
        self.phi1 = hmap(Q, M, taylor, 1, name)
        self._hat = None

    @property
    def phihat(self):
        """Q (x) id + (id (x) phi^1) o (Delta (x) id)."""
        if self._hat is None:
            qt = q_tensor_id(self.Q, self.M)
            ph = hat(self.phi1, self.S, self.M, self.N)

            def fn(key):
                out = dict(qt.word(key))
                add_to(out, ph.word(key))
                return out

            self._hat = SymMap((self.S, self.M), (self.S, self.M), fn, 1, self.N, "phihat")
        return self._hat

    def phi0(self):
        """phi_0 as a table j -> M-vector."""
        return {j: self.phi1.word((UNIT, j)) for j in range(self.M.dim)}

    def keys(self, max_weight):
        return comod_keys(self.S, self.M, max_weight)


def _scan(mod_or_space, max_weight, res, name):
    S, M = mod_or_space
    checked = 0
    for key in comod_keys(S, M, max_weight):
        r = res(key)
        checked += 1
        if r:
            w, j = key
            return Report(False, checked, (tuple(S.labels[i] for i in w), M.labels[j]), r, name)
    return Report(True, checked, None, {}, name)


def check_module(mod, max_weight):
    """phi^1 o phihat = 0 on w (x) m, |w| <= max_weight."""
    p1, ph = mod.phi1, mod.phihat
    return _scan((mod.S, mod.M), max_weight, lambda key: p1(ph.word(key)), f"module[{mod.name}]")


def check_module_oracle(mod, max_weight):
    """phihat o phihat = 0 on the whole comodule."""
    ph = mod.phihat
    return _scan((mod.S, mod.M), max_weight, lambda key: ph(ph.word(key)), f"module-oracle[{mod.name}]")


def module_mc_residual(mod):
    """del phi + phi . phi in h_{M,L}."""
    d = hdiff(mod.Q, mod.phi1, mod.M)
    b = bullet(mod.phi1, mod.phi1, mod.S, mod.M, mod.N)
    return lambda key: add_to(dict(d.word(key)), b.word(key))


def check_module_mc(mod, max_weight):
    return _scan((mod.S, mod.M), max_weight, module_mc_residual(mod), f"module-mc[{mod.name}]")


def zero_module(Q, M, name="0"):
    return LInftyModule(Q, M, {}, name)


def dgla_module(Q, M, b, rho, name="M"):
    """DG module (M, b, rho) over the DGLA behind Q.

    b: {j: M-vector}, rho: {(i, j): M-vector} for basis i of g and j of M.
    phi_0 = -b and phi_1(gamma (x) m) = -(-1)^{|gamma|} rho(gamma) m, |gamma| in g[1].
    """
    S = Q.S
    taylor = {}
    for j, v in b.items():
        if v:
            taylor[(UNIT, j)] = scale(v, -1)
    for (i, j), v in rho.items():
        if v:
            s = 1 if S.degrees[i] & 1 else -1
            taylor[((i,), j)] = scale(v, s)
    mod = LInftyModule(Q, M, taylor, name)
    mod.b, mod.rho = b, rho
    return mod


def _vec_to_m(v):
    """Weight-one vector of a space -> M-vector with the same indices."""
    return {((UNIT, w[0]), h, k): c for (w, h, k), c in v.items()}


def adjoint_module(Q, name="ad"):
    """g acting on itself: b = d, rho(x) y = [x, y]."""
    data = Q.dgla
    g = data.g
    b = {j: _vec_to_m(data.dvec(word_vec((j,)))) for j in range(g.dim)}
    rho = {}
    for i in range(g.dim):
        for j in range(g.dim):
            v = data.bracket(word_vec((i,)), word_vec((j,)))
            if v:
                rho[(i, j)] = _vec_to_m(v)
    return dgla_module(Q, g, b, rho, name)


def end_module(Q, name="M"):
    """End(M) acting on M for a DGLA built by library.end_dgla."""
    data = Q.dgla
    M = data.module_space
    E = data.g
    b = {}
    for v_lab, img in data.module_diff.items():
        b[M.index[v_lab]] = {((UNIT, M.index[u]), 0, 0): qq(c) for u, c in img.items()}
    rho = {}
    for i, lab in enumerate(E.labels):
        u, v = lab.split("|")
        rho[(i, M.index[v])] = mvec(M.index[u])
    return dgla_module(Q, M, b, rho, name)


def morphism_module(F, name=None):
    """phi_k(gamma (x) m) = Q'^1(F(gamma) v m) on M = L'[1]."""
    Qp = F.target
    Sp = Qp.S
    FF, q1 = F.F, Qp.q1
    N = F.N

    def fn(key):
        w, j = key
        return _vec_to_m(q1(vee(Sp, FF.word(w), word_vec((j,)), N)))

    return LInftyModule(F.source, Sp, fn, name or f"{F.name}*{Qp.name}")


# -- modules as morphisms into End(M) --------------------------------------------


def _end_space(M):
    return GradedSpace([(f"{u}|{v}", du - dv) for u, du in zip(M.labels, M.degrees)
                        for v, dv in zip(M.labels, M.degrees)])


def end_structure(M, b_table, ctx, name="End(M)"):
    """(End(M), [B, -], commutator) with B = sum b(m_j) (x) m_j^*, b given by j -> M-vector."""
    from .library import end_dgla

    plain = end_dgla(M, {}, ctx, name)
    E = plain.g
    B = {}
    for j, v in b_table.items():
        for ((_, u), h, k), c in v.items():
            add_term(B, ((E.index[f"{M.labels[u]}|{M.labels[j]}"],), h, k), c)
    d = {}
    for i in range(E.dim):
        v = plain.bracket(B, word_vec((i,)))
        if v:
            d[(i,)] = v
    data = DGLAData(E, d, plain.br, None, ctx, name)
    data.module_space = M
    return from_dgla(data, name=name), B


def module_as_morphism(mod, name=None):
    """Phi_k(X)(m) = phi_k(X (x) m), read as a flat morphism L -> End(M).

    phi_0 becomes the differential [-phi_0, -] of the target, so the target
    is End(M) twisted by -phi_0.  The sign -(-1)^{|X|} matches the DGLA module
    convention phi_1(gamma (x) m) = -(-1)^{|gamma|} rho(gamma) m.
    """
    if mod.Q.curved:
        raise ValueError("module_as_morphism needs a flat base")
    M, S = mod.M, mod.S
    b = {j: scale(v, -1) for j, v in mod.phi0().items() if v}
    target, _ = end_structure(M, b, mod.Q.ctx, f"End({mod.name})")
    E = target.L
    p1 = mod.phi1

    def fn(w):
        if not w:
            return {}
        s = 1 if S.word_degree(w) & 1 else -1
        out = {}
        for j in range(M.dim):
            for ((_, u), h, k), c in p1.word((w, j)).items():
                add_term(out, ((E.index[f"{M.labels[u]}|{M.labels[j]}"],), h, k), s * c)
        return out

    F = LInftyMorphism(mod.Q, target, fn, mod.Q.ctx, name or f"adj[{mod.name}]")
    return F


def morphism_as_module(F, M, phi0, name="M"):
    """Inverse of module_as_morphism: phi_k(X (x) m) = -(-1)^{|X|} F_k(X)(m), phi_0 given."""
    S = F.source.S
    E = F.target.L
    f1 = F.f1
    split = [lab.split("|") for lab in E.labels]

    def fn(key):
        w, j = key
        if not w:
            return dict(phi0.get(j, {}))
        s = 1 if S.word_degree(w) & 1 else -1
        out = {}
        for ((e,), h, k), c in f1.word(w).items():
            u, v = split[e]
            if M.index[v] == j:
                add_term(out, ((UNIT, M.index[u]), h, k), s * c)
        return out

    return LInftyModule(F.source, M, fn, name)


# -- module morphisms ----------------------------------------------------------


class ModuleMorphism:
    """kappa^1_n : Sym^n(L[1]) (x) M -> N of degree 0 between modules over one base."""

    def __init__(self, source, target, taylor, name="kappa", deg=0):
        if source.Q is not target.Q and source.S != target.S:
            raise ValueError("modules over different bases")
        self.source = source
        self.target = target
        self.name = name
        self.N = source.N
        self.k1 = SymMap((source.S, source.M), (source.S, target.M),
                         taylor.word if isinstance(taylor, SymMap) else hmap(source.Q, source.M, taylor, deg).word,
                         deg, source.N, name)
        self._hat = None

    @property
    def hat(self):
        if self._hat is None:
            self._hat = hat(self.k1, self.source.S, self.target.M, self.N)
        return self._hat


def module_del(source, target, X):
    """del X = phi_N^1 o Xhat - (-1)^{|X|} X o phihat_M."""
    S, N = source.S, source.N
    Xh = hat(X, S, target.M, N)
    pn, pm = target.phi1, source.phihat
    s = 1 if X.deg & 1 else -1

    def fn(key):
        out = pn(Xh.word(key))
        add_to(out, X(pm.word(key)), s)
        return out

    return SymMap(X.src, X.tgt, fn, X.deg + 1, N, "del")


def check_module_morphism(kappa, max_weight):
    d = module_del(kappa.source, kappa.target, kappa.k1)
    return _scan((kappa.source.S, kappa.source.M), max_weight, d.word, f"module-morphism[{kappa.name}]")


def check_module_morphism_oracle(kappa, max_weight):
    """phihat_N o kappa-hat = kappa-hat o phihat_M on the comodule."""
    kh = kappa.hat
    pn, pm = kappa.target.phihat, kappa.source.phihat

    def res(key):
        return sub(pn(kh.word(key)), kh(pm.word(key)))

    return _scan((kappa.source.S, kappa.source.M), max_weight, res, f"module-morphism-oracle[{kappa.name}]")


def check_module_homotopy(k1, k2, h, max_weight):
    """kappa_2 = kappa_1 - del h for h of degree -1."""
    hm = h if isinstance(h, SymMap) else hmap(k1.source.Q, k1.source.M, h, -1)
    d = module_del(k1.source, k1.target, hm)

    def res(key):
        out = dict(k2.k1.word(key))
        add_to(out, k1.k1.word(key), -ONE)
        add_to(out, d.word(key))
        return out

    return _scan((k1.source.S, k1.source.M), max_weight, res, "module-homotopy")


def identity_module_morphism(mod, name="id"):
    return ModuleMorphism(mod, mod, lambda key: mvec(key[1]) if not key[0] else {}, name)


def perturbed_morphism(kappa, h, name=None):
    """kappa - del h: closed whenever kappa is, with nontrivial higher components."""
    hm = h if isinstance(h, SymMap) else hmap(kappa.source.Q, kappa.source.M, h, -1)
    d = module_del(kappa.source, kappa.target, hm)
    k = kappa.k1
    return ModuleMorphism(kappa.source, kappa.target, lambda key: sub(k.word(key), d.word(key)),
                          name or f"{kappa.name}-del h")


# -- gauge equivalent module structures ---------------------------------------------


def bullet_exp(h, S, M, N, max_weight):
    """e^h = sum h^{.n}/n! (h^{.0} = pr_M); h_0 must have hbar-order >= 1."""
    unit = SymMap(h.src, h.tgt, lambda key: mvec(key[1]) if not key[0] else {}, 0, N, "1")
    powers = [unit]
    for _ in range(max_weight + N):
        powers.append(bullet(h, powers[-1], S, M, N))

    def fn(key):
        out = {}
        for n in range(min(len(key[0]) + N, max_weight + N) + 1):
            add_to(out, powers[n].word(key), qq(1, factorial(n)))
        return out

    return SymMap(h.src, h.tgt, fn, 0, N, "e^h")


def module_gauge(mod, h, max_weight, name=None):
    """phi_1 = e^{ad h} phi_0 - ((e^{ad h} - 1)/ad h)(del h) and A_h = (id (x) e^h)(Delta (x) id).

    Returns (module phi_1, ModuleMorphism A_h : (M, phi_0) -> (M, phi_1)).
    """
    Q, M, S, N = mod.Q, mod.M, mod.S, mod.N
    hm = hmap(Q, M, h, 0)
    for j in range(M.dim):
        v = hm.word((UNIT, j))
        if v and hbar_order(v) < 1:
            raise ValueError("h_0 must have hbar-order >= 1")
    dh = hdiff(Q, hm, M)
    terms_a = [mod.phi1]
    terms_b = [dh]
    for _ in range(max_weight + N):
        terms_a.append(hbracket(hm, terms_a[-1], S, M, N))
        terms_b.append(hbracket(hm, terms_b[-1], S, M, N))

    def fn(key):
        out = {}
        for n in range(len(terms_a)):
            add_to(out, terms_a[n].word(key), qq(1, factorial(n)))
            add_to(out, terms_b[n].word(key), -qq(1, factorial(n + 1)))
        return out

    cache = {}
    for key in comod_keys(S, M, max_weight):
        v = fn(key)
        if v:
            cache[key] = v
    new = LInftyModule(Q, M, lambda key: cache.get(key, {}) if len(key[0]) <= max_weight else {},
                       name or f"{mod.name}^h")
    eh = bullet_exp(hm, S, M, N, max_weight)
    A = ModuleMorphism(mod, new, eh, "A_h")
    return new, A


# -- twisting and pullback ---------------------------------------------------------


def twist_module(mod, pi, base=None, name=None):
    """phi^pi(w (x) m) = phi((exp pi v w) (x) m) over Q^pi."""
    require_filtered(pi, "pi")
    require_degree(pi, mod.S, 0, "pi")
    S, N = mod.S, mod.N
    e = exp_vee(S, pi, N)
    p1 = mod.phi1
    Qpi = base or twist_structure(mod.Q, pi)

    def fn(key):
        w, j = key
        return p1(_tensor(S, vee(S, e, word_vec(w), N), j, N))

    return LInftyModule(Qpi, mod.M, fn, name or f"{mod.name}^pi")


def twist_module_morphism(kappa, pi, source=None, target=None, name=None):
    S, N = kappa.source.S, kappa.N
    e = exp_vee(S, pi, N)
    src = source or twist_module(kappa.source, pi)
    tgt = target or twist_module(kappa.target, pi, base=src.Q)
    k = kappa.k1

    def fn(key):
        w, j = key
        return k(_tensor(S, vee(S, e, word_vec(w), N), j, N))

    return ModuleMorphism(src, tgt, fn, name or f"{kappa.name}^pi")


def pullback_map(F, X, M):
    """F^* X = X o (F (x) id) for X in h_{M,L'} (any degree)."""
    S, N = F.source.S, F.N
    FF = F.F

    def fn(key):
        w, j = key
        return X(_tensor(S, FF.word(w), j, N))

    return SymMap((S, M), (S, M), fn, X.deg, N, "F*")


def pullback_module(F, mod, name=None):
    if F.curved:
        raise ValueError("pullback_module expects a flat morphism")
    return LInftyModule(F.source, mod.M, pullback_map(F, mod.phi1, mod.M), name or f"{F.name}*{mod.name}")


def pullback_module_morphism(F, kappa, source=None, target=None, name=None):
    src = source or pullback_module(F, kappa.source)
    tgt = target or pullback_module(F, kappa.target)
    return ModuleMorphism(src, tgt, pullback_map(F, kappa.k1, kappa.target.M), name or f"{F.name}*{kappa.name}")


# -- homotopic morphisms give homotopic pullbacks ------------------------------------


def gamma_map(wit):
    """Gamma = lambda * F(t), a coderivation along F(t)."""
    return convolve(wit.lam, extend_morphism(wit.F))


def check_gamma(wit, max_weight):
    """dF(t)/dt = Q' o Gamma + Gamma o Q on the coalgebra."""
    G = gamma_map(wit)
    Fext = extend_morphism(wit.F)
    Qs, Qt = wit.source.Q, wit.target.Q

    def res(w):
        out = d_dt(Fext.word(w))
        add_to(out, Qt(G.word(w)), -ONE)
        add_to(out, G(Qs.word(w)), -ONE)
        return out

    return scan_words(wit.source.S, max_weight, res, "gamma")


def gamma_pullback(wit, X, M):
    """Gamma^* X = (-1)^{|X|'} X o (Gamma (x) id), |X|' the degree in h[1]."""
    G = gamma_map(wit)
    S, N = wit.source.S, wit.source.N
    s = -1 if (X.deg - 1) & 1 else 1

    def fn(key):
        w, j = key
        return scale(X(_tensor(S, G.word(w), j, N)), s)

    return SymMap((S, M), (S, M), fn, X.deg - 1, N, "Gamma*")


def check_gamma_bullet(wit, X, Y, M, max_weight):
    """Gamma^*(X . Y) = Gamma^*X . F^*Y - (-1)^{|X|'} F^*X . Gamma^*Y."""
    S, N = wit.source.S, wit.source.N
    Ft = LInftyMorphism(wit.source, wit.target, wit.F.word, wit.source.ctx, "F(t)")
    lhs = gamma_pullback(wit, bullet(X, Y, wit.target.S, M, N), M)
    a = bullet(gamma_pullback(wit, X, M), pullback_map(Ft, Y, M), S, M, N)
    b = bullet(pullback_map(Ft, X, M), gamma_pullback(wit, Y, M), S, M, N)
    s = -1 if (X.deg - 1) & 1 else 1

    def res(key):
        out = dict(lhs.word(key))
        add_to(out, a.word(key), -ONE)
        add_to(out, b.word(key), s)
        return out

    return _scan((S, M), max_weight, res, "gamma-bullet")


# -- twisted module morphisms are homotopic ----------------------------------------------


def _lam_left(S, lam, N):
    """(lambda v .) on the comodule."""
    def fn(key):
        w, j = key
        return _left_mult(S, lam, {((w, j), 0, 0): ONE}, N)

    return fn


def pulled_twisted_module(mod, Phi, pi_t, base=None):
    """Phi_t^* phi^{pi(t)}: (w (x) m) -> phi((exp pi(t) v Phi_t(w)) (x) m), over Q."""
    tw = twist_module(mod, pi_t, base=Phi.target)
    return LInftyModule(base or mod.Q, mod.M, pullback_map(Phi.morphism(), tw.phi1, mod.M),
                        f"Phi*{mod.name}^pi")


def psi_t(mod, pulled, lam, max_weight):
    """Taylor data of Psi_t : (M, phi) -> (M, Phi_t^* phi^{pi(t)}).

    d Psi^1/dt = pulled^1 o (lambda v .) o Psi-hat, Psi_0^1 = pr_M; Picard
    iteration on the hbar-order.
    """
    S, M, N = mod.S, mod.M, mod.N
    lamf = _lam_left(S, lam, N)
    p1 = pulled.phi1
    base = {(UNIT, j): mvec(j) for j in range(M.dim)}
    keys = list(comod_keys(S, M, max_weight))
    tay = dict(base)
    for _ in range(N + 2):
        cur = tay
        Psi = SymMap((S, M), (S, M), lambda key: cur.get(key, {}), 0, N)
        Ph = hat(Psi, S, M, N)
        nxt = {}
        for key in keys:
            v = dict(base.get(key, {}))
            add_to(v, integrate_t(p1(apply_linear(lamf, Ph.word(key), N))))
            if v:
                nxt[key] = v
        if nxt == tay:
            break
        tay = nxt
    return ModuleMorphism(mod, pulled, lambda key: tay.get(key, {}), "Psi")


def invert_module_morphism(kappa, max_weight, name=None):
    """G with G o kappa = id for kappa_0 = id + O(hbar): G^1 = pr - G^1 o (kappa-hat - id)."""
    src, tgt = kappa.source, kappa.target
    S, M, N = src.S, src.M, src.N
    kh = kappa.hat
    keys = list(comod_keys(S, tgt.M, max_weight))
    base = {(UNIT, j): mvec(j) for j in range(M.dim)}
    for j in range(M.dim):
        v = sub(kappa.k1.word((UNIT, j)), mvec(j))
        if v and hbar_order(v) < 1:
            raise ValueError("kappa_0 must be the identity modulo hbar")
    tay = dict(base)
    for _ in range(N + 2):
        cur = tay
        G = SymMap((S, M), (S, M), lambda key: cur.get(key, {}), 0, N)
        nxt = {}
        for key in keys:
            diff = sub(kh.word(key), {((key[0], key[1]), 0, 0): ONE})
            v = dict(base.get(key, {}))
            add_to(v, G(diff), -ONE)
            if v:
                nxt[key] = v
        if nxt == tay:
            break
        tay = nxt
    return ModuleMorphism(tgt, src, lambda key: tay.get(key, {}), name or f"{kappa.name}^-1")


@dataclass
class ModuleHomotopyCertificate:
    kappa: object
    kappa_t: object
    h_t: object
    H: object
    endpoint: object
    Phi: object
    psi_M: object
    psi_N: object

    def verify(self, max_weight):
        """d kappa(t)/dt = del h(t) and kappa(1) = kappa - del(-H), both exact."""
        k = self.kappa
        src, tgt = k.source, k.target
        d = module_del(src, tgt, self.h_t)
        kt = self.kappa_t

        def ode(key):
            return sub(d_dt(kt.word(key)), d.word(key))

        rep = _scan((src.S, src.M), max_weight, ode, "module-twist-ode")
        if not rep.ok:
            return rep
        r2 = check_module_homotopy(k, self.endpoint, scale_map(self.H, -1), max_weight)
        r2.checked += rep.checked
        if r2.ok:
            r3 = check_module_morphism(self.endpoint, max_weight)
            if not r3.ok:
                return r3
        return r2


def scale_map(X, c):
    return SymMap(X.src, X.tgt, lambda key: scale(X.word(key), c), X.deg, X.N, X.name)


def _at_map(X, t, keys):
    tab = {}
    for key in keys:
        v = at_t(X.word(key), t)
        if v:
            tab[key] = v
    return tab


def module_morphism_twist_homotopy(kappa, pi_t, lam, max_weight):
    """Certificate for kappa ~ Psi_{N,1}^{-1} o (Phi_1^* kappa^pi) o Psi_{M,1}.

    kappa(t) = Psi_{N,t}^{-1} o (Phi_t^* kappa^{pi(t)}) o Psi_{M,t} satisfies
    d kappa/dt = del h(t) with
    h = G^1 o ((Phi_t^* kappa^{pi(t)}) o (lambda v .) - (lambda v .) o (Phi_t^* kappa^{pi(t)})) o Psi_M,
    G = Psi_{N,t}^{-1}; then kappa(1) = kappa + del H with H = int_0^1 h dt.
    lambda must be constant in t.
    """
    if any(key[2] for key in lam):
        raise ValueError("module_morphism_twist_homotopy needs a constant lambda")
    src, tgt = kappa.source, kappa.target
    Q = src.Q
    if Q.curved:
        raise ValueError("flat base required")
    if at_t(pi_t, 0):
        raise ValueError("the path must start at pi(0) = 0")
    if not verify_path(Q, pi_t, lam).ok:
        raise ValueError("(pi, lambda) is not a Maurer-Cartan path")
    S, N, W = src.S, src.N, max_weight
    Phi = phi_t(Q, pi_t, lam, W)
    PM = pulled_twisted_module(src, Phi, pi_t)
    PN = pulled_twisted_module(tgt, Phi, pi_t, base=PM.Q)
    psiM = psi_t(src, PM, lam, W)
    psiN = psi_t(tgt, PN, lam, W)
    G = invert_module_morphism(psiN, W)
    twk = twist_module_morphism(kappa, pi_t, source=twist_module(src, pi_t, base=Phi.target),
                                target=twist_module(tgt, pi_t, base=Phi.target))
    K = ModuleMorphism(PM, PN, pullback_map(Phi.morphism(), twk.k1, tgt.M), "Phi*kappa^pi")
    Kh = K.hat
    PsiMh = psiM.hat
    lamM = _lam_left(S, lam, N)
    lamN = _lam_left(S, lam, N)
    g1 = G.k1
    keys = list(comod_keys(S, src.M, W))

    def kt_fn(key):
        return g1(Kh(PsiMh.word(key)))

    def h_fn(key):
        a = PsiMh.word(key)
        v = Kh(apply_linear(lamM, a, N))
        add_to(v, apply_linear(lamN, Kh(a), N), -ONE)
        return g1(v)

    kt_tab = {key: v for key in keys if (v := kt_fn(key))}
    h_tab = {key: v for key in keys if (v := h_fn(key))}
    Ht = {key: integrate_t(v) for key, v in h_tab.items()}
    H = SymMap((S, src.M), (S, tgt.M), lambda key: at_t(Ht.get(key, {}), 1), -1, N, "H")
    kappa_t = SymMap((S, src.M), (S, tgt.M), lambda key: kt_tab.get(key, {}), 0, N, "kappa(t)")
    h_t = SymMap((S, src.M), (S, tgt.M), lambda key: h_tab.get(key, {}), -1, N, "h(t)")
    end_tab = _at_map(kappa_t, 1, keys)
    endpoint = ModuleMorphism(src, tgt, lambda key: end_tab.get(key, {}), f"{kappa.name}(1)")
    return ModuleHomotopyCertificate(kappa, kappa_t, h_t, H, endpoint, Phi, psiM, psiN)


def _rho_exp(mod, x, sign, N):
    """v -> e^{sign rho(x)} v on comodule vectors (acting on the M factor)."""
    def act(v):
        out = {}
        for ((w, j), h, k), c in v.items():
            for ((i,), h2, k2), c2 in x.items():
                if h + h2 > N:
                    continue
                img = mod.rho.get((i, j))
                if not img:
                    continue
                for ((_, jj), h3, k3), c3 in img.items():
                    if h + h2 + h3 <= N:
                        add_term(out, ((w, jj), h + h2 + h3, k + k2 + k3), sign * c * c2 * c3)
        return out

    def fn(v):
        out = dict(v)
        term = v
        n = 0
        while term:
            n += 1
            term = scale(act(term), qq(1, n))
            add_to(out, term)
        return out

    return fn


def dgla_module_twist_path(kappa, lam):
    """DGLA modules, constant lambda, A(t) = t lambda:

    kappa(t) = e^{-rho'(A)} o kappa^{pi(t),1} o (e^{[A, .]} (x) e^{rho(A)}),
    h(t) = e^{-rho'(A)} o kappa^{pi(t),1}(lambda v .) o (e^{[A, .]} (x) e^{rho(A)}),
    with pi(t) = exp([A(t), .]) acting on 0.  Returns (kappa(t), h(t)) as maps;
    both modules must come from dgla_module.
    """
    src, tgt = kappa.source, kappa.target
    Q = src.Q
    data = Q.dgla
    S, N = src.S, src.N
    if any(key[2] for key in lam):
        raise ValueError("constant lambda expected")
    A = {(w, h, k + 1): c for (w, h, k), c in lam.items()}
    pi_t = gauge_series(data, A, {})
    eM = _rho_exp(src, A, 1, N)
    eN = _rho_exp(tgt, A, -1, N)
    Eg = LInftyMorphism(Q, Q, lambda w: data.exp_ad(A, word_vec(w)) if len(w) == 1 else {}, Q.ctx).F
    e = exp_vee(S, pi_t, N)
    k = kappa.k1

    def inner(key):
        w, j = key
        v = {}
        for ((_, jj), h, kk), c in eM(mvec(j)).items():
            for (ww, hh, k2), c2 in Eg.word(w).items():
                if h + hh <= N:
                    add_term(v, ((ww, jj), h + hh, kk + k2), c * c2)
        return v

    def twisted(v, extra):
        out = {}
        for ((w, j), h, kk), c in v.items():
            u = vee(S, extra, vee(S, e, word_vec(w), N), N)
            add_to(out, {((ww, j), h + hh, kk + k2): c * c2 for (ww, hh, k2), c2 in u.items() if h + hh <= N})
        return k(out)

    one = word_vec(UNIT)
    kt = SymMap((S, src.M), (S, tgt.M), lambda key: eN(twisted(inner(key), one)), 0, N, "kappa_dgla(t)")
    ht = SymMap((S, src.M), (S, tgt.M), lambda key: eN(twisted(inner(key), lam)), -1, N, "h_dgla(t)")
    return kt, ht


def check_dgla_module_twist_path(kappa, lam, max_weight):
    """d kappa(t)/dt = del h(t) for the DGLA formulas, plus kappa(0) = kappa."""
    kt, ht = dgla_module_twist_path(kappa, lam)
    d = module_del(kappa.source, kappa.target, ht)
    k = kappa.k1

    def res(key):
        out = sub(d_dt(kt.word(key)), d.word(key))
        if not out:
            out = sub(at_t(kt.word(key), 0), k.word(key))
        return out

    return _scan((kappa.source.S, kappa.source.M), max_weight, res, "dgla-module-twist")


def dgla_module_twist_endpoint(kappa, lam):
    kt, _ = dgla_module_twist_path(kappa, lam)
    return ModuleMorphism(kappa.source, kappa.target, lambda key: at_t(kt.word(key), 1), "dgla-endpoint")
