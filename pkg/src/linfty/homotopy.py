"""Convolution L-infinity algebra, homotopies of L-infinity morphisms, the
isomorphisms Phi_t between twisted structures and the tw_alpha calculus.

A convolution element is a SymMap Sym(L[1]) -> L'[1] with weight-one values
(its Taylor family).  Paths carry the formal variable t in the vectors.
"""

from dataclasses import dataclass
from math import factorial

from .coalgebra import (
    SymMap,
    convolve,
    exp_vee,
    extend_morphism,
    unit_map,
    vee,
    word_vec,
)
from .mc import (
    check_mc,
    require_degree,
    require_filtered,
    reconstruct_gauge,
    twist_morphism,
    twist_structure,
    verify_path,
)
from .scalars import ONE, qq
from .structures import (
    LInftyMorphism,
    Report,
    _as_fn,
    check_morphism,
    compose,
    invert,
    scan_words,
    strict_morphism,
)
from .vec import add_to, at_t, d_dt, hbar_order, integrate_t, scale, sub


def family(Qs, Qt, taylor, deg=0, name=None, max_arity=None):
    """A convolution element Sym(L[1]) -> L'[1] of the given degree."""
    if isinstance(taylor, SymMap):
        return taylor
    return SymMap(Qs.S, Qt.S, _as_fn(taylor, max_arity), deg, Qs.N, name)


def _materialize(fn, space, max_weight):
    out = {}
    for n in range(max_weight + 1):
        for w in space.words(n):
            v = fn(w)
            if v:
                out[w] = v
    return out


def _first_key(r):
    (w, h, k) = min(r, key=lambda key: (key[1], key[2], len(key[0]), key[0]))
    return h, k


# -- the convolution algebra ----------------------------------------------


class Convolution:
    """Evaluators for the convolution structure on Hom(Sym(L[1]), L').

    Q^_0 = (1 -> Q'_0(1)), Q^_1 F = Q'_1 o F - (-1)^{|F|} F o Q and
    Q^_n(F_1 v ... v F_n) = Q'_n o (F_1 * ... * F_n) for n >= 2.
    Nothing is materialized; everything is evaluated word by word.
    """

    def __init__(self, Q, Qp):
        for what, v in (("source", Q.curvature), ("target", Qp.curvature)):
            if v and hbar_order(v) < 1:
                raise ValueError(f"{what} curvature must have hbar-order >= 1")
        self.Q = Q
        self.Qp = Qp
        self.N = max(Q.N, Qp.N)

    def family(self, taylor, deg=0, name=None):
        return family(self.Q, self.Qp, taylor, deg, name)

    def q(self, fams):
        """Q^_n^1(F_1 v ... v F_n) as a SymMap."""
        Q, Qp = self.Q, self.Qp
        n = len(fams)
        if n == 0:
            curv = Qp.curvature
            return SymMap(Q.S, Qp.S, lambda w: dict(curv) if not w else {}, 1, self.N, "Qhat0")
        if n == 1:
            f = fams[0]
            sign = -1 if f.deg & 1 else 1
            qp1, QQ = Qp.q1, Q.Q

            def one(w):
                out = qp1(f.word(w))
                add_to(out, f(QQ.word(w)), -sign)
                return out

            return SymMap(Q.S, Qp.S, one, f.deg + 1, self.N, "Qhat1")
        prod = fams[0]
        for f in fams[1:]:
            prod = convolve(prod, f)
        qp1 = Qp.q1
        return SymMap(Q.S, Qp.S, lambda w: qp1(prod.word(w)), prod.deg + 1, self.N, f"Qhat{n}")

    def mc_residual(self, F):
        """sum_n 1/n! Q^_n(F^n) evaluated through literal convolution powers.

        For curved F (F(1) = alpha != 0) the powers do not vanish above the
        word length, but each extra factor costs one hbar, so n <= len(w) + N.
        """
        F = self.family(F)
        Q, Qp = self.Q, self.Qp
        N = self.N
        qp1, QQ = Qp.q1, Q.Q
        powers = [unit_map(Q.S, Qp.S, N)]

        def power(n):
            while len(powers) <= n:
                powers.append(convolve(F, powers[-1]))
            return powers[n]

        def res(w):
            acc = {}
            for n in range(len(w) + N + 1):
                add_to(acc, power(n).word(w), qq(1, factorial(n)))
            out = qp1(acc)
            add_to(out, F(QQ.word(w)), -ONE)
            return out

        return res

    def check_mc(self, F, max_weight):
        return scan_words(self.Q.S, max_weight, self.mc_residual(F), "convolution-mc")

    def homotopy_rhs(self, lam, F):
        """Q^^1(lambda v exp F) = Q'^1 o (lambda * exp_* F) + lambda o Q, for |lambda| = -1."""
        lam = self.family(lam, -1)
        Fext = extend_morphism(self.family(F))
        conv = convolve(lam, Fext)
        qp1, QQ = self.Qp.q1, self.Q.Q

        def rhs(w):
            out = qp1(conv.word(w))
            add_to(out, lam(QQ.word(w)))
            return out

        return rhs


def build_convolution(Q, Qp):
    return Convolution(Q, Qp)


# -- homotopies between morphisms -------------------------------------------


@dataclass
class HomotopyWitness:
    """F(t), lambda(t): families Sym(L[1]) -> L'[1] of degree 0 and -1, polynomial in t."""

    source: object
    target: object
    F: object
    lam: object
    name: str = "H"

    def __post_init__(self):
        self.F = family(self.source, self.target, self.F, 0)
        lam = self.lam
        if not isinstance(lam, SymMap):
            lam = family(self.source, self.target, lam, -1)
        elif lam.deg != -1:
            lam = SymMap(lam.src, lam.tgt, lam.word, -1, lam.N, lam.name)
        self.lam = lam

    def endpoint(self, t, name=None):
        f = self.F
        return LInftyMorphism(self.source, self.target, lambda w: at_t(f.word(w), t),
                              self.source.ctx, name or f"{self.name}({t})")

    def residual(self):
        conv = Convolution(self.source, self.target)
        rhs = conv.homotopy_rhs(self.lam, self.F)
        f = self.F
        return lambda w: sub(d_dt(f.word(w)), rhs(w))


def constant_witness(F):
    """F ~ F with lambda = 0."""
    return HomotopyWitness(F.source, F.target, F.f1.word, {}, f"const[{F.name}]")


def verify_homotopy(wit, max_weight, check_endpoints=True):
    """dF/dt = Q^^1(lambda v exp F) as an exact polynomial identity in t.

    The report's data holds the endpoints F(0), F(1) and, on failure, the
    first failing (arity, hbar-order, t-power).
    """
    rep = scan_words(wit.source.S, max_weight, wit.residual(), f"homotopy[{wit.name}]")
    F0, F1 = wit.endpoint(0), wit.endpoint(1)
    rep.data = {"F0": F0, "F1": F1}
    if not rep.ok:
        h, k = _first_key(rep.residual)
        rep.data["first_failure"] = (len(rep.witness), h, k)
        rep.detail = f"ODE residual at arity {len(rep.witness)}, hbar^{h}, t^{k}"
        return rep
    if check_endpoints:
        for F in (F0, F1):
            r = check_morphism(F, max_weight)
            if not r.ok:
                r.detail = f"endpoint {F.name} is not a morphism"
                r.data = rep.data
                return r
    return rep


def post_compose_homotopy(wit, H, name=None):
    """H o F(t) with generator H^1 o (lambda * exp_* F)."""
    lam = wit.lam
    h1 = H.f1

    def Ft(w):
        return h1(Fext.word(w))

    def lt(w):
        return h1(conv.word(w))

    Fext = extend_morphism(wit.F)
    conv = convolve(lam, Fext)
    return HomotopyWitness(wit.source, H.target, Ft, SymMap(wit.source.S, H.target.S, lt, -1, wit.source.N),
                           name or f"{H.name}.{wit.name}")


def pre_compose_homotopy(wit, H, name=None):
    """F(t) o H with generator lambda o H."""
    Hext = H.F
    f, lam = wit.F, wit.lam
    return HomotopyWitness(H.source, wit.target, lambda w: f(Hext.word(w)),
                           SymMap(H.source.S, wit.target.S, lambda w: lam(Hext.word(w)), -1, H.N),
                           name or f"{wit.name}.{H.name}")


def compose_homotopy(wit, H, side="post"):
    if side == "post":
        return post_compose_homotopy(wit, H)
    if side == "pre":
        return pre_compose_homotopy(wit, H)
    raise ValueError("side must be 'post' or 'pre'")


def pushforward_path(wit, pi):
    """For MC pi in the source: (F(t)^1(exp pi), lambda(t)^1(exp pi)) is a path in the target."""
    check = check_mc(wit.source, pi)
    if not check.ok:
        raise ValueError("pi is not Maurer-Cartan")
    e = exp_vee(wit.source.S, pi, wit.source.N)
    return wit.F(e), wit.lam(e)


def exact_gauge_witness(dgla_Q, alpha, name="exp(ad g)"):
    """For g = -d alpha: F(t) = e^{ad tg}, lambda(t) = e^{ad tg} o ad alpha, a path id ~ e^{ad g}."""
    data = dgla_Q.dgla
    require_filtered(alpha, "alpha")
    require_degree(alpha, data.g, -1, "alpha")
    g = scale(data.dvec(alpha), -1)
    tg = {(w, h, k + 1): x for (w, h, k), x in g.items()}

    def Ft(w):
        if len(w) != 1:
            return {}
        return data.exp_ad(tg, word_vec(w))

    def lt(w):
        if len(w) != 1:
            return {}
        return data.exp_ad(tg, data.bracket(alpha, word_vec(w)))

    return HomotopyWitness(dgla_Q, dgla_Q, Ft, lt, name), g


def exp_ad_morphism(Q, x, target=None, name="exp(ad)", data=None):
    """The strict morphism e^{[x, .]} of a DGLA-derived structure."""
    data = data or Q.dgla
    lin = {}
    for i in range(data.g.dim):
        v = data.exp_ad(x, word_vec((i,)))
        if v:
            lin[(i,)] = v
    return strict_morphism(Q, target or Q, lin, name)


# -- Phi_t ------------------------------------------------------------------


class PhiPath:
    """Phi_t : (L, Q^{pi(0)}) -> (L, Q^{pi(t)}), Taylor data symbolic in t up to max_weight."""

    def __init__(self, Q, pi_t, lam_t, taylor, max_weight, name="Phi"):
        self.Q = Q
        self.pi = pi_t
        self.lam = lam_t
        self.taylor = taylor
        self.W = max_weight
        self.name = name
        self.source = twist_structure(Q, at_t(pi_t, 0), f"{Q.name}^pi0")
        self.target = twist_structure(Q, pi_t, f"{Q.name}^pi(t)")
        self._morph = None

    def morphism(self):
        if self._morph is None:
            tay = self.taylor
            self._morph = LInftyMorphism(self.source, self.target, lambda w: tay.get(w, {}),
                                         self.Q.ctx, self.name, self.W)
        return self._morph

    def at(self, t):
        tay = {w: at_t(v, t) for w, v in self.taylor.items()}
        tgt = twist_structure(self.Q, at_t(self.pi, t), f"{self.Q.name}^pi({t})")
        return LInftyMorphism(self.source, tgt, {w: v for w, v in tay.items() if v},
                              self.Q.ctx, f"{self.name}({t})", self.W)


def phi_t(Q, pi_t, lam_t, max_weight, name="Phi"):
    """Solve d Phi^1(a)/dt = Q^1(exp pi(t) v lambda(t) v Phi_t(a)), Phi_0^1 = pr.

    The right-hand side sums (Q^{pi(t)})_{k+1}(lambda v Phi^k(a)) over k >= 1.
    Picard iteration on the Taylor data of weight <= max_weight; lambda has
    hbar-order >= 1 so every sweep fixes one more hbar-order.
    """
    require_filtered(lam_t, "lambda")
    require_degree(lam_t, Q.S, -1, "lambda")
    S, N = Q.S, Q.N
    lv = vee(S, lam_t, exp_vee(S, pi_t, N), N)
    base = {w: word_vec(w) for w in S.words(1)}
    taylor = dict(base)
    q1 = Q.q1
    for _ in range(N + 2):
        cur = taylor
        ext = extend_morphism(SymMap(S, S, lambda w: cur.get(w, {}) if len(w) <= max_weight else {}, 0, N))
        nxt = {}
        for n in range(1, max_weight + 1):
            for w in S.words(n):
                v = dict(base.get(w, {}))
                add_to(v, integrate_t(q1(vee(S, lv, ext.word(w), N))))
                if v:
                    nxt[w] = v
        if nxt == taylor:
            break
        taylor = nxt
    return PhiPath(Q, pi_t, lam_t, taylor, max_weight, name)


def check_phi(phi, max_weight, samples=(0, qq(1, 2), 1)):
    """Intertwining Phi_t o Q^{pi0} = Q^{pi(t)} o Phi_t, symbolically and at sample points."""
    rep = check_morphism(phi.morphism(), max_weight)
    if not rep.ok:
        rep.detail = "symbolic intertwining"
        return rep
    total = rep.checked
    for t in samples:
        r = check_morphism(phi.at(t), max_weight)
        total += r.checked
        if not r.ok:
            r.detail = f"intertwining at t={t}"
            return r
    return Report(True, total, None, {}, f"phi[{phi.name}]")


# -- twisted morphisms are homotopic to the original ---------------------------


@dataclass
class TwistedHomotopy:
    witness: HomotopyWitness
    phi: PhiPath
    phi_prime: PhiPath
    pi_prime: dict
    lam_prime: dict
    endpoint: LInftyMorphism


def twisted_morphism_homotopy(F, pi_t, lam_t, max_weight, name=None):
    """Witness for F ~ (Phi'_1)^{-1} o F^pi o Phi_1, where pi(t) joins 0 to pi = pi(1).

    pi'(t) = F^1(exp pi(t)), lambda'(t) = F^1(lambda v exp pi(t)); the path is
    F(t) = (Phi'_t)^{-1} o F^{pi(t)} o Phi_t with generator
    lambda_F = pr o (Phi'_t)^{-1} o ((-lambda' v .) o F^{pi(t)} + F^{pi(t)} o (lambda v .)) o Phi_t.
    The inverse of Phi'_t is taken symbolically in t (its hbar^0 part is the identity).
    """
    if F.curved:
        raise ValueError("twisted_morphism_homotopy expects a flat morphism")
    Q, Qp = F.source, F.target
    if at_t(pi_t, 0):
        raise ValueError("the path must start at pi(0) = 0")
    rep = verify_path(Q, pi_t, lam_t)
    if not rep.ok:
        raise ValueError("(pi, lambda) is not a Maurer-Cartan path")
    S, Sp, N = Q.S, Qp.S, Q.N
    W = max_weight
    e = exp_vee(S, pi_t, N)
    pip = F.f1(e)
    lamp = F.f1(vee(S, lam_t, e, N))
    Phi = phi_t(Q, pi_t, lam_t, W, "Phi")
    Phip = phi_t(Qp, pip, lamp, W, "Phi'")
    Fpi, _ = twist_morphism(F, pi_t, source=Phi.target, target=Phip.target)
    Ginv = invert(Phip.morphism(), "Phi'^-1")
    g1 = Ginv.f1
    PhiF, FpiF = Phi.morphism().F, Fpi.F

    def Ft(w):
        return g1(FpiF(PhiF.word(w)))

    def lt(w):
        a = PhiF.word(w)
        v = scale(vee(Sp, lamp, FpiF(a), N), -1)
        add_to(v, FpiF(vee(S, lam_t, a, N)))
        return g1(v)

    Ftab = _materialize(Ft, S, W)
    ltab = _materialize(lt, S, W)
    wit = HomotopyWitness(Q, Qp, Ftab, ltab, name or f"tw-homotopy[{F.name}]")
    return TwistedHomotopy(wit, Phi, Phip, pip, lamp, wit.endpoint(1, f"{F.name}(1)"))


def dgla_twisted_endpoint(F, pi_t, lam_t):
    """DGLA version of the endpoint: e^{-ad A'(1)} o F^pi o e^{ad A(1)}."""
    Q, Qp = F.source, F.target
    N = Q.N
    e = exp_vee(Q.S, pi_t, N)
    lamp = F.f1(vee(Q.S, lam_t, e, N))
    A1 = at_t(reconstruct_gauge(Q.dgla, lam_t), 1)
    Ap1 = at_t(reconstruct_gauge(Qp.dgla, lamp), 1)
    pi1 = at_t(pi_t, 1)
    Fpi, S = twist_morphism(F, pi1)
    right = exp_ad_morphism(Q, A1, Fpi.source, "e^A")
    left = exp_ad_morphism(Fpi.target, scale(Ap1, -1), Qp, "e^-A'", Qp.dgla)
    return compose(left, compose(Fpi, right))


# -- curved morphisms: the tw calculus -----------------------------------------


def tw(Q, alpha, name=None):
    """tw_alpha : (L, Q) ~> (L, Q^{-alpha}); F_0 = alpha, F_1 = id, F_n = 0 otherwise."""
    require_filtered(alpha, "alpha")
    require_degree(alpha, Q.S, 0, "alpha")
    a = dict(alpha)
    tgt = twist_structure(Q, scale(alpha, -1), f"{Q.name}^-a")

    def fn(w):
        if not w:
            return dict(a)
        if len(w) == 1:
            return word_vec(w)
        return {}

    return LInftyMorphism(Q, tgt, fn, Q.ctx, name or "tw")


def flat_part(F, name=None):
    """F~ : (L, Q) -> (L', Q'^alpha), the positive-arity part of a curved F."""
    alpha = F.alpha
    tgt = twist_structure(F.target, alpha, f"{F.target.name}^a") if alpha else F.target
    f1 = F.f1
    return LInftyMorphism(F.source, tgt, lambda w: f1.word(w) if w else {}, F.ctx, name or f"{F.name}~")


def decompose_curved(F):
    """(tw_alpha, F~) with F = tw_alpha o F~ (as Taylor data)."""
    Ft = flat_part(F)
    T = tw(Ft.target, F.alpha) if F.alpha else None
    return T, Ft


def curved_compose(G, F, name=None):
    """(G o F)^1 = G^1 o F, F = exp(alpha) v F~."""
    return compose(G, F, name)
