"""(Curved) L-infinity algebras and morphisms given by Taylor coefficients.

A structure on L stores Q^1_n : Sym^n(L[1]) -> L[1] as a function on
canonical words of the shifted space.  Values are vectors of weight-one words.
"""

from dataclasses import dataclass, field

from .coalgebra import (
    UNIT,
    SymMap,
    compose as compose_maps,
    vee,
    extend_coderivation,
    extend_morphism,
    word_vec,
)
from .graded import GradedSpace, antisym_sign, shuffles, Permutation
from .linalg import invert_linear
from .scalars import Context, ONE
from .vec import add_to, apply_linear, first_difference, hbar_order, scale


@dataclass
class Report:
    ok: bool
    checked: int = 0
    witness: tuple = None
    residual: dict = field(default_factory=dict)
    name: str = ""
    detail: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def summary(self):
        if self.ok:
            return f"{self.name or 'check'}: pass ({self.checked} words)"
        return f"{self.name or 'check'}: FAIL at {self.witness}"


def _as_fn(taylor, max_arity=None):
    if callable(taylor):
        base = taylor
    else:
        data = dict(taylor)
        base = lambda w: data.get(w, {})  # noqa: E731
    if max_arity is None:
        return base
    return lambda w: base(w) if len(w) <= max_arity else {}


def scan_words(space, max_weight, residual_fn, name, labels=None, start=0):
    """Evaluate residual_fn on every word of weight start..max_weight; first failure wins."""
    checked = 0
    for n in range(start, max_weight + 1):
        for w in space.words(n):
            r = residual_fn(w)
            checked += 1
            if r:
                lab = tuple((labels or space.labels)[i] for i in w)
                return Report(False, checked, lab, r, name)
    return Report(True, checked, None, {}, name)


class LInftyStructure:
    """L-infinity structure on the graded space L (degrees unshifted).

    taylor: dict word -> vector (or a function of the word); words and values
    live in Sym(L[1]).  The unit word () carries the curvature Q_0(1).
    """

    def __init__(self, space, taylor, ctx=None, name=None, max_arity=None, check_filtration=True):
        if space.shift_by != 0:
            raise ValueError("give the unshifted space L")
        self.L = space
        self.S = space.shift(1)
        self.ctx = ctx or Context()
        self.N = self.ctx.N
        self.name = name or "Q"
        self.max_arity = max_arity
        self._taylor_src = taylor
        self.q1 = SymMap(self.S, self.S, _as_fn(taylor, max_arity), 1, self.N, self.name)
        self._Q = None
        curv = self.q1.word(UNIT)
        if curv and check_filtration and hbar_order(curv) < 1:
            raise ValueError("curvature must have hbar-order >= 1")

    @property
    def curvature(self):
        return self.q1.word(UNIT)

    @property
    def curved(self):
        return bool(self.curvature)

    @property
    def Q(self):
        if self._Q is None:
            self._Q = extend_coderivation(self.q1)
        return self._Q

    def taylor(self, n):
        """Dict word -> value for the arity-n coefficient."""
        out = {}
        for w in self.S.words(n):
            v = self.q1.word(w)
            if v:
                out[w] = v
        return out

    def taylor_upto(self, max_weight):
        out = {}
        for n in range(max_weight + 1):
            out.update(self.taylor(n))
        return out

    def __repr__(self):
        return f"LInftyStructure({self.name}, dim={self.L.dim})"


class LInftyMorphism:
    """L-infinity morphism given by F^1_n : Sym^n(L[1]) -> L'[1]; F_0 = alpha marks a curved morphism."""

    def __init__(self, source, target, taylor, ctx=None, name=None, max_arity=None):
        self.source = source
        self.target = target
        self.ctx = ctx or source.ctx
        self.N = self.ctx.N
        self.name = name or "F"
        self.max_arity = max_arity
        self.f1 = SymMap(source.S, target.S, _as_fn(taylor, max_arity), 0, self.N, self.name)
        self._F = None
        a = self.f1.word(UNIT)
        if a and hbar_order(a) < 1:
            raise ValueError("F_0 must have hbar-order >= 1")

    @property
    def alpha(self):
        return self.f1.word(UNIT)

    @property
    def curved(self):
        return bool(self.alpha)

    @property
    def F(self):
        if self._F is None:
            self._F = extend_morphism(self.f1)
        return self._F

    def taylor(self, n):
        out = {}
        for w in self.source.S.words(n):
            v = self.f1.word(w)
            if v:
                out[w] = v
        return out

    def taylor_upto(self, max_weight):
        out = {}
        for n in range(max_weight + 1):
            out.update(self.taylor(n))
        return out

    def __repr__(self):
        return f"LInftyMorphism({self.name}: {self.source.name} -> {self.target.name})"


# -- checks --------------------------------------------------------------


def check_linfty(Q, max_weight):
    """Q^1 o Q = 0 on all words of weight <= max_weight."""
    q1, QQ = Q.q1, Q.Q
    return scan_words(Q.S, max_weight, lambda w: q1(QQ.word(w)), f"linfty[{Q.name}]")


def check_linfty_oracle(Q, max_weight):
    """Brute force: the full coderivation square Q o Q vanishes."""
    QQ = Q.Q
    return scan_words(Q.S, max_weight, lambda w: QQ(QQ.word(w)), f"linfty-oracle[{Q.name}]")


def morphism_residual(F):
    src, tgt = F.source, F.target
    f1, FF = F.f1, F.F

    def res(w):
        r = tgt.q1(FF.word(w))
        add_to(r, f1(src.Q.word(w)), -ONE)
        return r

    return res


def check_morphism(F, max_weight):
    """Q'^1 o F = F^1 o Q on words of weight <= max_weight."""
    return scan_words(F.source.S, max_weight, morphism_residual(F), f"morphism[{F.name}]")


def check_morphism_oracle(F, max_weight):
    """Brute force at coalgebra level: Q' o F = F o Q."""
    src, tgt = F.source, F.target
    FF = F.F

    def res(w):
        r = tgt.Q(FF.word(w))
        add_to(r, FF(src.Q.word(w)), -ONE)
        return r

    return scan_words(src.S, max_weight, res, f"morphism-oracle[{F.name}]")


def taylor_difference(f, g, space, max_weight, start=0):
    """First word (weight start..max_weight) where two SymMaps differ, or None."""
    for n in range(start, max_weight + 1):
        for w in space.words(n):
            d = first_difference(f.word(w), g.word(w))
            if d is not None:
                return w, d
    return None


def same_structure(Q1, Q2, max_weight):
    return taylor_difference(Q1.q1, Q2.q1, Q1.S, max_weight) is None


def same_morphism(F, G, max_weight):
    return taylor_difference(F.f1, G.f1, F.source.S, max_weight) is None


# -- constructions -------------------------------------------------------


def zero_structure(space, ctx=None, name="0"):
    return LInftyStructure(space, {}, ctx, name)


def identity_morphism(Q, name="id"):
    return LInftyMorphism(Q, Q, lambda w: word_vec(w) if len(w) == 1 else {}, Q.ctx, name)


def strict_morphism(source, target, linear, name="f"):
    """Strict morphism from a linear map dict (i,) -> vector."""
    return LInftyMorphism(source, target, lambda w: linear.get(w, {}) if len(w) == 1 else {}, source.ctx, name)


def compose(G, F, name=None):
    """G o F; in the curved case (G o F)^1 = G^1 o F, so (G o F)_0 = G^1(exp alpha)."""
    if F.target.L != G.source.L:
        raise ValueError("morphisms are not composable")
    g1, FF = G.f1, F.F
    return LInftyMorphism(F.source, G.target, lambda w: g1(FF.word(w)), F.ctx, name or f"{G.name}.{F.name}")


def invert(F, name=None):
    """Inverse of a flat L-infinity morphism with invertible F_1.

    G_1 = F_1^{-1}; for n >= 2 the arity-n part of G^1 o F = pr forces
    G_n(u) = -sum_{i<n} G_i(F^i(G_1^{v n} u)).
    """
    if F.curved:
        raise ValueError("invert expects a flat morphism")
    src, tgt = F.source, F.target
    N = F.N
    lin = {}
    for i in range(src.L.dim):
        v = F.f1.word((i,))
        if v:
            lin[(i,)] = v
    # rows/cols must respect degrees: F_1 is degree preserving
    for (i,), v in lin.items():
        for (w, _, _) in v:
            if tgt.S.degrees[w[0]] != src.S.degrees[i]:
                raise ValueError("F_1 is not degree preserving")
    g1lin = invert_linear(lin, src.L.dim, tgt.L.dim, N)
    g1_strict = SymMap(tgt.S, src.S, lambda w: g1lin.get(w, {}) if len(w) == 1 else {}, 0, N)
    G1ext = extend_morphism(g1_strict)
    FF = F.F

    def g(w):
        n = len(w)
        if n == 0:
            return {}
        if n == 1:
            return g1lin.get(w, {})
        u = FF(G1ext.word(w))
        lower = {key: c for key, c in u.items() if 0 < len(key[0]) < n}
        return scale(apply_linear(gmap.word, lower, N), -1)

    gmap = SymMap(tgt.S, src.S, g, 0, N)
    return LInftyMorphism(tgt, src, gmap.word, F.ctx, name or f"{F.name}^-1")


def direct_sum(Q, Qp, prefixes=("a.", "b."), name=None):
    """Q-hat on L + L': pure words go to the summands, mixed words to 0.

    Returns (structure, (p, p'), (i, i')) with strict projections and inclusions.
    """
    if Q.curved or Qp.curved:
        raise ValueError("direct sums are formed from flat structures")
    L, Lp = Q.L, Qp.L
    basis = [(prefixes[0] + lab, d) for lab, d in L.basis()] + [(prefixes[1] + lab, d) for lab, d in Lp.basis()]
    Lh = GradedSpace(basis)
    into_a = [Lh.index[prefixes[0] + lab] for lab in L.labels]
    into_b = [Lh.index[prefixes[1] + lab] for lab in Lp.labels]
    back = {}
    for i, j in enumerate(into_a):
        back[j] = (0, i)
    for i, j in enumerate(into_b):
        back[j] = (1, i)

    def push(v, table):
        out = {}
        for (w, h, k), c in v.items():
            s, nw = Lh.shift(1).sort_word([table[i] for i in w])
            if s:
                add_to(out, {(nw, h, k): c}, s)
        return out

    def qh(w):
        if not w:
            return {}
        sides = {back[i][0] for i in w}
        if len(sides) != 1:
            return {}
        side = sides.pop()
        src = Q if side == 0 else Qp
        table = into_a if side == 0 else into_b
        s, sw = src.S.sort_word([back[i][1] for i in w])
        if not s:
            return {}
        return scale(push(src.q1.word(sw), table), s)

    Qh = LInftyStructure(Lh, qh, Q.ctx, name or f"{Q.name}+{Qp.name}")

    def proj(side, target):
        def fn(w):
            if len(w) != 1:
                return {}
            sd, i = back[w[0]]
            return word_vec((i,)) if sd == side else {}

        return LInftyMorphism(Qh, target, fn, Q.ctx, f"p{side}")

    def incl(source, table, tag):
        return LInftyMorphism(source, Qh, lambda w: word_vec((table[w[0]],)) if len(w) == 1 else {}, Q.ctx, tag)

    return Qh, (proj(0, Q), proj(1, Qp)), (incl(Q, into_a, "i0"), incl(Qp, into_b, "i1"))


def check_curvature_compat(F, Q0, Q0p, max_weight):
    """F_1(Q0) = Q0' and F_k(Q0 v w) = 0 for all words w of weight 1..max_weight-1."""
    src = F.source
    f1 = F.f1
    one = f1(Q0)
    d = first_difference(one, Q0p)
    if d is not None:
        return Report(False, 1, ("F_1(Q0)",), {d[0]: d[1] - d[2]}, "curvature-compat")
    checked = 1
    S = src.S
    for n in range(1, max_weight):
        for w in S.words(n):
            r = f1(_vee_word(S, Q0, w, F.N))
            checked += 1
            if r:
                return Report(False, checked, ("Q0",) + tuple(S.labels[i] for i in w), r, "curvature-compat")
    return Report(True, checked, None, {}, "curvature-compat")


def _vee_word(space, v, w, N):
    return vee(space, v, word_vec(w), N)


# -- antisymmetric (decalage) picture -----------------------------------


def decalage_sign(space_L, word):
    """Sign relating Q_n on a sorted word to l_n on the same ordered factors:
    (-1)^(sum_i (n-i) deg_L(x_i))."""
    n = len(word)
    e = sum((n - 1 - p) * space_L.degrees[i] for p, i in enumerate(word))
    return -1 if e & 1 else 1


def decalage(brackets, space_L, max_arity=None):
    """Antisymmetric brackets l_n (dict sorted word -> vector) to symmetric Q^1_n."""
    out = {}
    for w, v in brackets.items():
        if max_arity is not None and len(w) > max_arity:
            continue
        if v:
            out[w] = scale(v, decalage_sign(space_L, w))
    return out


def undecalage(taylor, space_L):
    """Inverse of decalage (the sign is an involution)."""
    return decalage(taylor, space_L)


def _antisym_sort(space_L, seq):
    """Sort factors for a graded antisymmetric map: (chi, word) or (0, None)."""
    seq = list(seq)
    n = len(seq)
    order = sorted(range(n), key=lambda p: (seq[p], p))
    w = tuple(seq[p] for p in order)
    for a, b in zip(w, w[1:]):
        if a == b and space_L.degrees[a] % 2 == 0:
            return 0, None
    # l(x_1..x_n) = chi(sigma) l(x_sigma(1)..x_sigma(n)) with sigma = order
    sigma = Permutation([p + 1 for p in order])
    degs = [space_L.degrees[i] for i in seq]
    return antisym_sign(sigma, degs), w


def lada_markl_residual(brackets, space_L, seq, N):
    """sum_{i+j=n+1} sum_{Sh(i,n-i)} chi(sigma)(-1)^{i(j-1)} l_j(l_i(..), ..) on basis factors seq."""
    n = len(seq)
    degs = [space_L.degrees[i] for i in seq]

    def ev(factors):
        s, w = _antisym_sort(space_L, factors)
        if not s:
            return {}
        return scale(brackets.get(w, {}), s)

    out = {}
    for i in range(1, n + 1):
        j = n + 1 - i
        for sigma in shuffles(i, n - i):
            chi = antisym_sign(sigma, degs)
            s = chi * (-1 if (i * (j - 1)) & 1 else 1)
            inner_f = [seq[sigma(p) - 1] for p in range(1, i + 1)]
            rest = [seq[sigma(p) - 1] for p in range(i + 1, n + 1)]
            inner = ev(inner_f)
            for (iw, h, k), c in inner.items():
                outer = ev([iw[0]] + rest)
                for (ow, h2, k2), c2 in outer.items():
                    if h + h2 <= N:
                        add_to(out, {(ow, h + h2, k + k2): c * c2}, s)
    return out


def check_antisym_linfty(brackets, space_L, max_weight, N):
    """Lada-Markl relations for antisymmetric brackets on sorted basis words."""
    checked = 0
    for n in range(1, max_weight + 1):
        for w in _antisym_words(space_L, n):
            r = lada_markl_residual(brackets, space_L, w, N)
            checked += 1
            if r:
                return Report(False, checked, tuple(space_L.labels[i] for i in w), r, "lada-markl")
    return Report(True, checked, None, {}, "lada-markl")


def _antisym_words(space_L, n):
    # antisymmetric words in L are symmetric words in L[1]
    return space_L.shift(1).words(n)


def transport_structure(Q, Psi, name=None):
    """Q' = Psi o Q o Psi^{-1} on the target space of Psi (flat, Psi_1 invertible)."""
    inv = invert(Psi)
    Pq = compose_maps(Psi.f1, compose_maps(Q.Q, inv.F))
    return LInftyStructure(Psi.target.L, Pq.word, Q.ctx, name or f"{Q.name}^Psi")
