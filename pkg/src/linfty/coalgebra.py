"""The symmetric coalgebra Sym(V) with the shuffle coproduct, and the
convolution calculus on maps Sym(V) -> Sym(V').

Maps are Q[hbar,t]-linear and given on canonical words; values are sparse
vectors keyed by target words (see vec.py).  A Taylor coefficient is simply a
map whose values are weight-one words.
"""

from math import factorial

from .graded import multi_shuffles
from .scalars import ONE, ZERO, qq
from .vec import add_term, add_to, apply_linear, scale

UNIT = ()


class SymMap:
    """A linear map Sym(src) -> Sym(tgt) of a fixed degree, evaluated lazily on words."""

    def __init__(self, src, tgt, fn, deg=0, N=0, name=None):
        self.src = src
        self.tgt = tgt
        self._fn = fn
        self.deg = deg
        self.N = N
        self.name = name
        self._cache = {}

    def word(self, w):
        r = self._cache.get(w)
        if r is None:
            r = self._fn(w)
            self._cache[w] = r
        return r

    def __call__(self, v):
        return apply_linear(self.word, v, self.N)

    def __repr__(self):
        return f"SymMap({self.name or '?'}, deg={self.deg})"


def word_vec(w, c=ONE):
    return {(w, 0, 0): qq(c)} if c else {}


def vee(space, u, v, N):
    """Graded-commutative product in Sym(space), truncated at hbar^(N+1)."""
    out = {}
    merge = space.merge
    for (w1, h1, k1), c1 in u.items():
        for (w2, h2, k2), c2 in v.items():
            h = h1 + h2
            if h > N:
                continue
            s, w = merge(w1, w2)
            if s:
                add_term(out, (w, h, k1 + k2), s * c1 * c2)
    return out


def vee_power(space, v, n, N):
    out = word_vec(UNIT)
    for _ in range(n):
        out = vee(space, out, v, N)
    return out


def exp_vee(space, v, N, max_weight=None):
    """exp(v) = sum v^n / n! for v of hbar-order >= 1 (terminates mod hbar^(N+1))."""
    out = word_vec(UNIT)
    term = word_vec(UNIT)
    n = 0
    while True:
        n += 1
        if max_weight is not None and n > max_weight:
            break
        term = scale(vee(space, term, v, N), qq(1, n))
        if not term:
            break
        add_to(out, term)
    return out


def weight_part(v, n):
    return {key: c for key, c in v.items() if len(key[0]) == n}


def map_from_taylor(src, tgt, data, deg=0, N=0, name=None):
    """SymMap defined by a dict word -> vector (missing words map to 0)."""
    return SymMap(src, tgt, lambda w: data.get(w, {}), deg, N, name)


def unit_map(src, tgt, N):
    """1 epsilon: the counit followed by the unit."""
    return SymMap(src, tgt, lambda w: word_vec(UNIT) if not w else {}, 0, N, "1eps")


def identity_map(space, N):
    return SymMap(space, space, lambda w: word_vec(w), 0, N, "id")


def projection_map(space, N, j=1):
    """pr onto Sym^j."""
    return SymMap(space, space, lambda w: word_vec(w) if len(w) == j else {}, 0, N, f"pr{j}")


def projection_upto(space, N, j):
    return SymMap(space, space, lambda w: word_vec(w) if 0 < len(w) <= j else {}, 0, N, f"pr<={j}")


def compose(f, g):
    """f o g."""
    return SymMap(g.src, f.tgt, lambda w: f(g.word(w)), f.deg + g.deg, max(f.N, g.N))


def add_maps(*fs, coeffs=None):
    coeffs = coeffs or [ONE] * len(fs)

    def fn(w):
        out = {}
        for f, c in zip(fs, coeffs):
            add_to(out, f.word(w), c)
        return out

    return SymMap(fs[0].src, fs[0].tgt, fn, fs[0].deg, fs[0].N)


def tensor_sign(g_deg, w1_deg):
    """(phi (x) psi)(a (x) b) = (-1)^(|psi||a|) phi(a) (x) psi(b)."""
    return -1 if (g_deg * w1_deg) & 1 else 1


def convolve(f, g):
    """f * g = mu o (f (x) g) o Delta, the product in the target being v."""
    src, tgt = f.src, f.tgt
    N = max(f.N, g.N)
    gd = g.deg

    def fn(w):
        out = {}
        for w1, w2, c in src.coproduct(w):
            a = f.word(w1)
            if not a:
                continue
            b = g.word(w2)
            if not b:
                continue
            s = c * tensor_sign(gd, src.word_degree(w1))
            add_to(out, vee(tgt, a, b, N), s)
        return out

    return SymMap(src, tgt, fn, f.deg + g.deg, N)


def conv_power(f, n):
    p = unit_map(f.src, f.tgt, f.N)
    for _ in range(n):
        p = convolve(f, p)
    return p


def conv_exp(f, max_weight):
    """exp_*(f) = sum_n f^{*n}/n!, for f vanishing on the unit word.

    f^{*n} vanishes below weight n, so on words of weight <= max_weight the
    series stops at n = max_weight.
    """
    powers = [unit_map(f.src, f.tgt, f.N)]
    for _ in range(max_weight):
        powers.append(convolve(f, powers[-1]))

    def fn(w):
        if f.word(UNIT):
            raise ValueError("conv_exp needs f(1) = 0")
        out = {}
        for n in range(len(w) + 1):
            add_to(out, powers[n].word(w), qq(1, factorial(n)))
        return out

    return SymMap(f.src, f.tgt, fn, 0, f.N, "exp*")


def conv_log(g, max_weight):
    """log_*(1 eps + phi) = sum_n (-1)^(n-1)/n phi^{*n}."""
    unit = unit_map(g.src, g.tgt, g.N)

    def phi_fn(w):
        v = dict(g.word(w))
        if not w:
            c = v.get((UNIT, 0, 0), ZERO)
            if c != 1 or len(v) != 1:
                raise ValueError("conv_log needs g(1) = 1")
            return {}
        return v

    phi = SymMap(g.src, g.tgt, phi_fn, g.deg, g.N)
    powers = [unit]
    for _ in range(max_weight):
        powers.append(convolve(phi, powers[-1]))

    def fn(w):
        out = {}
        for n in range(1, len(w) + 1):
            add_to(out, powers[n].word(w), qq((-1) ** (n - 1), n))
        return out

    return SymMap(g.src, g.tgt, fn, g.deg, g.N, "log*")


def extend_coderivation(taylor, along=None):
    """Coderivation D = D^1 * Phi with cogenerator part `taylor` (a SymMap into
    weight-one words), along the coalgebra morphism `along` (identity if None).

    D(x_1 ... x_n) = sum_k sum_{Sh(k,n-k)} eps D_k(x_s1..x_sk) v Phi(rest);
    the k = 0 term carries the curvature D_0(1).
    """
    src, tgt = taylor.src, taylor.tgt
    N = taylor.N
    phi = along

    def fn(w):
        out = {}
        for w1, w2, c in src.coproduct(w):
            a = taylor.word(w1)
            if not a:
                continue
            b = phi.word(w2) if phi is not None else word_vec(w2)
            if not b:
                continue
            add_to(out, vee(tgt, a, b, N), c)
        return out

    return SymMap(src, tgt, fn, taylor.deg, N, "coder")


def extend_morphism(taylor, curved=None):
    """Coalgebra morphism F = exp_*(F^1) from its Taylor coefficients.

    Fast path: F(w) = sum over blocks S containing the first factor of
    eps F^1(w_S) v F(w_rest).  A nonzero F_0^1(1) = alpha gives
    F = exp(alpha) v F~, with F~ the extension of the positive arities.
    """
    src, tgt = taylor.src, taylor.tgt
    N = taylor.N
    alpha = taylor.word(UNIT)
    if alpha and curved is False:
        raise ValueError("nonzero F_0 in flat mode")

    memo = {}

    def tilde(w):
        r = memo.get(w)
        if r is not None:
            return r
        if not w:
            r = word_vec(UNIT)
        else:
            r = {}
            for w1, w2, c in src.first_splits(w):
                a = taylor.word(w1)
                if not a:
                    continue
                b = tilde(w2)
                if not b:
                    continue
                add_to(r, vee(tgt, a, b, N), c)
        memo[w] = r
        return r

    if not alpha:
        return SymMap(src, tgt, tilde, 0, N, "morph")
    ea = exp_vee(tgt, alpha, N)
    return SymMap(src, tgt, lambda w: vee(tgt, ea, tilde(w), N), 0, N, "curved-morph")


def extend_morphism_literal(taylor):
    """Oracle for extend_morphism: the multi-shuffle formula with eps(sigma)/p!.

    F(x_1..x_n) = sum_p sum_{k_1+..+k_p=n} sum_{sigma in Sh(k_1..k_p)}
                  eps(sigma)/p! F_{k_1}(..) v ... v F_{k_p}(..)
    Only flat Taylor data (F_0 = 0) is accepted.
    """
    src, tgt = taylor.src, taylor.tgt
    N = taylor.N
    if taylor.word(UNIT):
        raise ValueError("literal formula is for flat morphisms")

    def compositions(n):
        if n == 0:
            yield []
            return
        for first in range(1, n + 1):
            for rest in compositions(n - first):
                yield [first] + rest

    def fn(w):
        n = len(w)
        if n == 0:
            return word_vec(UNIT)
        degs = [src.degrees[i] for i in w]
        out = {}
        for sizes in compositions(n):
            p = len(sizes)
            for sigma in multi_shuffles(sizes):
                seq = [w[i - 1] for i in sigma.images]
                s = _koszul_of_images(sigma.images, degs)
                prod = word_vec(UNIT)
                pos = 0
                for k in sizes:
                    sub = seq[pos:pos + k]
                    pos += k
                    sg, cw = src.sort_word(sub)
                    if not sg:
                        prod = {}
                        break
                    prod = vee(tgt, prod, scale(taylor.word(cw), sg), N)
                    if not prod:
                        break
                if prod:
                    add_to(out, prod, qq(s, factorial(p)))
        return out

    return SymMap(src, tgt, fn, 0, N, "morph-literal")


def _koszul_of_images(images, degs):
    odd = 0
    n = len(images)
    for p in range(n):
        for q in range(p + 1, n):
            if images[p] > images[q]:
                odd += degs[images[p] - 1] * degs[images[q] - 1]
    return -1 if odd & 1 else 1


def tensor_map_pair(f, g, pairs, src):
    """Apply f (x) g to a list of (left word, right word, coeff) tensors.

    Returns a list of (left vector, right vector, coeff) with the Koszul sign
    of moving g past the left word applied.
    """
    out = []
    for w1, w2, c in pairs:
        s = c * tensor_sign(g.deg, src.word_degree(w1))
        out.append((f.word(w1), g.word(w2), s))
    return out


def materialize(fmap, words):
    """Dict word -> value for the given words (zero values dropped)."""
    out = {}
    for w in words:
        v = fmap.word(w)
        if v:
            out[w] = v
    return out
