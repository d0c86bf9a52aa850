"""Built-in example families: Lie algebras, tensor DGLAs, End(M), a Hochschild
toy model, a curved Lie algebra, random data generators."""

import random

from .coalgebra import word_vec
from .dgla import DGLAData
from .graded import GradedSpace
from .linalg import inverse
from .scalars import Context, ONE, qq
from .structures import LInftyMorphism, transport_structure
from .vec import add_to, apply_linear

# -- Lie algebras over Q (all in degree 0) -------------------------------

_GL2_UNITS = {"e11": (0, 0), "e12": (0, 1), "e21": (1, 0), "e22": (1, 1)}


def _gl2_table():
    inv = {v: k for k, v in _GL2_UNITS.items()}
    table = {}
    for a, (i, j) in _GL2_UNITS.items():
        for b, (k, l) in _GL2_UNITS.items():
            img = {}
            if j == k:
                img[inv[(i, l)]] = img.get(inv[(i, l)], 0) + 1
            if l == i:
                img[inv[(k, j)]] = img.get(inv[(k, j)], 0) - 1
            img = {x: c for x, c in img.items() if c}
            if img:
                table[(a, b)] = img
    return table


LIE_ALGEBRAS = {
    "gl2": (["e11", "e12", "e21", "e22"], _gl2_table()),
    "sl2": (["h", "e", "f"], {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}),
    "heis": (["p", "q", "z"], {("p", "q"): {"z": 1}}),
    "b2": (["a", "b"], {("a", "b"): {"b": 1}}),
}

# graded commutative dg algebras: (basis [(label, deg)], product {(a, b): {c: q}}, d {a: {b: q}})
DG_ALGEBRAS = {
    "Q": ([("1", 0)], {("1", "1"): {"1": 1}}, {}),
    "eps": ([("1", 0), ("e", 1)], {("1", "1"): {"1": 1}, ("1", "e"): {"e": 1}, ("e", "1"): {"e": 1}}, {}),
    "cone": (
        [("1", 0), ("a", 0), ("b", 1)],
        {
            ("1", "1"): {"1": 1},
            ("1", "a"): {"a": 1},
            ("a", "1"): {"a": 1},
            ("1", "b"): {"b": 1},
            ("b", "1"): {"b": 1},
        },
        {"a": {"b": 1}},
    ),
}


def lie_algebra(name, ctx=None):
    labels, table = LIE_ALGEBRAS[name]
    g = GradedSpace([(lab, 0) for lab in labels])
    return DGLAData.from_tables(g, bracket=table, ctx=ctx, name=name)


def gl2(ctx=None):
    return lie_algebra("gl2", ctx)


def tensor_dgla(lie, alg, ctx=None):
    """k (x) A for a Lie algebra k in degree 0 and a dg commutative algebra A.

    [x a, y b] = [x, y] ab and d(x a) = x da (no signs since k sits in degree 0).
    """
    labels, table = LIE_ALGEBRAS[lie]
    abasis, aprod, ad = DG_ALGEBRAS[alg]
    basis = [(f"{x}.{a}", d) for x in labels for a, d in abasis]
    g = GradedSpace(basis)
    bracket = {}
    for (x, y), xy in table.items():
        for a, _ in abasis:
            for b, _ in abasis:
                ab = aprod.get((a, b), {})
                img = {}
                for z, c1 in xy.items():
                    for e, c2 in ab.items():
                        img[f"{z}.{e}"] = img.get(f"{z}.{e}", 0) + c1 * c2
                if img:
                    bracket[(f"{x}.{a}", f"{y}.{b}")] = img
    diff = {}
    for x in labels:
        for a, img in ad.items():
            diff[f"{x}.{a}"] = {f"{x}.{b}": c for b, c in img.items()}
    return DGLAData.from_tables(g, diff, bracket, ctx=ctx, name=f"{lie}(x){alg}")


def change_basis(data, rng, name=None):
    """Random unimodular change of basis inside each degree."""
    g = data.g
    blocks = g.dims()
    T = {}
    for d, labs in blocks.items():
        n = len(labs)
        lo = [[qq(0)] * n for _ in range(n)]
        up = [[qq(0)] * n for _ in range(n)]
        for i in range(n):
            lo[i][i] = qq(rng.choice([1, -1]))
            up[i][i] = ONE
            for j in range(i):
                lo[i][j] = qq(rng.randint(-2, 2))
            for j in range(i + 1, n):
                up[i][j] = qq(rng.randint(-2, 2))
        m = [[sum((lo[i][k] * up[k][j] for k in range(n)), qq(0)) for j in range(n)] for i in range(n)]
        T[d] = (labs, m)
    new_basis = []
    fwd = {}  # new index -> vector in old basis
    for d, (labs, m) in sorted(T.items()):
        for c, _ in enumerate(labs):
            new_basis.append((f"v{d}_{c}", d))
    h = GradedSpace(new_basis)
    back = {}  # old index -> vector in new basis
    for d, (labs, m) in T.items():
        minv = inverse(m)
        for c in range(len(labs)):
            newi = h.index[f"v{d}_{c}"]
            fwd[(newi,)] = {((g.index[labs[r]],), 0, 0): m[r][c] for r in range(len(labs)) if m[r][c]}
            oldi = g.index[labs[c]]
            back[(oldi,)] = {((h.index[f"v{d}_{r}"],), 0, 0): minv[r][c] for r in range(len(labs)) if minv[r][c]}
    N = data.N

    def to_new(v):
        return apply_linear(lambda w: back.get(w, {}), v, N)

    def to_old(v):
        return apply_linear(lambda w: fwd.get(w, {}), v, N)

    d = {}
    for i in range(h.dim):
        v = to_new(data.dvec(to_old(word_vec((i,)))))
        if v:
            d[(i,)] = v
    br = {}
    for i in range(h.dim):
        for j in range(h.dim):
            v = to_new(data.bracket(to_old(word_vec((i,))), to_old(word_vec((j,)))))
            if v:
                br[(i, j)] = v
    R = to_new(data.R)
    return DGLAData(h, d, br, R, data.ctx, name or f"{data.name}~")


def random_dgla(seed, ctx=None):
    """Valid DGLA k (x) A of dimension <= 8 in a random basis."""
    rng = random.Random(seed)
    choices = [(k, a) for k in LIE_ALGEBRAS for a in DG_ALGEBRAS
               if len(LIE_ALGEBRAS[k][0]) * len(DG_ALGEBRAS[a][0]) <= 8]
    lie, alg = rng.choice(choices)
    return change_basis(tensor_dgla(lie, alg, ctx), rng, name=f"rand{seed}:{lie}(x){alg}")


# -- End(M) ----------------------------------------------------------------


def end_dgla(M, b, ctx=None, name=None):
    """(End(M), [b, -], commutator) for a complex M with differential b.

    M: GradedSpace; b: {label: {label: coeff}} of degree +1 with b^2 = 0.
    Basis 'u|v' is the map v -> u of degree |u| - |v|.
    """
    ctx = ctx or Context()
    labs = M.labels
    degs = dict(zip(M.labels, M.degrees))
    basis = [(f"{u}|{v}", degs[u] - degs[v]) for u in labs for v in labs]
    E = GradedSpace(basis)

    def comp(p, q):
        # (u|v) o (u2|v2) = delta(v, u2) u|v2
        u, v = p.split("|")
        u2, v2 = q.split("|")
        return {f"{u}|{v2}": 1} if v == u2 else {}

    deg = {lab: d for lab, d in E.basis()}
    bracket = {}
    for p in E.labels:
        for q in E.labels:
            img = {}
            for k, c in comp(p, q).items():
                img[k] = img.get(k, 0) + c
            s = -1 if (deg[p] * deg[q]) % 2 else 1
            for k, c in comp(q, p).items():
                img[k] = img.get(k, 0) - s * c
            img = {k: c for k, c in img.items() if c}
            if img:
                bracket[(p, q)] = img
    bmap = {}
    for v, img in b.items():
        for u, c in img.items():
            bmap[f"{u}|{v}"] = bmap.get(f"{u}|{v}", 0) + c
    diff = {}
    for p in E.labels:
        img = {}
        for bl, c in bmap.items():
            for k, c2 in comp(bl, p).items():
                img[k] = img.get(k, 0) + c * c2
            s = -1 if deg[p] % 2 else 1
            for k, c2 in comp(p, bl).items():
                img[k] = img.get(k, 0) - s * c * c2
        img = {k: c for k, c in img.items() if c}
        if img:
            diff[p] = img
    data = DGLAData.from_tables(E, diff, bracket, ctx=ctx, name=name or "End(M)")
    data.module_space = M
    data.module_diff = b
    return data


def two_term_complex():
    """m0 -> m1, b(m0) = m1."""
    return GradedSpace([("m0", 0), ("m1", 1)]), {"m0": {"m1": 1}}


def three_term_complex():
    """m0 -> m1 plus a closed n0; cohomology spanned by n0."""
    return GradedSpace([("m0", 0), ("n0", 0), ("m1", 1)]), {"m0": {"m1": 1}}


def end_complex_dgla(ctx=None):
    M, b = two_term_complex()
    return end_dgla(M, b, ctx, "End(m0->m1)")


# -- Hochschild toy model ------------------------------------------------


def hochschild_dual_numbers(ctx=None, max_arity=3):
    """Normalized Hochschild cochains of Q[x]/(x^2) of arity 1..max_arity.

    c{n}_1, c{n}_x send x^{(x)n} to 1 resp. x and have degree n-1.  The
    quotient by arities > max_arity is a dg ideal for the Gerstenhaber
    bracket, so this is a DGLA; d = [mu0, -].
    """
    ctx = ctx or Context()
    basis = []
    for n in range(1, max_arity + 1):
        basis += [(f"c{n}_1", n - 1), (f"c{n}_x", n - 1)]
    g = GradedSpace(basis)

    def circ(p, o1, q, o2):
        # D o E = sum_i (-1)^{i|E|} D(.., E(..), ..); normalized D kills an inserted 1
        if o2 != "x" or p + q - 1 > max_arity:
            return {}
        c = sum((-1) ** (i * (q - 1)) for i in range(p))
        return {f"c{p + q - 1}_{o1}": c} if c else {}

    bracket = {}
    cells = [(n, o) for n in range(1, max_arity + 1) for o in ("1", "x")]
    for p, o1 in cells:
        for q, o2 in cells:
            img = dict(circ(p, o1, q, o2))
            s = -1 if ((p - 1) * (q - 1)) % 2 else 1
            for k, c in circ(q, o2, p, o1).items():
                img[k] = img.get(k, 0) - s * c
            img = {k: c for k, c in img.items() if c}
            if img:
                bracket[(f"c{p}_{o1}", f"c{q}_{o2}")] = img
    diff = {}
    for n in range(1, max_arity):
        # [mu0, D](x,..,x) = D(x..x) x + (-1)^{|D|} x D(x..x)
        c = 1 + (-1) ** (n - 1)
        if c:
            diff[f"c{n}_1"] = {f"c{n + 1}_x": c}
    return DGLAData.from_tables(g, diff, bracket, ctx=ctx, name="Hoch(Q[x]/x^2)")


# -- curved example -------------------------------------------------------


def curved_lie(a=1, b=1, ctx=None):
    """x, y in degree 1, c in degree 2, [x, y] = c, d = 0, R = -ab hbar^2 c.

    pi = hbar (a x + b y) is then a curved Maurer-Cartan element.
    """
    ctx = ctx or Context()
    g = GradedSpace([("x", 1), ("y", 1), ("c", 2)])
    ab = qq(a) * qq(b)
    R = {"c": [0, 0, -ab]} if ab else {}
    return DGLAData.from_tables(g, bracket={("x", "y"): {"c": 1}}, curvature=R, ctx=ctx, name="curved")


# -- random data -----------------------------------------------------------


def random_vector(space, degree, rng, N, min_order=1, density=0.7, lo=-3, hi=3, tmax=0):
    """Random vector of weight-one words in `space` of the given (working) degree."""
    out = {}
    for i in space.indices_of_degree(degree):
        for h in range(min_order, N + 1):
            for k in range(tmax + 1):
                if rng.random() < density:
                    c = qq(rng.randint(lo, hi), rng.choice([1, 1, 2]))
                    if c:
                        add_to(out, {((i,), h, k): c})
    return out


def random_taylor(src, tgt, deg, arities, rng, N, min_order=0, density=0.5):
    """Random Taylor data word -> vector of the given degree shift."""
    out = {}
    for n in arities:
        for w in src.words(n):
            v = random_vector(tgt, src.word_degree(w) + deg, rng, N, min_order, density)
            if v:
                out[w] = v
    return out


def random_iso(Q, Qp, rng, arities=(2, 3, 4), min_order=0, name="F"):
    """Random L-infinity-type map with invertible F_1 (unitriangular per degree)."""
    S, Sp = Q.S, Qp.S
    if S.degrees != Sp.degrees:
        raise ValueError("need equal degree patterns")
    taylor = {}
    for d, labs in S.dims().items():
        idx = [S.index[x] for x in labs]
        for c, i in enumerate(idx):
            v = {((i,), 0, 0): qq(rng.choice([1, -1]))}
            for r, j in enumerate(idx):
                if r < c and rng.random() < 0.6:
                    v[((j,), 0, 0)] = qq(rng.randint(-2, 2)) or ONE
            taylor[(i,)] = v
    taylor.update(random_taylor(S, Sp, 0, arities, rng, Q.N, min_order))
    return LInftyMorphism(Q, Qp, taylor, Q.ctx, name)


def transported_structure(Q, rng, name=None):
    """A genuine L-infinity structure Psi Q Psi^{-1}, Psi_1 = id, Psi_2 in hbar*random."""
    S = Q.S
    psi = {(i,): word_vec((i,)) for i in range(S.dim)}
    psi.update(random_taylor(S, S, 0, (2,), rng, Q.N, min_order=1))
    Psi = LInftyMorphism(Q, Q, psi, Q.ctx, "Psi")
    return transport_structure(Q, Psi, name or f"{Q.name}^Psi"), Psi


def three_dim_space():
    """x, y in degree 0 and z in degree 1 (working degrees -1, -1, 0)."""
    return GradedSpace([("x", 0), ("y", 0), ("z", 1)])

