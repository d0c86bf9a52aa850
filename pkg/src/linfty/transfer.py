"""Homotopy transfer along contractions, the inclusion I, minimal models and the
splitting isomorphism B -> A + im[d_B, h]."""

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

from .coalgebra import SymMap, extend_coderivation, extend_morphism, vee, word_vec
from .graded import GradedSpace, koszul_sign
from .linalg import inverse, nullspace, rref, to_matrix, from_matrix
from .scalars import Context, ONE, ZERO, qq
from .structures import LInftyMorphism, LInftyStructure, Report, direct_sum, scan_words
from .vec import add_to, apply_linear, first_difference, scale, sub


def lin_apply(table, v, N):
    return apply_linear(lambda w: table.get(w, {}), v, N)


def lin_compose(f, g, dim, N):
    """Dict for f o g on basis indices 0..dim-1 of the source of g."""
    out = {}
    for i in range(dim):
        v = lin_apply(f, g.get((i,), {}), N)
        if v:
            out[(i,)] = v
    return out


def lin_from_rows(rows, src_dim):
    """Matrix (rows index targets) -> linear dict."""
    out = {}
    for c in range(src_dim):
        v = {((r,), 0, 0): rows[r][c] for r in range(len(rows)) if rows[r][c]}
        if v:
            out[(c,)] = v
    return out


def lin_to_rows(table, src_dim, tgt_dim):
    rows = [[ZERO] * src_dim for _ in range(tgt_dim)]
    for (c,), v in table.items():
        for (w, h, k), x in v.items():
            if h or k:
                raise ValueError("matrix extraction needs hbar- and t-free maps")
            rows[w[0]][c] += x
    return rows


class Contraction:
    """(A, d_A) <-(p)- (B, d_B) -(i)->, h on B of degree -1, all as index dicts."""

    def __init__(self, A, B, dA, dB, i, p, h, ctx=None, name="contraction"):
        self.A, self.B = A, B
        self.dA, self.dB = dict(dA), dict(dB)
        self.i, self.p, self.h = dict(i), dict(p), dict(h)
        self.ctx = ctx or Context()
        self.N = self.ctx.N
        self.name = name

    def validate(self):
        A, B, N = self.A, self.B, self.N
        checks = []
        for a in range(A.dim):
            e = word_vec((a,))
            checks.append(("d_B i = i d_A", A.labels[a],
                           sub(lin_apply(self.dB, lin_apply(self.i, e, N), N), lin_apply(self.i, lin_apply(self.dA, e, N), N))))
            checks.append(("p i = id", A.labels[a], sub(lin_apply(self.p, lin_apply(self.i, e, N), N), e)))
            checks.append(("h i = 0", A.labels[a], lin_apply(self.h, lin_apply(self.i, e, N), N)))
        for b in range(B.dim):
            e = word_vec((b,))
            he = lin_apply(self.h, e, N)
            de = lin_apply(self.dB, e, N)
            checks.append(("p d_B = d_A p", B.labels[b],
                           sub(lin_apply(self.p, de, N), lin_apply(self.dA, lin_apply(self.p, e, N), N))))
            hd = add_to(lin_apply(self.dB, he, N), lin_apply(self.h, de, N))
            rhs = sub(e, lin_apply(self.i, lin_apply(self.p, e, N), N))
            checks.append(("d h + h d = id - i p", B.labels[b], sub(hd, rhs)))
            checks.append(("h h = 0", B.labels[b], lin_apply(self.h, he, N)))
            checks.append(("p h = 0", B.labels[b], lin_apply(self.p, he, N)))
        for name, where, r in checks:
            if r:
                return Report(False, len(checks), (where,), r, f"contraction[{self.name}]", name)
        for table, src, tgt, shift, what in (
            (self.i, A, B, 0, "i"), (self.p, B, A, 0, "p"), (self.h, B, B, -1, "h"),
            (self.dA, A, A, 1, "d_A"), (self.dB, B, B, 1, "d_B"),
        ):
            for (c,), v in table.items():
                for (w, _, _) in v:
                    if tgt.degrees[w[0]] != src.degrees[c] + shift:
                        return Report(False, len(checks), (src.labels[c],), v, f"contraction[{self.name}]",
                                      f"{what} has the wrong degree")
        return Report(True, len(checks), None, {}, f"contraction[{self.name}]")


# -- K_n and H_n ------------------------------------------------------------


class HomotopyOperators:
    """K_n (literal full S_n sum), H~_n (coderivation extension of -h) and
    H_n = K_n H~_n on Sym(B[1]), plus Q^n_{B,n} and (ip)^{v n}."""

    def __init__(self, contraction):
        C = contraction
        self.C = C
        S = C.B.shift(1)
        self.S = S
        N = C.N
        self.N = N
        ip = lin_compose(C.i, C.p, C.B.dim, N)
        self.ip = ip
        neg_h = {k: scale(v, -1) for k, v in C.h.items()}
        neg_d = {k: scale(v, -1) for k, v in C.dB.items()}
        self.Htilde = extend_coderivation(SymMap(S, S, lambda w: neg_h.get(w, {}) if len(w) == 1 else {}, -1, N))
        self.Qlin = extend_coderivation(SymMap(S, S, lambda w: neg_d.get(w, {}) if len(w) == 1 else {}, 1, N))
        self.ipext = extend_morphism(SymMap(S, S, lambda w: ip.get(w, {}) if len(w) == 1 else {}, 0, N))
        self.K = SymMap(S, S, self._k, 0, N, "K")
        self.H = SymMap(S, S, lambda w: self.K(self.Htilde.word(w)), -1, N, "H")

    def _k(self, w):
        n = len(w)
        if n == 0:
            return word_vec(w)
        S, N, ip = self.S, self.N, self.ip
        degs = [S.degrees[i] for i in w]
        out = {}
        for perm in permutations(range(n)):
            sigma = [p + 1 for p in perm]
            eps = koszul_sign(sigma, degs)
            for i in range(n):
                prod = word_vec(())
                for pos, q in enumerate(perm):
                    f = ip.get((w[q],), {}) if pos < i else word_vec((w[q],))
                    prod = vee(S, prod, f, N)
                    if not prod:
                        break
                if prod:
                    add_to(out, prod, qq(eps, factorial(n) * (n - i)))
        return out

    def homotopy_residual(self, w):
        """Q H + H Q - (id - (ip)^{v n}) on a word."""
        r = self.Qlin(self.H.word(w))
        add_to(r, self.H(self.Qlin.word(w)))
        add_to(r, word_vec(w), -ONE)
        add_to(r, self.ipext.word(w))
        return r

    def check_homotopy_identity(self, max_weight):
        return scan_words(self.S, max_weight, self.homotopy_residual, "ext-homotopy", start=1)

    def check_commutation(self, max_weight):
        """K Q^n = Q^n K and K H~ = H~ K."""

        def res(w):
            r = sub(self.K(self.Qlin.word(w)), self.Qlin(self.K.word(w)))
            add_to(r, sub(self.K(self.Htilde.word(w)), self.Htilde(self.K.word(w))))
            return r

        return scan_words(self.S, max_weight, res, "K-commutation", start=1)


# -- transfer ------------------------------------------------------------


@dataclass
class TransferResult:
    QA: LInftyStructure
    P: LInftyMorphism
    I: LInftyMorphism
    contraction: Contraction
    ops: HomotopyOperators
    certificates: list = field(default_factory=list)


def _strict_ext(src, tgt, table, N):
    return extend_morphism(SymMap(src, tgt, lambda w: table.get(w, {}) if len(w) == 1 else {}, 0, N))


def transfer(contraction, QB, max_weight, check_stages=True):
    """Transferred structure Q_A, projection P and inclusion I, all truncated
    at arity max_weight.  Stage certificates record L Q^{k+1}_{B,k+1} = -Q^1_{A,1} L."""
    C = contraction
    rep = C.validate()
    if not rep.ok:
        raise ValueError(f"invalid contraction: {rep.detail} at {rep.witness}")
    if QB.curved:
        raise ValueError("transfer needs a flat structure")
    N = C.N
    SA, SB = C.A.shift(1), C.B.shift(1)
    for b in range(C.B.dim):
        if first_difference(QB.q1.word((b,)), scale(C.dB.get((b,), {}), -1)) is not None:
            raise ValueError("(Q_B)_1 must equal -d_B")
    ops = HomotopyOperators(C)
    QBext = QB.Q
    iext = _strict_ext(SA, SB, C.i, N)
    neg_dA = {k: scale(v, -1) for k, v in C.dA.items()}

    qa_cache = {}
    p_cache = {}
    pnt_cache = {}

    def qa1(u):
        r = qa_cache.get(u)
        if r is not None:
            return r
        n = len(u)
        if n == 0 or n > max_weight:
            r = {}
        elif n == 1:
            r = neg_dA.get(u, {})
        else:
            x = QBext(iext.word(u))
            lower = {key: c for key, c in x.items() if 0 < len(key[0]) < n}
            r = apply_linear(p1, lower, N)
        qa_cache[u] = r
        return r

    def p_no_top(w):
        # P(w) minus its weight-one part P^1(w)
        r = pnt_cache.get(w)
        if r is not None:
            return r
        r = {}
        for w1, w2, c in SB.first_splits(w):
            if not w2:
                continue
            a = p1(w1)
            if not a:
                continue
            b = p_full(w2)
            if b:
                add_to(r, vee(SA, a, b, N), c)
        pnt_cache[w] = r
        return r

    def p_full(w):
        if not w:
            return word_vec(())
        r = dict(p_no_top(w))
        add_to(r, p1(w))
        return r

    def linf(w):
        """L_{inf,n}(w) = sum_{l>=2} Q^1_{A,l} P^l_n - sum_{l<n} P^1_l Q^l_{B,n}."""
        n = len(w)
        r = apply_linear(qa1, p_no_top(w), N)
        x = QBext.word(w)
        lower = {key: c for key, c in x.items() if 0 < len(key[0]) < n}
        add_to(r, apply_linear(p1, lower, N), -ONE)
        return r

    def p1(w):
        r = p_cache.get(w)
        if r is not None:
            return r
        n = len(w)
        if n == 0 or n > max_weight:
            r = {}
        elif n == 1:
            r = C.p.get(w, {})
        else:
            r = apply_linear(linf, ops.H.word(w), N)
        p_cache[w] = r
        return r

    QA = LInftyStructure(C.A, qa1, QB.ctx, f"{QB.name}->A", max_arity=max_weight)
    P = LInftyMorphism(QB, QA, p1, QB.ctx, "P", max_arity=max_weight)
    I = inclusion(C, QB, QA, max_weight)
    certs = []
    if check_stages:
        for k in range(1, max_weight):
            def res(w, k=k):
                if len(w) != k + 1:
                    return {}
                lhs = apply_linear(linf, ops.Qlin.word(w), N)
                add_to(lhs, apply_linear(qa1, linf(w), N))  # -Q_A1 L moved over
                return lhs

            rep = scan_words(SB, k + 1, res, f"stage{k + 1}", start=k + 1)
            certs.append(rep)
            if not rep.ok:
                raise AssertionError(f"transfer stage {k + 1} certificate failed at {rep.witness}")
    return TransferResult(QA, P, I, C, ops, certs)


def inclusion(C, QB, QA, max_weight):
    """I_1 = i, I_{k+1} = h o sum_{l>=2} Q^1_{B,l} I^l_{k+1}."""
    N = C.N
    SA, SB = C.A.shift(1), C.B.shift(1)
    i_cache, nt_cache = {}, {}
    qb1 = QB.q1

    def no_top(u):
        r = nt_cache.get(u)
        if r is not None:
            return r
        r = {}
        for w1, w2, c in SA.first_splits(u):
            if not w2:
                continue
            a = i1(w1)
            if not a:
                continue
            b = full(w2)
            if b:
                add_to(r, vee(SB, a, b, N), c)
        nt_cache[u] = r
        return r

    def full(u):
        if not u:
            return word_vec(())
        r = dict(no_top(u))
        add_to(r, i1(u))
        return r

    def i1(u):
        r = i_cache.get(u)
        if r is not None:
            return r
        n = len(u)
        if n == 0 or n > max_weight:
            r = {}
        elif n == 1:
            r = C.i.get(u, {})
        else:
            r = lin_apply(C.h, qb1(no_top(u)), N)
        i_cache[u] = r
        return r

    return LInftyMorphism(QA, QB, i1, QB.ctx, "I", max_arity=max_weight)


# -- minimal models --------------------------------------------------------


def _columns(vecs, n):
    return [[v[r] for v in vecs] for r in range(n)]


def cohomology_contraction(L, d, ctx=None, name="minimal"):
    """Contraction of (L, d) onto cohomology representatives.

    Per degree L^k = B^k + H^k + C^k (boundaries, pivot-chosen representatives,
    a pivot-chosen complement of the cycles); h inverts d on C^{k-1} -> B^k.
    """
    ctx = ctx or Context()
    dims = L.dims()
    degrees = sorted(dims)
    idx = {k: [L.index[lab] for lab in dims[k]] for k in degrees}
    dmat = {}
    for k in degrees:
        src = idx[k]
        tgt = idx.get(k + 1, [])
        rows = [[ZERO] * len(src) for _ in tgt]
        pos = {j: r for r, j in enumerate(tgt)}
        for c, i in enumerate(src):
            for (w, h, t), x in d.get((i,), {}).items():
                if h or t:
                    raise ValueError("minimal model needs a Q-linear differential")
                rows[pos[w[0]]][c] += x
        dmat[k] = rows
    Z, Bd, H, Cc = {}, {}, {}, {}
    for k in degrees:
        n = len(idx[k])
        Z[k] = nullspace(dmat[k], n) if idx.get(k + 1) else [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    for k in degrees:
        n = len(idx[k])
        prev = dmat.get(k - 1)
        bvecs = []
        if prev and idx.get(k - 1):
            rr, piv = rref(_transpose(prev)) if prev else ([], ())
            # row space of prev^T = column space of prev
            bvecs = [row for row in rr if any(row)]
        Bd[k] = bvecs
        # representatives: extend boundaries by cycles, pivot choice
        cols = bvecs + Z[k]
        if cols:
            _, piv = rref(_columns(cols, n))
            H[k] = [Z[k][p - len(bvecs)] for p in piv if p >= len(bvecs)]
        else:
            H[k] = []
        # complement of cycles inside L^k
        unit = [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
        cols = Z[k] + unit
        _, piv = rref(_columns(cols, n))
        Cc[k] = [unit[p - len(Z[k])] for p in piv if p >= len(Z[k])]
    Abasis = []
    for k in degrees:
        for j in range(len(H[k])):
            Abasis.append((f"H{k}_{j}", k))
    A = GradedSpace(Abasis)
    i_map, p_map, h_map = {}, {}, {}
    for k in degrees:
        n = len(idx[k])
        for j, v in enumerate(H[k]):
            a = A.index[f"H{k}_{j}"]
            i_map[(a,)] = {((idx[k][r],), 0, 0): v[r] for r in range(n) if v[r]}
        # coordinates in the basis B + H + C
        basis = Bd[k] + H[k] + Cc[k]
        if not basis:
            continue
        M = _columns(basis, n)
        Minv = inverse(M)
        nb, nh = len(Bd[k]), len(H[k])
        for c in range(n):
            coords = [Minv[r][c] for r in range(len(basis))]
            pv = {}
            for j in range(nh):
                if coords[nb + j]:
                    pv[((A.index[f"H{k}_{j}"],), 0, 0)] = coords[nb + j]
            if pv:
                p_map[(idx[k][c],)] = pv
            # h on the boundary part: preimage under d in C^{k-1}
            bpart = [coords[j] for j in range(nb)]
            if any(bpart) and idx.get(k - 1):
                target = [sum((bpart[j] * Bd[k][j][r] for j in range(nb)), ZERO) for r in range(n)]
                pre = _preimage(dmat[k - 1], Cc[k - 1], target)
                hv = {((idx[k - 1][r],), 0, 0): pre[r] for r in range(len(pre)) if pre[r]}
                if hv:
                    h_map[(idx[k][c],)] = hv
    dA = {}
    return Contraction(A, L, dA, d, i_map, p_map, h_map, ctx, name)


def _transpose(rows):
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def _preimage(dm, comp, target):
    """x in span(comp) with dm x = target."""
    n_src = len(comp[0]) if comp else 0
    imgs = [[sum((dm[r][c] * v[c] for c in range(n_src)), ZERO) for r in range(len(dm))] for v in comp]
    M = _columns(imgs, len(dm))
    # solve M y = target (M has full column rank)
    m = to_matrix(M)
    sol = (m.T * m).inv() * m.T * to_matrix([[t] for t in target])
    y = [row[0] for row in from_matrix(sol)]
    return [sum((y[j] * comp[j][c] for j in range(len(comp))), ZERO) for c in range(n_src)]


def minimal_model(Q, max_weight):
    """(Q_H, P, I, contraction) with (Q_H)_1 = 0."""
    if Q.curved:
        raise ValueError("minimal models are for flat structures")
    d = {}
    for b in range(Q.L.dim):
        v = scale(Q.q1.word((b,)), -1)
        if v:
            d[(b,)] = v
    C = cohomology_contraction(Q.L, d, Q.ctx, f"H({Q.name})")
    res = transfer(C, Q, max_weight)
    res.QA.name = f"H({Q.name})"
    return res


# -- splitting -------------------------------------------------------------


def splitting(contraction, QB, max_weight, result=None):
    """L = P + F : B -> A + im[d_B, h], F_1 = [d_B, h], F_n = -h sum_{i<n} F_i (Q_B)^i_n.

    Returns (L, target structure, F, coordinate data)."""
    C = contraction
    N = C.N
    res = result or transfer(C, QB, max_weight, check_stages=False)
    B = C.B
    n = B.dim
    ip = lin_compose(C.i, C.p, n, N)
    comm = {}
    for b in range(n):
        v = sub(word_vec((b,)), ip.get((b,), {}))
        if v:
            comm[(b,)] = v
    rows = lin_to_rows(comm, n, n)
    _, piv = rref(rows) if rows else ([], ())
    cbasis = [(f"{B.labels[p]}", B.degrees[p]) for p in piv]
    Cs = GradedSpace(cbasis)
    vecs = {Cs.index[B.labels[p]]: [rows[r][p] for r in range(n)] for p in piv}
    # coordinates: least squares left inverse on the image
    order = [vecs[j] for j in range(Cs.dim)]
    if order:
        m = to_matrix(_columns(order, n))
        left = from_matrix((m.T * m).inv() * m.T)
    else:
        left = []

    def coords(v):
        out = {}
        for (w, h, k), x in v.items():
            for j in range(Cs.dim):
                c = left[j][w[0]]
                if c:
                    add_to(out, {((j,), h, k): c * x})
        return out

    dC = {}
    for j in range(Cs.dim):
        bv = {((r,), 0, 0): order[j][r] for r in range(n) if order[j][r]}
        v = coords(lin_apply(C.dB, bv, N))
        if v:
            dC[(j,)] = v
    QC = LInftyStructure(Cs, {k: scale(v, -1) for k, v in dC.items()}, QB.ctx, "im[d,h]")
    QBext = QB.Q
    f_cache = {}

    def f1(w):
        r = f_cache.get(w)
        if r is not None:
            return r
        k = len(w)
        if k == 0 or k > max_weight:
            r = {}
        elif k == 1:
            r = coords(comm.get(w, {}))
        else:
            x = QBext.word(w)
            lower = {key: c for key, c in x.items() if 0 < len(key[0]) < k}
            inner = apply_linear(f1_b, lower, N)
            r = coords(scale(lin_apply(C.h, inner, N), -1))
        f_cache[w] = r
        return r

    fb_cache = {}

    def f1_b(w):
        # F^1 with values back in B
        r = fb_cache.get(w)
        if r is None:
            v = f1(w)
            r = {}
            for (ww, h, k), x in v.items():
                for rr in range(n):
                    c = order[ww[0]][rr]
                    if c:
                        add_to(r, {((rr,), h, k): c * x})
            fb_cache[w] = r
        return r

    F = LInftyMorphism(QB, QC, f1, QB.ctx, "F", max_arity=max_weight)
    target, _, _ = direct_sum(res.QA, QC, prefixes=("A.", "C."), name="A+im[d,h]")
    SA = res.QA.S
    tS = target.S
    a_index = [tS.index["A." + lab] for lab in SA.labels]
    c_index = [tS.index["C." + lab] for lab in Cs.labels]

    def l1(w):
        out = {}
        for (ww, h, k), x in res.P.f1.word(w).items():
            add_to(out, {((a_index[ww[0]],), h, k): x})
        for (ww, h, k), x in f1(w).items():
            add_to(out, {((c_index[ww[0]],), h, k): x})
        return out

    Lm = LInftyMorphism(QB, target, l1, QB.ctx, "L", max_arity=max_weight)
    return Lm, target, F, res
