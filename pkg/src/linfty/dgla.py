"""(Curved) differential graded Lie algebras and their L-infinity structures."""

from math import factorial

from .elements import element
from .scalars import Context, ONE, qq
from .structures import LInftyStructure, Report
from .vec import add_to, apply_linear, hbar_order, scale, sub


class DGLAData:
    """A DGLA (g, d, [,]) with optional curvature R in g^2.

    Tables are keyed by basis indices of g: d[(i,)] and br[(i, j)] are vectors
    of weight-one words.  The bracket table is completed by graded
    antisymmetry [y, x] = -(-1)^(|x||y|) [x, y].
    """

    def __init__(self, space, d=None, br=None, R=None, ctx=None, name="g"):
        if space.shift_by != 0:
            raise ValueError("give the unshifted space g")
        self.g = space
        self.ctx = ctx or Context()
        self.N = self.ctx.N
        self.name = name
        self.d = {k: v for k, v in (d or {}).items() if v}
        self.R = dict(R or {})
        full = {}
        degs = space.degrees
        for (i, j), v in (br or {}).items():
            if not v:
                continue
            s = -1 if (degs[i] * degs[j]) & 1 else 1
            if (i, j) in full and full[(i, j)] != v:
                raise ValueError(f"conflicting bracket entries for {space.labels[i]},{space.labels[j]}")
            full[(i, j)] = v
            mirror = scale(v, -s)
            if (j, i) in full and full[(j, i)] != mirror:
                raise ValueError(f"bracket not graded antisymmetric on {space.labels[i]},{space.labels[j]}")
            full[(j, i)] = mirror
        self.br = full

    @classmethod
    def from_tables(cls, space, differential=None, bracket=None, curvature=None, ctx=None, name="g"):
        """Labels in, indices inside.  bracket: {(a, b): {c: coeff}}."""
        ctx = ctx or Context()
        d = {}
        for a, img in (differential or {}).items():
            d[(space.index[a],)] = element(space, img, ctx.N)
        br = {}
        for (a, b), img in (bracket or {}).items():
            br[(space.index[a], space.index[b])] = element(space, img, ctx.N)
        R = element(space, curvature or {}, ctx.N)
        return cls(space, d, br, R, ctx, name)

    @property
    def curved(self):
        return bool(self.R)

    # -- vector operations --------------------------------------------
    def dvec(self, v):
        return apply_linear(lambda w: self.d.get(w, {}), v, self.N)

    def bracket(self, u, v):
        out = {}
        N = self.N
        for (w1, h1, k1), c1 in u.items():
            for (w2, h2, k2), c2 in v.items():
                if h1 + h2 > N:
                    continue
                img = self.br.get((w1[0], w2[0]))
                if not img:
                    continue
                c = c1 * c2
                for (w, h, k), x in img.items():
                    if h + h1 + h2 <= N:
                        add_to(out, {(w, h + h1 + h2, k + k1 + k2): c * x})
        return out

    def ad(self, x):
        return lambda v: self.bracket(x, v)

    def exp_ad(self, x, v, max_terms=None):
        """e^{ad x} v; x of hbar-order >= 1 makes the series finite."""
        out = dict(v)
        term = v
        n = 0
        while term:
            n += 1
            if max_terms is not None and n > max_terms:
                break
            term = scale(self.bracket(x, term), qq(1, n))
            add_to(out, term)
        return out

    def degree_of_index(self, i):
        return self.g.degrees[i]

    # -- validation -----------------------------------------------------
    def validate(self):
        g = self.g
        degs = g.degrees
        n = g.dim

        def e(i):
            return {((i,), 0, 0): ONE}

        def fail(what, where, res):
            return Report(False, 0, tuple(g.labels[i] for i in where), res, f"dgla[{self.name}]", what)

        for (i,), v in self.d.items():
            for (w, _, _) in v:
                if degs[w[0]] != degs[i] + 1:
                    return fail("d has wrong degree", (i,), v)
        for (i, j), v in self.br.items():
            for (w, _, _) in v:
                if degs[w[0]] != degs[i] + degs[j]:
                    return fail("bracket has wrong degree", (i, j), v)
        for (w, _, _) in self.R:
            if degs[w[0]] != 2:
                return fail("curvature not of degree 2", (w[0],), self.R)
        checked = 0
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    lhs = self.bracket(e(x), self.bracket(e(y), e(z)))
                    rhs = self.bracket(self.bracket(e(x), e(y)), e(z))
                    s = -1 if (degs[x] * degs[y]) & 1 else 1
                    add_to(rhs, self.bracket(e(y), self.bracket(e(x), e(z))), s)
                    checked += 1
                    r = sub(lhs, rhs)
                    if r:
                        return fail("Jacobi identity", (x, y, z), r)
        for x in range(n):
            for y in range(n):
                lhs = self.dvec(self.bracket(e(x), e(y)))
                rhs = self.bracket(self.dvec(e(x)), e(y))
                add_to(rhs, self.bracket(e(x), self.dvec(e(y))), -1 if degs[x] & 1 else 1)
                r = sub(lhs, rhs)
                checked += 1
                if r:
                    return fail("d is not a derivation", (x, y), r)
        for x in range(n):
            r = sub(self.dvec(self.dvec(e(x))), self.bracket(self.R, e(x)))
            checked += 1
            if r:
                return fail("d^2 != [R, -]", (x,), r)
        r = self.dvec(self.R)
        if r:
            return fail("dR != 0", (), r)
        if self.R and hbar_order(self.R) < 1:
            return fail("curvature must have hbar-order >= 1", (), self.R)
        return Report(True, checked, None, {}, f"dgla[{self.name}]")


def from_dgla(data, check=True, name=None):
    """Q_1 = -d, Q_2(x v y) = -(-1)^{|x|}[x, y] with |x| the degree in g[1], Q_0(1) = -R."""
    if check:
        rep = data.validate()
        if not rep.ok:
            raise ValueError(f"invalid DGLA: {rep.detail} at {rep.witness}")
    S = data.g.shift(1)
    taylor = {}
    if data.R:
        taylor[()] = scale(data.R, -1)
    for (i,), v in data.d.items():
        taylor[(i,)] = scale(v, -1)
    for (i, j), v in data.br.items():
        if i <= j:
            s = -1 if S.degrees[i] & 1 else 1
            w = (i, j)
            if i == j and S.parity[i]:
                continue
            taylor[w] = scale(v, -s)
    Q = LInftyStructure(data.g, taylor, data.ctx, name or data.name, max_arity=2)
    Q.dgla = data
    return Q


def gauge_series(data, g, pi):
    """exp([g,.]) acting on pi: pi + sum_n ad_g^n/(n+1)! ([g, pi] - dg)."""
    out = dict(pi)
    term = sub(data.bracket(g, pi), data.dvec(g))
    n = 0
    while term:
        add_to(out, term, qq(1, factorial(n + 1)))
        n += 1
        term = data.bracket(g, term)
    return out
