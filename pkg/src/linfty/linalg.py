"""Exact linear algebra over Q (sympy matrices) and over Q[hbar,t]/(hbar^(N+1))."""

import sympy

from .scalars import qq
from .vec import add_to, apply_linear, scale


def _to_sympy(x):
    x = qq(x)
    return sympy.Rational(int(x.numerator), int(x.denominator))


def _from_sympy(x):
    x = sympy.Rational(x)
    return qq(int(x.p), int(x.q))


def to_matrix(rows):
    return sympy.Matrix([[_to_sympy(x) for x in r] for r in rows]) if rows else sympy.zeros(0, 0)


def from_matrix(m):
    return [[_from_sympy(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def inverse(rows):
    m = to_matrix(rows)
    if m.rows == 0:
        return []
    if m.det() == 0:
        raise ZeroDivisionError("singular matrix")
    return from_matrix(m.inv())


def rref(rows, ncols=None):
    """(reduced rows, pivot columns)."""
    if not rows:
        return [], ()
    m = to_matrix(rows)
    r, piv = m.rref()
    return from_matrix(r), tuple(piv)


def nullspace(rows, ncols):
    """Basis of {x : rows x = 0} as lists of rationals (deterministic)."""
    if not rows:
        return [[qq(1) if i == j else qq(0) for i in range(ncols)] for j in range(ncols)]
    m = to_matrix(rows)
    return [[_from_sympy(v[i]) for i in range(ncols)] for v in m.nullspace()]


def rank(rows):
    if not rows:
        return 0
    return to_matrix(rows).rank()


def map_matrix(lin, src_idx, tgt_idx):
    """Matrix (rows = targets) of the hbar^0 t^0 part of a linear map dict."""
    pos = {j: r for r, j in enumerate(tgt_idx)}
    rows = [[qq(0)] * len(src_idx) for _ in tgt_idx]
    for c, i in enumerate(src_idx):
        for (w, h, k), x in lin.get((i,), {}).items():
            if h == 0 and k == 0:
                rows[pos[w[0]]][c] = x
    return rows


def invert_linear(lin, dim_src, dim_tgt, N):
    """Inverse of a linear map between weight-one spaces over Q[hbar,t].

    lin: dict (i,) -> vector of weight-one words.  The hbar^0 part must be
    t-independent and invertible; the rest is inverted by a Neumann series,
    which terminates modulo hbar^(N+1).
    """
    if dim_src != dim_tgt:
        raise ZeroDivisionError("dimension mismatch: not invertible")
    for img in lin.values():
        for (_, h, k) in img:
            if h == 0 and k != 0:
                raise ZeroDivisionError("hbar^0 part depends on t")
    idx = list(range(dim_src))
    a0 = map_matrix(lin, idx, idx)
    a0inv = inverse(a0)
    inv0 = {}
    for c in idx:
        v = {}
        for r in idx:
            if a0inv[r][c]:
                v[((r,), 0, 0)] = a0inv[r][c]
        if v:
            inv0[(c,)] = v
    rest = {}
    for key, img in lin.items():
        rv = {kk: x for kk, x in img.items() if kk[1] > 0}
        if rv:
            rest[key] = rv

    def a0inv_fn(w):
        return inv0.get(w, {})

    def rest_fn(w):
        return rest.get(w, {})

    out = {}
    for c in idx:
        y = apply_linear(a0inv_fn, {((c,), 0, 0): qq(1)}, N)
        total = dict(y)
        term = y
        for _ in range(N):
            term = scale(apply_linear(a0inv_fn, apply_linear(rest_fn, term, N), N), -1)
            if not term:
                break
            add_to(total, term)
        if total:
            out[(c,)] = total
    return out


def vectors_to_rows(vectors, dim):
    """Column vectors (dict idx -> rational) to a dense row-major matrix."""
    return [[v.get(i, qq(0)) for v in vectors] for i in range(dim)]
