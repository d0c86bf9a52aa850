"""Sparse vectors over Q[hbar,t]/(hbar^(N+1)).

A vector is a plain dict mapping (basis_key, hbar_power, t_power) to a nonzero
rational.  Basis keys are opaque hashables: canonical words for Sym(V),
(word, m) pairs for comodules, and so on.
"""

from .scalars import ZERO, ONE, to_q


def add_to(acc, v, c=ONE):
    """acc += c * v, in place."""
    for key, x in v.items():
        y = acc.get(key, ZERO) + c * x
        if y:
            acc[key] = y
        else:
            acc.pop(key, None)
    return acc


def add_term(acc, key, c):
    y = acc.get(key, ZERO) + c
    if y:
        acc[key] = y
    else:
        acc.pop(key, None)


def add(*vs):
    out = {}
    for v in vs:
        add_to(out, v)
    return out


def sub(a, b):
    return add_to(dict(a), b, -ONE)


def scale(v, c):
    c = to_q(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def shift(v, h, k, c, N):
    """c * hbar^h * t^k * v, truncated."""
    if not c:
        return {}
    return {(b, hh + h, kk + k): c * x for (b, hh, kk), x in v.items() if hh + h <= N}


def mul_coeff(v, coeff, N):
    """Multiply by a coefficient given as a dict (h, k) -> rational."""
    out = {}
    for (h, k), c in coeff.items():
        add_to(out, shift(v, h, k, c, N))
    return out


def relabel(v, fn):
    """Apply a basis relabeling fn(key) -> (sign, new_key) or None."""
    out = {}
    for (b, h, k), x in v.items():
        r = fn(b)
        if r is None:
            continue
        s, nb = r
        if s:
            add_term(out, (nb, h, k), s * x)
    return out


def apply_linear(fn, v, N):
    """Extend fn: basis_key -> vector linearly over Q[hbar,t]."""
    out = {}
    for (b, h, k), c in v.items():
        img = fn(b)
        if not img:
            continue
        for (b2, h2, k2), c2 in img.items():
            hh = h + h2
            if hh > N:
                continue
            key = (b2, hh, k + k2)
            y = out.get(key, ZERO) + c * c2
            if y:
                out[key] = y
            else:
                del out[key]
    return out


def basis_vec(b, c=ONE, h=0, k=0):
    return {(b, h, k): to_q(c)} if c else {}


def truncate(v, N):
    return {key: x for key, x in v.items() if key[1] <= N}


def hbar_order(v, default=None):
    """Smallest hbar power present (default for the zero vector)."""
    if not v:
        return default
    return min(key[1] for key in v)


def t_degree(v):
    return max((key[2] for key in v), default=0)


def at_t(v, t):
    """Substitute a rational value for t."""
    t = to_q(t)
    out = {}
    for (b, h, k), x in v.items():
        add_term(out, (b, h, 0), x * t**k)
    return out


def d_dt(v):
    return {(b, h, k - 1): x * k for (b, h, k), x in v.items() if k}


def integrate_t(v):
    """Antiderivative in t vanishing at t = 0."""
    return {(b, h, k + 1): x / (k + 1) for (b, h, k), x in v.items()}


def hbar_part(v, h):
    return {key: x for key, x in v.items() if key[1] == h}


def support(v):
    return {key[0] for key in v}


def first_difference(a, b):
    """Return a deterministic (key, a_value, b_value) where a and b differ, or None."""
    keys = set(a) | set(b)
    bad = [key for key in keys if a.get(key, ZERO) != b.get(key, ZERO)]
    if not bad:
        return None
    key = min(bad, key=repr)
    return key, a.get(key, ZERO), b.get(key, ZERO)
