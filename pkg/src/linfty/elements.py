"""Building and reading elements of a graded space (weight-one words)."""

from .scalars import Scalar, TScalar, to_q
from .vec import add_term


def coeff_terms(c):
    """Normalize a coefficient into a dict (hbar power, t power) -> rational.

    Accepted: a rational-like (hbar^0), a list over hbar powers whose entries
    are rationals or lists over t powers, a Scalar, a TScalar, or a dict.
    """
    if isinstance(c, Scalar):
        return {(h, 0): x for h, x in enumerate(c.coeffs) if x}
    if isinstance(c, TScalar):
        return dict(c.terms)
    if isinstance(c, dict):
        return {(int(h), int(k)): to_q(x) for (h, k), x in c.items() if to_q(x)}
    if isinstance(c, (list, tuple)):
        out = {}
        for h, entry in enumerate(c):
            if isinstance(entry, (list, tuple)):
                for k, x in enumerate(entry):
                    x = to_q(x)
                    if x:
                        out[(h, k)] = x
            else:
                x = to_q(entry)
                if x:
                    out[(h, 0)] = x
        return out
    x = to_q(c)
    return {(0, 0): x} if x else {}


def element(space, coeffs, N):
    """Vector in `space` from {label: coefficient}; keys are weight-one words."""
    out = {}
    for lab, c in coeffs.items():
        if lab not in space.index:
            raise ValueError(f"unknown basis label {lab!r}")
        i = space.index[lab]
        for (h, k), x in coeff_terms(c).items():
            if h <= N:
                add_term(out, ((i,), h, k), x)
    return out


def sym_vector(space, terms, N):
    """Vector in Sym(space) from [(labels, coefficient), ...]."""
    out = {}
    for labels, c in terms:
        s, w = space.parse_word(labels)
        if not s:
            continue
        for (h, k), x in coeff_terms(c).items():
            if h <= N:
                add_term(out, (w, h, k), s * x)
    return out


def coefficient(v, space, label, N):
    """TScalar coefficient of a basis label in a weight-one vector."""
    i = space.index[label]
    return TScalar({(h, k): x for (w, h, k), x in v.items() if w == (i,)}, N)


def as_table(v, space):
    """Readable sorted list of (labels, hbar, t, value) entries."""
    rows = []
    for (w, h, k), x in v.items():
        rows.append((tuple(space.labels[i] for i in w), h, k, x))
    rows.sort(key=lambda r: (len(r[0]), r[0], r[1], r[2]))
    return rows


def is_homogeneous(v, space, degree):
    return all(space.word_degree(w) == degree for (w, _, _) in v)


def degree_of(v, space):
    degs = {space.word_degree(w) for (w, _, _) in v}
    if len(degs) > 1:
        raise ValueError(f"inhomogeneous vector (degrees {sorted(degs)})")
    return degs.pop() if degs else None


def filtration_order(v):
    return min((h for (_, h, _) in v), default=None)


def linear_map(space_src, space_tgt, images, N):
    """Dict index-word (i,) -> vector, from {label: {label: coeff}}."""
    out = {}
    for lab, img in images.items():
        if lab not in space_src.index:
            raise ValueError(f"unknown basis label {lab!r}")
        v = element(space_tgt, img, N)
        if v:
            out[(space_src.index[lab],)] = v
    return out

