"""Maurer-Cartan elements, gauge action, homotopy paths and twisting."""

from math import factorial

from .coalgebra import exp_vee, vee, word_vec
from .dgla import gauge_series
from .scalars import qq
from .structures import LInftyMorphism, LInftyStructure, Report
from .vec import add_to, at_t, d_dt, hbar_order, hbar_part, integrate_t, sub


def require_filtered(v, what="element"):
    if v and hbar_order(v) < 1:
        raise ValueError(f"{what} must have hbar-order >= 1")


def require_degree(v, space, degree, what="element"):
    for (w, _, _) in v:
        if len(w) != 1 or space.degrees[w[0]] != degree:
            raise ValueError(f"{what} must be a weight-one vector of working degree {degree}")


def mc_residual(Q, pi):
    """Q^1(exp pi) = sum_n 1/n! Q_n(pi^n), curvature included."""
    require_filtered(pi, "pi")
    require_degree(pi, Q.S, 0, "pi")
    return Q.q1(exp_vee(Q.S, pi, Q.N))


def check_mc(Q, pi):
    r = mc_residual(Q, pi)
    return Report(not r, 1, None if not r else ("Q^1(exp pi)",), r, f"mc[{Q.name}]")


def mc_obstruction(Q, pi):
    """(k, obstruction) where pi solves MC mod hbar^k and the hbar^k part of the
    residual is the obstruction; (None, {}) when pi is MC mod hbar^(N+1)."""
    r = mc_residual(Q, pi)
    if not r:
        return None, {}
    k = hbar_order(r)
    return k, hbar_part(r, k)


# -- gauge action and paths ---------------------------------------------


def _dgla(Q_or_data):
    data = getattr(Q_or_data, "dgla", Q_or_data)
    if not hasattr(data, "bracket"):
        raise ValueError("gauge action needs a DGLA")
    return data


def gauge_act(dgla, g, pi):
    """exp([g,.]) acting on pi (g in g^0, hbar-order >= 1)."""
    data = _dgla(dgla)
    require_filtered(g, "g")
    require_degree(g, data.g, 0, "g")
    return gauge_series(data, g, pi)


def homotopy_rhs(Q, lam, pi):
    """Q^1(lambda v exp pi)."""
    S = Q.S
    return Q.q1(vee(S, lam, exp_vee(S, pi, Q.N), Q.N))


def integrate_homotopy(Q, pi0, lam):
    """Unique pi(t) with d pi/dt = Q^1(lambda(t) v exp pi(t)), pi(0) = pi0.

    Picard iteration: each sweep fixes one more hbar-order because lambda has
    hbar-order >= 1, so N+1 sweeps give the exact polynomial solution.
    """
    require_filtered(pi0, "pi0")
    require_filtered(lam, "lambda")
    require_degree(lam, Q.S, -1, "lambda")
    pi = dict(pi0)
    for _ in range(Q.N + 1):
        nxt = dict(pi0)
        add_to(nxt, integrate_t(homotopy_rhs(Q, lam, pi)))
        if nxt == pi:
            break
        pi = nxt
    return pi


def path_residual(Q, pi_t, lam_t):
    """d pi/dt - Q^1(lambda v exp pi) as a polynomial in t."""
    return sub(d_dt(pi_t), homotopy_rhs(Q, lam_t, pi_t))


def verify_path(Q, pi_t, lam_t):
    r = path_residual(Q, pi_t, lam_t)
    return Report(not r, 1, None if not r else ("d pi/dt",), r, f"mc-path[{Q.name}]")


def reconstruct_gauge(dgla, lam):
    """A(t) with lambda = ((e^{ad A} - 1)/ad A)(dA/dt), A(0) = 0.

    With B = dA/dt: B = lambda - sum_{n>=1} ad_A^n/(n+1)! B, solved by Picard
    iteration on the hbar-order.
    """
    data = _dgla(dgla)
    require_filtered(lam, "lambda")
    A = {}
    for _ in range(data.N + 1):
        B = dict(lam)
        for _ in range(data.N + 1):
            corr = {}
            term = B
            n = 0
            while True:
                n += 1
                term = data.bracket(A, term)
                if not term:
                    break
                add_to(corr, term, qq(1, factorial(n + 1)))
            nb = sub(lam, corr)
            if nb == B:
                break
            B = nb
        nA = integrate_t(B)
        if nA == A:
            break
        A = nA
    return A


# -- twisting -----------------------------------------------------------


def twist_structure(Q, pi, name=None):
    """(Q^pi)_n(w) = Q^1(exp(pi) v w) = sum_k 1/k! Q_{n+k}(pi^k v w)."""
    require_filtered(pi, "pi")
    require_degree(pi, Q.S, 0, "pi")
    S, N = Q.S, Q.N
    e = exp_vee(S, pi, N)
    q1 = Q.q1
    return LInftyStructure(Q.L, lambda w: q1(vee(S, e, word_vec(w), N)), Q.ctx, name or f"{Q.name}^pi")


def mc_pushforward(F, pi):
    """F_MC(pi) = F^1(exp pi) = alpha + sum_k 1/k! F_k(pi^k)."""
    require_filtered(pi, "pi")
    return F.f1(exp_vee(F.source.S, pi, F.N))


def reduced_pushforward(F, pi):
    """F~^1(exp pi): the pushforward without the constant alpha."""
    return sub(mc_pushforward(F, pi), F.alpha)


def twist_morphism(F, pi, source=None, target=None, name=None):
    """F^pi : (L, Q^pi) -> (L', Q'^S) with S = F~^1(exp pi).

    (F^pi)_n(w) = F^1(exp(pi) v w) for n >= 1 and (F^pi)_0 = alpha, which
    covers flat and curved morphisms alike.  Returns (F^pi, S).
    """
    require_filtered(pi, "pi")
    S = reduced_pushforward(F, pi)
    src = source or twist_structure(F.source, pi)
    tgt = target or twist_structure(F.target, S)
    sp, N = F.source.S, F.N
    e = exp_vee(sp, pi, N)
    f1 = F.f1
    alpha = F.alpha

    def fn(w):
        if not w:
            return dict(alpha)
        return f1(vee(sp, e, word_vec(w), N))

    return LInftyMorphism(src, tgt, fn, F.ctx, name or f"{F.name}^pi"), S


def twist_curved_morphism(F, pi, source=None, target=None, name=None):
    """Curved twist; same formula as twist_morphism, (F^pi)_0 = alpha."""
    return twist_morphism(F, pi, source, target, name)


def curved_flat_correspondence(Q, m):
    """Flat structure Q^m and the bijection pi -> pi - m (inverse pi' -> pi' + m)."""
    rep = check_mc(Q, m)
    if not rep.ok:
        raise ValueError("m is not a Maurer-Cartan element")
    flat = twist_structure(Q, m, f"{Q.name}^m")
    return flat, (lambda pi: sub(pi, m)), (lambda p: add_to(dict(p), m))


def sample(v, t):
    return at_t(v, t)


def scale_t(v, k=1):
    """Multiply a vector by t^k."""
    return {(b, h, kk + k): x for (b, h, kk), x in v.items()}
