"""Exact scalars: rationals, the truncated ring Q[hbar]/(hbar^(N+1)) and its t-extension."""

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

qq = gmpy2.mpq
ZERO = qq(0)
ONE = qq(1)


def to_q(x):
    """Coerce int, Fraction, mpq or a 'p/q' string into an exact rational."""
    if isinstance(x, type(ZERO)):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return qq(x)
    if isinstance(x, Fraction):
        return qq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational")
        if "/" in s:
            p, q = s.split("/", 1)
            den = int(q)
            if den == 0:
                raise ValueError(f"zero denominator in {x!r}")
            return qq(int(p), den)
        return qq(int(s))
    raise TypeError(f"cannot read {x!r} as a rational")


def fmt_q(x):
    x = to_q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Context:
    """Truncation data: hbar-order N (work mod hbar^(N+1)) and weight cap W."""

    N: int = 3
    W: int = 4

    def __post_init__(self):
        if self.N < 0 or self.W < 0:
            raise ValueError("hbar order and weight cap must be non-negative")


class Scalar:
    """Element of Q[hbar]/(hbar^(N+1)), stored as a coefficient list."""

    __slots__ = ("coeffs", "N")

    def __init__(self, coeffs, N):
        cs = [to_q(c) for c in coeffs][: N + 1]
        cs += [ZERO] * (N + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.N = N

    @classmethod
    def hbar(cls, N, power=1):
        cs = [ZERO] * (N + 1)
        if power <= N:
            cs[power] = ONE
        return cls(cs, N)

    def _lift(self, other):
        if isinstance(other, Scalar):
            if other.N != self.N:
                raise ValueError("mixed truncation orders")
            return other
        return Scalar([other], self.N)

    def __add__(self, other):
        o = self._lift(other)
        return Scalar([a + b for a, b in zip(self.coeffs, o.coeffs)], self.N)

    __radd__ = __add__

    def __neg__(self):
        return Scalar([-a for a in self.coeffs], self.N)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out = [ZERO] * (self.N + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(self.N + 1 - i):
                out[i + j] += a * o.coeffs[j]
        return Scalar(out, self.N)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.N))

    def order(self):
        """hbar-adic valuation (N+1 for zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.N + 1

    def inverse(self):
        if not self.coeffs[0]:
            raise ZeroDivisionError("not a unit in Q[hbar]/(hbar^(N+1))")
        inv = [ZERO] * (self.N + 1)
        inv[0] = 1 / self.coeffs[0]
        for n in range(1, self.N + 1):
            s = sum((self.coeffs[j] * inv[n - j] for j in range(1, n + 1)), ZERO)
            inv[n] = -s * inv[0]
        return Scalar(inv, self.N)

    def __repr__(self):
        terms = [f"{fmt_q(c)}*h^{i}" for i, c in enumerate(self.coeffs) if c]
        return "Scalar(" + (" + ".join(terms) or "0") + ")"


class TScalar:
    """Element of Q[hbar,t]/(hbar^(N+1)); dict (hbar power, t power) -> rational."""

    __slots__ = ("terms", "N")

    def __init__(self, terms, N):
        self.N = N
        self.terms = {k: to_q(v) for k, v in terms.items() if k[0] <= N and to_q(v)}

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return TScalar(out, self.N)

    def __mul__(self, other):
        out = {}
        for (h1, k1), a in self.terms.items():
            for (h2, k2), b in other.terms.items():
                if h1 + h2 <= self.N:
                    key = (h1 + h2, k1 + k2)
                    out[key] = out.get(key, ZERO) + a * b
        return TScalar(out, self.N)

    def at(self, t):
        t = to_q(t)
        cs = [ZERO] * (self.N + 1)
        for (h, k), v in self.terms.items():
            cs[h] += v * t**k
        return Scalar(cs, self.N)

    def derivative(self):
        return TScalar({(h, k - 1): v * k for (h, k), v in self.terms.items() if k}, self.N)

    def __eq__(self, other):
        return isinstance(other, TScalar) and self.terms == other.terms

    def __repr__(self):
        return f"TScalar({self.terms})"
