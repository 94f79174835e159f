"""Truncated Laurent series in q with exact integer/rational coefficients.

A GradedDim carries its coefficients together with an explicit truncation
bound: coefficients of q^d are stored (and meaningful) only for d <= trunc.
Arithmetic propagates the bound conservatively, so a result never claims
more precision than its inputs support.
"""
from __future__ import annotations

from fractions import Fraction

INF = float("inf")


class GradedDim:
    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs=None, trunc=INF):
        self.trunc = trunc
        self.coeffs = {}
        if coeffs:
            for d, c in coeffs.items():
                if c and d <= trunc:
                    self.coeffs[d] = c

    @classmethod
    def zero(cls, trunc=INF):
        return cls({}, trunc)

    @classmethod
    def one(cls, trunc=INF):
        return cls({0: 1}, trunc)

    @classmethod
    def q_power(cls, n, trunc=INF):
        return cls({n: 1}, trunc)

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def valuation(self):
        return min(self.coeffs) if self.coeffs else INF

    def degree(self):
        return max(self.coeffs) if self.coeffs else -INF

    def __getitem__(self, d):
        if d > self.trunc:
            raise ValueError(f"coefficient of q^{d} requested beyond truncation {self.trunc}")
        return self.coeffs.get(d, 0)

    def __eq__(self, other):
        """Equality of the parts both sides can see."""
        if not isinstance(other, GradedDim):
            return NotImplemented
        cap = min(self.trunc, other.trunc)
        lo = min([d for d in self.coeffs if d <= cap] + [d for d in other.coeffs if d <= cap],
                 default=0)
        d = lo
        keys = set(k for k in self.coeffs if k <= cap) | set(k for k in other.coeffs if k <= cap)
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        trunc = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, 0) + c
        return GradedDim(out, trunc)

    def __neg__(self):
        return GradedDim({d: -c for d, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedDim({d: c * other for d, c in self.coeffs.items()}, self.trunc)
        trunc = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        out = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                if d1 + d2 <= trunc:
                    out[d1 + d2] = out.get(d1 + d2, 0) + c1 * c2
        return GradedDim(out, trunc)

    __rmul__ = __mul__

    def shift(self, n):
        """Multiply by q^n."""
        return GradedDim({d + n: c for d, c in self.coeffs.items()}, self.trunc + n)

    def truncate(self, trunc):
        return GradedDim(self.coeffs, min(self.trunc, trunc))

    def bar(self):
        """q -> 1/q.  Caller must know the data is polynomial (finite module):
        an upper truncation bound turns into a lower one, which this class
        does not track."""
        return GradedDim({-d: c for d, c in self.coeffs.items()}, INF)

    def bar_symmetric(self):
        cap = self.trunc
        return all(self.coeffs.get(-d, 0) == c for d, c in self.coeffs.items()
                   if -d <= cap and d <= cap)

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for d in sorted(self.coeffs):
                c = self.coeffs[d]
                if d == 0:
                    parts.append(f"{c}")
                elif d == 1:
                    parts.append(f"{c}*q" if c != 1 else "q")
                else:
                    parts.append(f"{c}*q^{d}" if c != 1 else f"q^{d}")
            body = " + ".join(parts)
        cap = "" if self.trunc is INF else f" + O(q^{self.trunc + 1})"
        return body + cap

    def to_sorted_pairs(self):
        return [[d, _num(c)] for d, c in sorted(self.coeffs.items())]


def _num(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def geometric(power: int, trunc) -> GradedDim:
    """1/(1 - q^power) expanded up to the truncation bound."""
    if power <= 0:
        raise ValueError("geometric expansion needs a positive power")
    out = {}
    d = 0
    while d <= trunc:
        out[d] = 1
        d += power
    return GradedDim(out, trunc)


def from_pairs(pairs, trunc=INF):
    return GradedDim({d: c for d, c in pairs}, trunc)
