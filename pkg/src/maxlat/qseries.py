"""Truncated q-expansions with exact rational coefficients.

A :class:`QSeries` stores coefficients on the exponent lattice (1/denom)·Z as a
sparse map ``numerator -> Fraction`` together with an exclusive precision bound
``prec`` on the numerator: the expansion is known exactly for all exponents
``n/denom`` with ``0 <= n < prec``.  Arithmetic tracks precision pessimistically
so results are always fully correct in their stated range.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class QSeries:
    denom: int
    prec: int
    coeffs: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        assert self.denom >= 1 and self.prec >= 1
        clean = {int(n): Fraction(c) for n, c in self.coeffs.items() if c != 0}
        assert all(0 <= n < self.prec for n in clean), "stored numerators must lie below prec"
        object.__setattr__(self, "coeffs", clean)

    # -- accessors ---------------------------------------------------------

    def coeff(self, numer: int) -> Fraction:
        """Coefficient at exponent numer/denom (numer must be < prec)."""
        assert 0 <= numer < self.prec, f"coefficient {numer} outside precision {self.prec}"
        return self.coeffs.get(numer, Fraction(0))

    def coeff_at_q(self, n: int) -> Fraction:
        """Coefficient of q^n (integer exponent)."""
        return self.coeff(n * self.denom)

    def coeff_list(self, upto: "int | None" = None) -> list[Fraction]:
        """Dense coefficient list a_0..a_{upto-1} by numerator."""
        P = self.prec if upto is None else upto
        assert P <= self.prec
        return [self.coeffs.get(n, Fraction(0)) for n in range(P)]

    @property
    def valuation(self) -> "int | None":
        """Smallest numerator with a nonzero coefficient (None if 0 to prec)."""
        return min(self.coeffs) if self.coeffs else None

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_list(coeffs, prec: "int | None" = None, denom: int = 1) -> "QSeries":
        cl = list(coeffs)
        P = len(cl) if prec is None else prec
        return QSeries(denom, P, {n: Fraction(c) for n, c in enumerate(cl) if c})

    @staticmethod
    def one(prec: int, denom: int = 1) -> "QSeries":
        return QSeries(denom, prec, {0: Fraction(1)})

    @staticmethod
    def zero(prec: int, denom: int = 1) -> "QSeries":
        return QSeries(denom, prec, {})

    # -- rescaling ---------------------------------------------------------

    def with_denom(self, new_denom: int) -> "QSeries":
        """Re-express on the finer exponent lattice (1/new_denom)·Z."""
        assert new_denom % self.denom == 0
        f = new_denom // self.denom
        if f == 1:
            return self
        return QSeries(new_denom, self.prec * f, {n * f: c for n, c in self.coeffs.items()})

    def reduced(self) -> "QSeries":
        """Shrink denom to the minimal exponent lattice containing the support."""
        g = self.denom
        for n in self.coeffs:
            g = gcd(g, n)
        if g <= 1:
            return self
        return QSeries(self.denom // g, (self.prec + g - 1) // g, {n // g: c for n, c in self.coeffs.items()})

    def truncate(self, prec: int) -> "QSeries":
        assert 1 <= prec <= self.prec
        return QSeries(self.denom, prec, {n: c for n, c in self.coeffs.items() if n < prec})

    # -- arithmetic --------------------------------------------------------

    def _aligned(self, other: "QSeries") -> tuple["QSeries", "QSeries"]:
        d = self.denom * other.denom // gcd(self.denom, other.denom)
        return self.with_denom(d), other.with_denom(d)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries(self.denom, self.prec, {0: Fraction(other)})
        a, b = self._aligned(other)
        P = min(a.prec, b.prec)
        out = {n: c for n, c in a.coeffs.items() if n < P}
        for n, c in b.coeffs.items():
            if n < P:
                out[n] = out.get(n, Fraction(0)) + c
        return QSeries(a.denom, P, out)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.denom, self.prec, {n: -c for n, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, QSeries) else QSeries(self.denom, self.prec, {0: -Fraction(other)}))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return QSeries(self.denom, self.prec, {n: c * v for n, v in self.coeffs.items()})
        a, b = self._aligned(other)
        P = min(a.prec, b.prec)
        out: dict[int, Fraction] = {}
        for n1, c1 in a.coeffs.items():
            if n1 >= P:
                continue
            for n2, c2 in b.coeffs.items():
                n = n1 + n2
                if n < P:
                    out[n] = out.get(n, Fraction(0)) + c1 * c2
        return QSeries(a.denom, P, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        assert isinstance(other, (int, Fraction)) and other != 0
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, e: int):
        assert isinstance(e, int) and e >= 0
        out = QSeries.one(self.prec, self.denom)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def eq_to_prec(self, other: "QSeries", prec_q: "int | None" = None) -> bool:
        """Compare as q-expansions on the shared known range (in q-exponents)."""
        a, b = self.reduced()._aligned(other.reduced())
        P = min(a.prec, b.prec)
        if prec_q is not None:
            P = min(P, prec_q * a.denom)
        return all(a.coeffs.get(n, 0) == b.coeffs.get(n, 0) for n in range(P))

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        items = {str(n): str(self.coeffs[n]) for n in sorted(self.coeffs)}
        return json.dumps({"denom": self.denom, "prec": self.prec, "coeffs": items})

    @staticmethod
    def from_json(text: str) -> "QSeries":
        obj = json.loads(text)
        return QSeries(
            int(obj["denom"]),
            int(obj["prec"]),
            {int(n): Fraction(s) for n, s in obj["coeffs"].items()},
        )

    def __repr__(self):
        terms = []
        for n in sorted(self.coeffs)[:8]:
            q = f"q^{Fraction(n, self.denom)}" if n else ""
            terms.append(f"{self.coeffs[n]}{'*' if q else ''}{q}")
        tail = " + ..." if len(self.coeffs) > 8 else ""
        return f"QSeries({' + '.join(terms) or '0'}{tail} + O(q^{Fraction(self.prec, self.denom)}))"


def sigma(n: int, k: int) -> int:
    """Divisor power sum sigma_k(n); 0 for n <= 0 by convention."""
    if n <= 0:
        return 0
    return sum(d**k for d in range(1, n + 1) if n % d == 0)
