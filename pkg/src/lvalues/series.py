"""Laurent series in t^-1 with tracked precision, and truncated series in T^-1.

A :class:`LaurentSeries` stores ``coeffs[i]`` as the coefficient of
``t^-(lead + i)``.  ``prec = P`` means the value is only known modulo
``t^-(P+1)``; ``prec = None`` marks an exact element with finitely many
terms.  Negative ``lead`` encodes positive powers of t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvZero, PrecisionExhausted
from .exactalg import FieldSpec, Poly, format_monomial


def _min_prec(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


@dataclass(frozen=True)
class LaurentSeries:
    field: FieldSpec
    lead: int
    coeffs: tuple[int, ...]
    prec: int | None = None
    var: str = "t"

    def __post_init__(self):
        c = list(self.coeffs)
        lead = self.lead
        if self.prec is not None:
            keep = self.prec - lead + 1
            if keep < len(c):
                del c[max(keep, 0):]
        start = 0
        while start < len(c) and c[start] == 0:
            start += 1
        c = c[start:]
        lead += start
        while c and c[-1] == 0:
            c.pop()
        if not c:
            lead = 0 if self.prec is None else self.prec + 1
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "lead", lead)

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, field: FieldSpec, prec: int | None = None, var: str = "t") -> "LaurentSeries":
        return cls(field, 0 if prec is None else prec + 1, (), prec, var)

    @classmethod
    def one(cls, field: FieldSpec, var: str = "t") -> "LaurentSeries":
        return cls(field, 0, (1,), None, var)

    @classmethod
    def monomial(cls, field: FieldSpec, power_of_t: int, c: int = 1, var: str = "t") -> "LaurentSeries":
        """c * t^power_of_t, exact."""
        return cls(field, -power_of_t, (c,), None, var)

    @classmethod
    def from_poly(cls, f: Poly | Sequence[int], field: FieldSpec | None = None,
                  var: str = "t") -> "LaurentSeries":
        if isinstance(f, Poly):
            field, coeffs = f.field, f.coeffs
        else:
            coeffs = tuple(f)
        if not coeffs:
            return cls.zero(field, None, var)
        return cls(field, -(len(coeffs) - 1), tuple(reversed(coeffs)), None, var)

    @classmethod
    def from_coeffs(cls, field: FieldSpec, coeffs: Sequence[int], prec: int | None = None,
                    lead: int = 0, var: str = "t") -> "LaurentSeries":
        return cls(field, lead, tuple(coeffs), prec, var)

    # basic queries --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True when no nonzero coefficient is visible."""
        return not self.coeffs

    def val(self) -> int:
        """Certified lower bound on the t^-1 valuation (exact when a coefficient is visible)."""
        if self.coeffs:
            return self.lead
        if self.prec is None:
            raise InvZero("valuation of exact zero")
        return self.prec + 1

    def val_bound(self) -> float:
        """Like val() but returns +inf for the exact zero."""
        if not self.coeffs and self.prec is None:
            return float("inf")
        return self.val()

    def norm(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return Fraction(self.field.q) ** (-self.lead)

    def degree(self) -> int:
        """Degree in t of the leading term; requires a visible coefficient."""
        if not self.coeffs:
            raise InvZero("degree of a series with no visible term")
        return -self.lead

    def __getitem__(self, i: int) -> int:
        """Coefficient of t^-i."""
        if self.prec is not None and i > self.prec:
            raise PrecisionExhausted(f"coefficient t^-{i} beyond precision {self.prec}")
        j = i - self.lead
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def coefficients(self, lo: int, hi: int) -> list[int]:
        """Coefficients of t^-lo .. t^-hi inclusive."""
        return [self[i] for i in range(lo, hi + 1)]

    def leading_coefficient(self) -> int:
        if not self.coeffs:
            raise InvZero("no visible coefficient")
        return self.coeffs[0]

    def _like(self, lead, coeffs, prec) -> "LaurentSeries":
        return LaurentSeries(self.field, lead, tuple(coeffs), prec, self.var)

    # arithmetic -----------------------------------------------------------
    def truncate(self, prec: int) -> "LaurentSeries":
        """Forget everything beyond t^-prec (never claims more than already known)."""
        p = prec if self.prec is None else min(prec, self.prec)
        return self._like(self.lead, self.coeffs, p)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        F = self.field
        prec = _min_prec(self.prec, other.prec)
        if not self.coeffs:
            return other.truncate(prec) if prec is not None else other
        if not other.coeffs:
            return self.truncate(prec) if prec is not None else self
        lo = min(self.lead, other.lead)
        hi = max(self.lead + len(self.coeffs), other.lead + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec + 1)
        if hi <= lo:
            return LaurentSeries.zero(F, prec, self.var)
        out = [0] * (hi - lo)
        for src in (self, other):
            off = src.lead - lo
            add = F._add
            for i, c in enumerate(src.coeffs):
                k = off + i
                if k >= len(out):
                    break
                if c:
                    out[k] = add[out[k]][c]
        return self._like(lo, out, prec)

    def __neg__(self) -> "LaurentSeries":
        neg = self.field._neg
        return self._like(self.lead, [neg[c] for c in self.coeffs], self.prec)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, c: int) -> "LaurentSeries":
        if c == 0:
            return LaurentSeries.zero(self.field, self.prec, self.var)
        m = self.field._mul[c]
        return self._like(self.lead, [m[x] for x in self.coeffs], self.prec)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k."""
        prec = None if self.prec is None else self.prec - k
        lead = self.lead - k if self.coeffs else (0 if prec is None else prec + 1)
        return self._like(lead, self.coeffs, prec)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        F = self.field
        pa, pb = self.prec, other.prec
        va, vb = self.val_bound(), other.val_bound()
        bounds = []
        if pb is not None:
            bounds.append(va + pb)
        if pa is not None:
            bounds.append(vb + pa)
        prec = min(bounds) if bounds else None
        if prec == float("inf"):
            prec = None
        if not self.coeffs or not other.coeffs:
            return LaurentSeries.zero(F, prec, self.var)
        lead = self.lead + other.lead
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            n = min(n, prec - lead + 1)
        if n <= 0:
            return LaurentSeries.zero(F, prec, self.var)
        out = [0] * n
        add, mul = F._add, F._mul
        b = other.coeffs
        for i, x in enumerate(self.coeffs):
            if i >= n:
                break
            if not x:
                continue
            mx = mul[x]
            lim = min(len(b), n - i)
            for j in range(lim):
                y = b[j]
                if y:
                    k = i + j
                    out[k] = add[out[k]][mx[y]]
        return self._like(lead, out, prec)

    def inverse(self, prec: int | None = None) -> "LaurentSeries":
        """1/self to the maximal provable precision (or ``prec`` if smaller / self exact)."""
        if not self.coeffs:
            raise InvZero("inverse of a series with no visible nonzero coefficient")
        v = self.lead
        if self.prec is None:
            if prec is None:
                if len(self.coeffs) == 1:
                    F = self.field
                    return self._like(-v, [F.inv(self.coeffs[0])], None)
                raise PrecisionExhausted("exact inverse of a non-monomial needs a target precision")
            target = prec
        else:
            target = self.prec - 2 * v
            if prec is not None:
                target = min(target, prec)
        n = target + v + 1  # number of coefficients of the result
        if n <= 0:
            raise PrecisionExhausted("inverse carries no certified coefficients")
        F = self.field
        a = self.coeffs
        inv0 = F.inv(a[0])
        out = [0] * n
        add, mul = F._add, F._mul
        for k in range(n):
            s = 1 if k == 0 else 0
            # s = delta_k - sum_{j=1..k} a_j out_{k-j}
            for j in range(1, min(k, len(a) - 1) + 1):
                if a[j] and out[k - j]:
                    s = F._sub[s][mul[a[j]][out[k - j]]]
            out[k] = mul[s][inv0]
        return self._like(-v, out, target)

    def __truediv__(self, other: "LaurentSeries") -> "LaurentSeries":
        if self.prec is None:
            return self * other.inverse()
        return self * other.inverse(self.prec - self.val() - other.val())

    def qpower(self, q: int | None = None) -> "LaurentSeries":
        """self^q for q a power of the field size: coefficients fixed, exponents scaled."""
        F = self.field
        q = F.q if q is None else q
        if q % F.q:
            raise ValueError("q must be a power of the field size")
        prec = None if self.prec is None else q * (self.prec + 1) - 1
        if not self.coeffs:
            return LaurentSeries.zero(F, prec, self.var)
        out = [0] * ((len(self.coeffs) - 1) * q + 1)
        for i, c in enumerate(self.coeffs):
            out[i * q] = c
        return self._like(self.lead * q, out, prec)

    # comparison helpers ---------------------------------------------------
    def agrees(self, other: "LaurentSeries", upto: int) -> bool:
        """Coefficient equality for every power t^k with k >= -upto."""
        lo = min(self.lead if self.coeffs else upto + 1, other.lead if other.coeffs else upto + 1)
        return all(self[i] == other[i] for i in range(lo, upto + 1))

    def polynomial_part(self) -> list[int]:
        """Coefficients of t^0, t^1, ... (low first) of the nonnegative-power part."""
        if not self.coeffs or self.lead > 0:
            return []
        return [self[-k] for k in range(0, -self.lead + 1)]

    def fractional_part(self) -> "LaurentSeries":
        """Drop all nonnegative powers of t (reduction modulo k[t])."""
        if not self.coeffs or self.lead >= 1:
            return self
        cut = 1 - self.lead
        return self._like(1, self.coeffs[cut:], self.prec)

    def with_var(self, var: str) -> "LaurentSeries":
        return LaurentSeries(self.field, self.lead, self.coeffs, self.prec, var)

    def __str__(self) -> str:
        F = self.field
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                k = -(self.lead + i)
                terms.append(format_monomial(F, c, [(self.var, k)]) if k else F.format_scalar(c))
        body = " + ".join(terms) if terms else "0"
        if self.prec is not None:
            body += f" + O({self.var}^{-(self.prec + 1)})"
        return body


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncSeries:
    """sum c_i T^-i modulo T^-N (equally: an element of k[[Z]]/Z^N)."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @classmethod
    def one(cls, field: FieldSpec, N: int) -> "TruncSeries":
        return cls(field, tuple([1] + [0] * (N - 1)))

    @classmethod
    def from_list(cls, field: FieldSpec, coeffs: Sequence[int], N: int | None = None) -> "TruncSeries":
        c = list(coeffs)
        if N is not None:
            c = (c + [0] * N)[:N]
        return cls(field, tuple(c))

    def _check(self, other: "TruncSeries"):
        if other.field is not self.field or other.N != self.N:
            raise ValueError("incompatible truncated series")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        F = self.field
        return TruncSeries(F, tuple(F.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        F = self.field
        return TruncSeries(F, tuple(F.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncSeries":
        F = self.field
        return TruncSeries(F, tuple(F.neg(a) for a in self.coeffs))

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.field, tuple(ts_mul(self.field, self.coeffs, other.coeffs)))

    def inverse(self) -> "TruncSeries":
        if not self.coeffs or self.coeffs[0] == 0:
            raise InvZero("truncated series without unit constant term")
        return TruncSeries(self.field, tuple(ts_inv(self.field, self.coeffs)))

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        return self * other.inverse()

    def val(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise PrecisionExhausted("no visible nonzero coefficient")

    def truncate(self, N: int) -> "TruncSeries":
        if N > self.N:
            raise PrecisionExhausted(f"cannot raise precision from {self.N} to {N}")
        return TruncSeries(self.field, self.coeffs[:N])

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def machine(self) -> str:
        return "[" + ", ".join(self.field.format_scalar(c) for c in self.coeffs) + "]"

    def display(self, var: str = "T") -> str:
        F = self.field
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(F.format_scalar(c) if i == 0 else
                             format_monomial(F, c, [(var, 1)]).replace(var, f"{var}^-{i}"))
        return " + ".join(terms) if terms else "0"

    def __str__(self) -> str:
        return self.display()


def ts_mul(F: FieldSpec, a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = len(a)
    out = [0] * n
    add, mul = F._add, F._mul
    for i, x in enumerate(a):
        if x:
            mx = mul[x]
            for j in range(n - i):
                y = b[j]
                if y:
                    out[i + j] = add[out[i + j]][mx[y]]
    return out


def ts_inv(F: FieldSpec, a: Sequence[int]) -> list[int]:
    n = len(a)
    inv0 = F.inv(a[0])
    out = [0] * n
    for k in range(n):
        s = 1 if k == 0 else 0
        for j in range(1, k + 1):
            if a[j] and out[k - j]:
                s = F._sub[s][F._mul[a[j]][out[k - j]]]
        out[k] = F._mul[s][inv0]
    return out


def iota(x: LaurentSeries | Poly, N: int) -> tuple[Poly, TruncSeries]:
    """Transport t -> T: returns (part with positive powers of T, series part mod T^-N)."""
    if isinstance(x, Poly):
        x = LaurentSeries.from_poly(x)
    if x.prec is not None and x.prec < N - 1:
        raise PrecisionExhausted(f"need coefficients down to t^-{N - 1}, have {x.prec}")
    top = -x.lead if x.coeffs else 0
    poly = Poly(x.field, tuple([0] + [x[-k] for k in range(1, top + 1)]), "T")
    series = TruncSeries(x.field, tuple(x[i] for i in range(N)))
    return poly, series


def iota_laurent(x: LaurentSeries) -> LaurentSeries:
    return x.with_var("T")


def monic_normalize(x):
    """Scale a TruncSeries, LaurentSeries or Poly so its leading coefficient is 1."""
    F = x.field
    if isinstance(x, TruncSeries):
        lc = x.coeffs[x.val()]
        m = F.inv(lc)
        return TruncSeries(F, tuple(F.mul(c, m) for c in x.coeffs))
    if isinstance(x, LaurentSeries):
        return x.scale(F.inv(x.leading_coefficient()))
    if isinstance(x, Poly):
        if x.is_zero():
            raise InvZero("zero polynomial has no monic representative")
        return x.monic()
    raise TypeError(type(x))
