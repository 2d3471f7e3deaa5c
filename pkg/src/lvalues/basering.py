"""The coefficient ring R = k[t][y]/(g) and its completion K_inf in coordinates.

R is free over k[t] on 1, y, ..., y^(d-1).  ``g = y`` (d = 1) encodes k[t].
K_inf = R (x) k((t^-1)) is handled purely through coordinates on the same
basis, so t, y and the q-power Frobenius all act exactly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError
from .exactalg import (ExtField, FieldSpec, Poly, char_poly, factor_list, format_monomial, format_poly,
                       irreducibles_of_degree, mat_zero, p_add, p_deriv, p_divmod, p_gcd, p_key,
                       p_mod, p_mul, p_qpower, p_sub, p_trim, parse_terms)
from .series import LaurentSeries

KPoly = list  # coefficient list over k, low first


class BaseRing:
    def __init__(self, spec: FieldSpec, g: Sequence[Sequence[int]]):
        """``g[j]`` is the k[t]-coefficient (low-first list) of y^j; g must be monic in y."""
        g = [p_trim(list(c)) for c in g]
        while g and not g[-1]:
            g.pop()
        if not g or g[-1] != [1]:
            raise ConfigError("extension polynomial must be monic in y")
        self.spec = spec
        self.q = spec.q
        self.g = g
        self.d = len(g) - 1
        if self.d < 1:
            raise ConfigError("extension polynomial must have positive y-degree")
        if self.d > 1 and not _squarefree_in_y(spec, g):
            raise ConfigError("extension polynomial is not squarefree over k(t)")
        self._ypow: dict[int, list[KPoly]] = {}
        # bookkeeping for valuation-loss bounds
        self.mul_loss = max((max((len(c) - 1 for c in self.y_power(k)), default=0)
                             for k in range(2 * self.d - 1)), default=0)
        self.tau_loss = max(max((len(c) - 1 for c in self.y_power(j * self.q)), default=0)
                            for j in range(self.d))

    @classmethod
    def polynomial_ring(cls, spec: FieldSpec) -> "BaseRing":
        return cls(spec, [[], [1]])

    def __repr__(self) -> str:
        return f"BaseRing({self.spec!r}, g = {self.format_g()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BaseRing) and other.spec is self.spec and other.g == self.g

    def __hash__(self) -> int:
        return hash((self.spec.p, self.spec.e, tuple(tuple(c) for c in self.g)))

    def format_g(self) -> str:
        if self.d == 1 and not self.g[0]:
            return "none"
        return _format_ty(self.spec, {(a, j): c for j, poly in enumerate(self.g)
                                      for a, c in enumerate(poly) if c})

    # y-power reduction ------------------------------------------------------
    def y_power(self, n: int) -> list[KPoly]:
        """Coordinates of y^n mod g as d polynomials in t."""
        if n in self._ypow:
            return self._ypow[n]
        F = self.spec
        d = self.d
        if n < d:
            out = [[] for _ in range(d)]
            out[n] = [1]
        else:
            prev = self.y_power(n - 1)
            # y * prev: shift, then replace y^d by -(g_0 + ... + g_{d-1} y^{d-1})
            top = prev[d - 1]
            out = [[]] + [list(c) for c in prev[:d - 1]]
            if top:
                for j in range(d):
                    out[j] = p_sub(F, out[j], p_mul(F, top, self.g[j]))
        self._ypow[n] = out
        return out

    # ring elements ------------------------------------------------------------
    def element(self, coords: Sequence[Sequence[int]]) -> "RingElement":
        c = [p_trim(list(x)) for x in coords]
        c += [[] for _ in range(self.d - len(c))]
        if len(c) > self.d:
            return self.reduce_terms({(a, j): v for j, poly in enumerate(c) for a, v in enumerate(poly) if v})
        return RingElement(self, tuple(tuple(x) for x in c))

    def from_poly(self, f: Poly | Sequence[int]) -> "RingElement":
        coeffs = f.coeffs if isinstance(f, Poly) else f
        return self.element([list(coeffs)])

    def one(self) -> "RingElement":
        return self.from_poly([1])

    def zero(self) -> "RingElement":
        return self.element([])

    def t(self) -> "RingElement":
        return self.from_poly([0, 1])

    def y(self) -> "RingElement":
        if self.d == 1:
            return self.from_poly([c for c in p_sub(self.spec, [], self.g[0])])
        return self.element([[], [1]])

    def reduce_terms(self, terms: dict[tuple[int, int], int]) -> "RingElement":
        """Reduce sum c * t^a * y^j (any j) modulo g."""
        F = self.spec
        out: list[KPoly] = [[] for _ in range(self.d)]
        for (a, j), c in terms.items():
            mono = [0] * a + [c]
            for l, cl in enumerate(self.y_power(j)):
                if cl:
                    out[l] = p_add(F, out[l], p_mul(F, mono, cl))
        return RingElement(self, tuple(tuple(x) for x in out))

    def parse(self, text: str) -> "RingElement":
        return self.reduce_terms(parse_terms(self.spec, text, ["t", "y"]))

    def random_element(self, rng, max_deg: int) -> "RingElement":
        return self.element([[rng.randrange(self.q) for _ in range(rng.randint(0, max_deg + 1))]
                             for _ in range(self.d)])

    # K_inf ---------------------------------------------------------------------
    def kinf(self, coords: Sequence[LaurentSeries]) -> "KInfElement":
        if len(coords) != self.d:
            raise ValueError(f"expected {self.d} coordinates")
        return KInfElement(self, tuple(coords))

    def kinf_zero(self, prec: int | None = None) -> "KInfElement":
        return KInfElement(self, tuple(LaurentSeries.zero(self.spec, prec) for _ in range(self.d)))

    def kinf_monomial(self, power_of_t: int, j: int, c: int = 1) -> "KInfElement":
        """c * t^power * y^j, exact."""
        z = LaurentSeries.zero(self.spec)
        coords = [z] * self.d
        coords[j] = LaurentSeries.monomial(self.spec, power_of_t, c)
        return KInfElement(self, tuple(coords))

    def embed(self, r: "RingElement") -> "KInfElement":
        return KInfElement(self, tuple(LaurentSeries.from_poly(list(c), self.spec) for c in r.coords))

    @functools.cached_property
    def tau_table(self) -> list[list[LaurentSeries]]:
        """tau_table[j][l]: coordinate l of y^(j q), as exact Laurent polynomials."""
        return [[LaurentSeries.from_poly(c, self.spec) for c in self.y_power(j * self.q)]
                for j in range(self.d)]

    @functools.cached_property
    def mul_table(self) -> list[list[LaurentSeries]]:
        return [[LaurentSeries.from_poly(c, self.spec) for c in self.y_power(k)]
                for k in range(2 * self.d - 1)]


def _squarefree_in_y(spec: FieldSpec, g: list[KPoly]) -> bool:
    """g is squarefree over k(t) iff some specialisation t -> P stays squarefree of full degree."""
    d = len(g) - 1
    deg_t = max(len(c) - 1 for c in g)
    bound = (2 * d - 1) * max(deg_t, 0) + 1
    for deg in range(1, bound + 1):
        for P in irreducibles_of_degree(spec, deg):
            E = ExtField(spec, P.coeffs)
            gy = [E.from_poly(c) for c in g]
            dgy = p_deriv(E, gy)
            if dgy and len(p_gcd(E, gy, dgy)) == 1:
                return True
    return False


def _format_ty(spec: FieldSpec, terms: dict[tuple[int, int], int]) -> str:
    keys = sorted(terms, key=lambda k: (-k[1], -k[0]))
    parts = [format_monomial(spec, terms[k], [("t", k[0]), ("y", k[1])]) for k in keys]
    return " + ".join(parts) if parts else "0"


def ring_make(spec: FieldSpec, g: str | Sequence[Sequence[int]] | None = None) -> BaseRing:
    """Build R from ``g`` given as text in t, y (``None``/``"none"`` means k[t])."""
    if g is None or (isinstance(g, str) and g.strip().lower() in ("none", "y", "")):
        return BaseRing.polynomial_ring(spec)
    if isinstance(g, str):
        terms = parse_terms(spec, g, ["t", "y"])
        if not terms:
            raise ConfigError("extension polynomial is zero")
        d = max(j for _, j in terms)
        coeffs: list[KPoly] = [[] for _ in range(d + 1)]
        for (a, j), c in terms.items():
            poly = coeffs[j] + [0] * (a + 1 - len(coeffs[j]))
            poly[a] = c
            coeffs[j] = poly
        return BaseRing(spec, coeffs)
    return BaseRing(spec, g)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingElement:
    ring: BaseRing
    coords: tuple[tuple[int, ...], ...]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "RingElement") -> "RingElement":
        F = self.ring.spec
        return RingElement(self.ring, tuple(tuple(p_add(F, a, b)) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "RingElement") -> "RingElement":
        F = self.ring.spec
        return RingElement(self.ring, tuple(tuple(p_sub(F, a, b)) for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "RingElement":
        return self.ring.zero() - self

    def __mul__(self, other: "RingElement") -> "RingElement":
        R = self.ring
        F = R.spec
        out: list[KPoly] = [[] for _ in range(R.d)]
        for a, x in enumerate(self.coords):
            if not x:
                continue
            for b, z in enumerate(other.coords):
                if not z:
                    continue
                xz = p_mul(F, x, z)
                for l, c in enumerate(R.y_power(a + b)):
                    if c:
                        out[l] = p_add(F, out[l], p_mul(F, xz, c))
        return RingElement(R, tuple(tuple(x) for x in out))

    def frobenius(self, times: int = 1) -> "RingElement":
        """self^(q^times)."""
        r = self
        R = self.ring
        F = R.spec
        for _ in range(times):
            out: list[KPoly] = [[] for _ in range(R.d)]
            for j, c in enumerate(r.coords):
                if not c:
                    continue
                cq = p_qpower(F, list(c), R.q)
                for l, yl in enumerate(R.y_power(j * R.q)):
                    if yl:
                        out[l] = p_add(F, out[l], p_mul(F, cq, yl))
            r = RingElement(R, tuple(tuple(x) for x in out))
        return r

    def t_degree(self) -> int:
        """Max t-degree over coordinates (-1 for zero)."""
        return max(len(c) - 1 for c in self.coords)

    def mul_loss(self) -> int:
        """Bound on the valuation drop of multiplying a K_inf element by self."""
        R = self.ring
        worst = 0
        for a, x in enumerate(self.coords):
            if not x:
                continue
            for b in range(R.d):
                for c in R.y_power(a + b):
                    if c:
                        worst = max(worst, len(x) - 1 + len(c) - 1)
        return worst

    def __str__(self) -> str:
        R = self.ring
        terms = {(a, j): c for j, poly in enumerate(self.coords) for a, c in enumerate(poly) if c}
        return _format_ty(R.spec, terms)


@dataclass(frozen=True)
class KInfElement:
    """Element of K_inf: one Laurent series in t^-1 per basis vector y^j."""

    ring: BaseRing
    coords: tuple[LaurentSeries, ...]

    def __add__(self, other: "KInfElement") -> "KInfElement":
        return KInfElement(self.ring, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "KInfElement") -> "KInfElement":
        return KInfElement(self.ring, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "KInfElement":
        return KInfElement(self.ring, tuple(-a for a in self.coords))

    def scale(self, s: LaurentSeries) -> "KInfElement":
        """Multiply by a scalar of k((t^-1))."""
        return KInfElement(self.ring, tuple(a * s for a in self.coords))

    def scale_k(self, c: int) -> "KInfElement":
        return KInfElement(self.ring, tuple(a.scale(c) for a in self.coords))

    def shift(self, k: int) -> "KInfElement":
        return KInfElement(self.ring, tuple(a.shift(k) for a in self.coords))

    def __mul__(self, other: "KInfElement | RingElement") -> "KInfElement":
        R = self.ring
        if isinstance(other, RingElement):
            other = R.embed(other)
        if R.d == 1:
            return KInfElement(R, (self.coords[0] * other.coords[0],))
        table = R.mul_table
        acc: list[LaurentSeries | None] = [None] * R.d
        for a, x in enumerate(self.coords):
            if x.is_zero() and x.exact:
                continue
            for b, z in enumerate(other.coords):
                if z.is_zero() and z.exact:
                    continue
                xz = x * z
                for l, c in enumerate(table[a + b]):
                    if c.is_zero():
                        continue
                    term = xz * c
                    acc[l] = term if acc[l] is None else acc[l] + term
        zero = LaurentSeries.zero(R.spec, self.prec_bound(other))
        return KInfElement(R, tuple(zero if v is None else v for v in acc))

    def prec(self) -> int | None:
        ps = [c.prec for c in self.coords if c.prec is not None]
        return min(ps) if ps else None

    def prec_bound(self, other: "KInfElement") -> int | None:
        ps = [p for p in (self.prec(), other.prec()) if p is not None]
        return min(ps) if ps else None

    def tau(self, times: int = 1) -> "KInfElement":
        """Coordinatewise q-power Frobenius, applied ``times`` times."""
        x = self
        R = self.ring
        for _ in range(times):
            if R.d == 1:
                x = KInfElement(R, (x.coords[0].qpower(),))
                continue
            acc: list[LaurentSeries | None] = [None] * R.d
            for j, c in enumerate(x.coords):
                if c.is_zero() and c.exact:
                    continue
                cq = c.qpower()
                for l, yl in enumerate(R.tau_table[j]):
                    if yl.is_zero():
                        continue
                    term = cq * yl
                    acc[l] = term if acc[l] is None else acc[l] + term
            zero = LaurentSeries.zero(R.spec, None if x.prec() is None else x.prec() * R.q)
            x = KInfElement(R, tuple(zero if v is None else v for v in acc))
        return x

    def val(self) -> float:
        """Minimum coordinate valuation (+inf for exact zero)."""
        return min(c.val_bound() for c in self.coords)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def truncate(self, prec: int) -> "KInfElement":
        return KInfElement(self.ring, tuple(c.truncate(prec) for c in self.coords))

    def fractional_part(self) -> "KInfElement":
        """Image in K_inf/R: drop nonnegative powers of t in every coordinate."""
        return KInfElement(self.ring, tuple(c.fractional_part() for c in self.coords))

    def coefficient_vector(self, lo: int, hi: int) -> list[int]:
        """Coefficients of t^-m y^j for lo <= m <= hi, ordered j-major."""
        return [c for s in self.coords for c in s.coefficients(lo, hi)]

    def __str__(self) -> str:
        parts = []
        for j, c in enumerate(self.coords):
            if not c.is_zero():
                parts.append(f"({c})" + ("" if j == 0 else ("*y" if j == 1 else f"*y^{j}")))
        if parts:
            return " + ".join(parts)
        P = self.prec()
        return "0" if P is None else f"O(t^{-(P + 1)})"


# ---------------------------------------------------------------------------
# maximal ideals and residue fields


@dataclass(frozen=True)
class MaxIdeal:
    P: Poly
    h: tuple  # monic irreducible factor of g mod P, coefficients in ExtField(P)
    deg_k: int
    ring_degree: int = 1

    def sort_key(self) -> tuple:
        E = ExtField(self.P.field, self.P.coeffs)
        return (self.deg_k, self.P.sort_key(), p_key(E, list(self.h)))

    def __str__(self) -> str:
        if self.ring_degree == 1:
            return f"({self.P})"
        F = self.P.field
        terms = []
        for j, c in reversed(list(enumerate(self.h))):
            cs = format_poly(F, p_trim(list(c)))
            if cs == "0":
                continue
            mono = "" if j == 0 else ("y" if j == 1 else f"y^{j}")
            if not mono:
                terms.append(f"({cs})" if "+" in cs else cs)
            else:
                terms.append(mono if cs == "1" else (f"({cs})*{mono}" if "+" in cs else f"{cs}*{mono}"))
        return f"({self.P}, {' + '.join(terms)})"


def ideals_over(R: BaseRing, P: Poly) -> list[MaxIdeal]:
    E = ExtField(R.spec, P.coeffs)
    gy = [E.from_poly(c) for c in R.g]
    out = []
    for h, _mult in factor_list(E, gy):
        out.append(MaxIdeal(P, tuple(h), (len(P.coeffs) - 1) * (len(h) - 1), R.d))
    return out


def max_ideals_up_to(R: BaseRing, D: int) -> list[MaxIdeal]:
    """All maximal ideals of residue degree <= D, each once, canonically ordered."""
    if D < 1:
        raise ValueError("degree bound must be >= 1")
    out = []
    for deg in range(1, D + 1):
        for P in irreducibles_of_degree(R.spec, deg):
            out.extend(m for m in ideals_over(R, P) if m.deg_k <= D)
    return sorted(out, key=MaxIdeal.sort_key)


class ResidueField:
    """R/m as a k-vector space with basis t^a y^b (index b*f1 + a)."""

    def __init__(self, R: BaseRing, m: MaxIdeal):
        self.ring = R
        self.ideal = m
        self.F1 = ExtField(R.spec, m.P.coeffs)
        self.h = [tuple(c) for c in m.h]
        self.f1 = self.F1.f
        self.f2 = len(self.h) - 1
        self.dim = self.f1 * self.f2
        self.spec = R.spec
        basis = [self._basis(i) for i in range(self.dim)]
        self._basis_elems = basis
        self.t_mat = self.mul_matrix(R.t())
        self.tau_mat = self._frobenius_matrix()

    # element arithmetic: lists of F1 elements of length f2
    def _basis(self, i: int) -> list:
        b, a = divmod(i, self.f1)
        el = [self.F1.zero] * self.f2
        c = [0] * self.f1
        c[a] = 1
        el[b] = tuple(c)
        return el

    def _reduce(self, poly: list) -> list:
        F1 = self.F1
        r = p_mod(F1, poly, self.h) if len(self.h) > 1 else []
        return list(r) + [F1.zero] * (self.f2 - len(r))

    def _mul(self, x: list, z: list) -> list:
        F1 = self.F1
        return self._reduce(p_mul(F1, _trim(F1, x), _trim(F1, z)))

    def _pow(self, x: list, n: int) -> list:
        result = self._reduce([self.F1.one])
        base = x
        while n:
            if n & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            n >>= 1
        return result

    def _flatten(self, x: list) -> list[int]:
        return [c for el in x for c in el]

    def embed(self, r: RingElement) -> list:
        F1 = self.F1
        acc = [F1.zero] * self.f2
        ybar = self._reduce([F1.zero, F1.one])
        ypow = self._reduce([F1.one])
        for c in r.coords:
            cbar = F1.from_poly(list(c)) if c else F1.zero
            if cbar != F1.zero:
                acc = [F1.add(u, F1.mul(cbar, v)) for u, v in zip(acc, ypow)]
            ypow = self._mul(ypow, ybar)
        return acc

    def _matrix_of(self, fn) -> list[list[int]]:
        cols = [self._flatten(fn(b)) for b in self._basis_elems]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def _frobenius_matrix(self) -> list[list[int]]:
        # b -> b^q is multiplicative, so t^a y^b goes to (t^q)^a (y^q)^b
        q = self.ring.q
        F1 = self.F1
        tq = self._pow(self._reduce([F1.from_poly([0, 1])]), q)
        yq = self._pow(self._reduce([F1.zero, F1.one]), q)
        cols = []
        ypow = self._reduce([F1.one])
        for _ in range(self.f2):
            cur = ypow
            for _ in range(self.f1):
                cols.append(self._flatten(cur))
                cur = self._mul(cur, tq)
            ypow = self._mul(ypow, yq)
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def mul_matrix(self, r: RingElement) -> list[list[int]]:
        rb = self.embed(r)
        return self._matrix_of(lambda x: self._mul(x, rb))

    def as_module(self) -> "FiniteKtModule":
        return FiniteKtModule(self.spec, self.t_mat)


def _trim(F, a: list) -> list:
    a = list(a)
    while a and a[-1] == F.zero:
        a.pop()
    return a


def residue_field(R: BaseRing, m: MaxIdeal) -> ResidueField:
    return ResidueField(R, m)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteKtModule:
    """A finite k[t]-module given by the matrix of t on a k-basis."""

    spec: FieldSpec
    t_mat: tuple

    def __init__(self, spec: FieldSpec, t_mat: Iterable[Iterable[int]]):
        rows = tuple(tuple(r) for r in t_mat)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("t-action matrix must be square")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "t_mat", rows)

    @property
    def dim(self) -> int:
        return len(self.t_mat)

    @classmethod
    def cyclic(cls, f: Poly) -> "FiniteKtModule":
        """k[t]/(f) for monic f."""
        from .exactalg import companion
        return cls(f.field, companion(f.field, list(f.coeffs)))

    def direct_sum(self, other: "FiniteKtModule") -> "FiniteKtModule":
        n, m = self.dim, other.dim
        out = mat_zero(n + m, n + m)
        for i in range(n):
            out[i][:n] = self.t_mat[i]
        for i in range(m):
            out[n + i][n:] = other.t_mat[i]
        return FiniteKtModule(self.spec, out)


def module_size(M: FiniteKtModule) -> Poly:
    """|M| = det(T - t | M), monic of degree dim M."""
    return char_poly(M.spec, [list(r) for r in M.t_mat], "T")
