"""Exact arithmetic over GF(p^e).

Field elements are stored as plain ints: the element with coordinates
``(a0, ..., a_{e-1})`` in the power basis of the modulus root is the
integer ``a0 + a1*p + ... + a_{e-1}*p^(e-1)``.  All arithmetic goes through
precomputed tables, which is cheap because q is capped at 64.

Polynomials are coefficient lists, lowest degree first, with no trailing
zeros; ``[]`` is the zero polynomial.  The list-level helpers (``p_add``,
``p_mul``, ...) are generic over any field object exposing ``zero``, ``one``,
``add``, ``sub``, ``neg``, ``mul``, ``inv``, ``q``, ``p``, ``random`` and
``sort_key``; both :class:`FieldSpec` and :class:`ExtField` qualify.
"""

from __future__ import annotations

import functools
import random
import re
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConfigError

MAX_Q = 64
FACTOR_SEED = 20100817


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------------------
# prime-field polynomials, used only to find the modulus of GF(p^e)


def _gfp_irreducible(f: Sequence[int], p: int) -> bool:
    """Brute-force irreducibility over GF(p) by trial division."""
    n = len(f) - 1
    if n <= 1:
        return n == 1
    for d in range(1, n // 2 + 1):
        for code in range(p**d):
            g = [(code // p**i) % p for i in range(d)] + [1]
            r = list(f)
            for k in range(n - d, -1, -1):
                c = r[k + d]
                if c:
                    for i in range(d + 1):
                        r[k + i] = (r[k + i] - c * g[i]) % p
            if not any(r[:d]):
                return False
    return True


def _smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    if e == 1:
        return (0, 1)
    # lexicographic with the constant term compared first
    for code in range(p**e):
        low = [(code // p ** (e - 1 - i)) % p for i in range(e)]
        f = low + [1]
        if _gfp_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")


class FieldSpec:
    """The finite field GF(p^e) with table arithmetic on int-encoded elements."""

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = modulus
        self.zero = 0
        self.one = 1
        q = self.q
        coords = [self._to_coords(x) for x in range(q)]
        add = [[self._from_coords([(a + b) % p for a, b in zip(coords[x], coords[y])])
                for y in range(q)] for x in range(q)]
        mul = [[self._from_coords(self._mul_coords(coords[x], coords[y])) for y in range(q)]
               for x in range(q)]
        neg = [self._from_coords([(-a) % p for a in coords[x]]) for x in range(q)]
        inv = [0] * q
        for x in range(1, q):
            for y in range(1, q):
                if mul[x][y] == 1:
                    inv[x] = y
                    break
        self._add = add
        self._mul = mul
        self._neg = neg
        self._inv = inv
        self._sub = [[add[x][neg[y]] for y in range(q)] for x in range(q)]
        self.add_np = np.array(add, dtype=np.int64)
        self.mul_np = np.array(mul, dtype=np.int64)
        self.neg_np = np.array(neg, dtype=np.int64)
        self.sub_np = np.array(self._sub, dtype=np.int64)
        self.inv_np = np.array(inv, dtype=np.int64)

    def _to_coords(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(self.e)]

    def _from_coords(self, c: Sequence[int]) -> int:
        return sum((ci % self.p) * self.p**i for i, ci in enumerate(c))

    def _mul_coords(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        p, e, m = self.p, self.e, self.modulus
        prod = [0] * (2 * e - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for i in range(e + 1):
                    prod[k - e + i] = (prod[k - e + i] - c * m[i]) % p
        return prod[:e]

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (field_make, (self.p, self.e))

    # scalar ops
    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._sub[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        return self._inv[a]

    def pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._mul[r][a]
            a = self._mul[a][a]
            n >>= 1
        return r

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> k."""
        return n % self.p

    def element(self, coords: Sequence[int]) -> "FieldElement":
        if len(coords) != self.e:
            raise ValueError("expected %d coordinates" % self.e)
        return FieldElement(self, self._from_coords(coords))

    def coords(self, x: int) -> tuple[int, ...]:
        return tuple(self._to_coords(x))

    def elements(self) -> range:
        return range(self.q)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def sort_key(self, a: int) -> Any:
        return a if self.e == 1 else tuple(self._to_coords(a))

    # text format for single coefficients
    def format_scalar(self, a: int) -> str:
        if a < self.p:
            return str(a)
        return "[" + ",".join(str(c) for c in self._to_coords(a)) + "]"


@functools.lru_cache(maxsize=None)
def field_make(p: int, e: int = 1, bound: int = MAX_Q) -> FieldSpec:
    """Build GF(p^e) with the lexicographically smallest monic irreducible modulus."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if e < 1:
        raise ValueError("extension degree must be >= 1")
    if p**e > bound:
        raise ValueError(f"q = {p**e} exceeds the configured bound {bound}")
    return FieldSpec(p, e, _smallest_irreducible(p, e))


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    @property
    def coords(self) -> tuple[int, ...]:
        return self.spec.coords(self.value)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.spec, self.spec.add(self.value, other.value))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.spec, self.spec.sub(self.value, other.value))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.spec, self.spec.mul(self.value, other.value))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.neg(self.value))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __str__(self) -> str:
        return self.spec.format_scalar(self.value)


# ---------------------------------------------------------------------------
# generic list-level polynomial arithmetic


def p_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _trim_generic(F, a: list) -> list:
    z = F.zero
    while a and a[-1] == z:
        a.pop()
    return a


def p_deg(a: Sequence) -> int:
    """Degree; -1 stands for the -infinity of the zero polynomial."""
    return len(a) - 1


def p_add(F, a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return _trim_generic(F, out)


def p_neg(F, a: Sequence) -> list:
    return [F.neg(c) for c in a]


def p_sub(F, a: Sequence, b: Sequence) -> list:
    return p_add(F, a, p_neg(F, b))


def p_scale(F, a: Sequence, c) -> list:
    if c == F.zero:
        return []
    return _trim_generic(F, [F.mul(x, c) for x in a])


def p_mul(F, a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    z = F.zero
    out = [z] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == z:
            continue
        for j, y in enumerate(b):
            if y != z:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim_generic(F, out)


def p_divmod(F, a: Sequence, b: Sequence) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], _trim_generic(F, r)
    lead_inv = F.inv(b[-1])
    q = [F.zero] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = F.mul(r[k + db], lead_inv)
        q[k] = c
        if c != F.zero:
            for i in range(db + 1):
                r[k + i] = F.sub(r[k + i], F.mul(c, b[i]))
    return _trim_generic(F, q), _trim_generic(F, r[:db])


def p_mod(F, a: Sequence, b: Sequence) -> list:
    return p_divmod(F, a, b)[1]


def p_monic(F, a: Sequence) -> list:
    if not a:
        return []
    return p_scale(F, a, F.inv(a[-1]))


def p_gcd(F, a: Sequence, b: Sequence) -> list:
    a, b = list(a), list(b)
    while b:
        a, b = b, p_mod(F, a, b)
    return p_monic(F, a)


def p_eval(F, a: Sequence, x):
    r = F.zero
    for c in reversed(a):
        r = F.add(F.mul(r, x), c)
    return r


def p_deriv(F, a: Sequence) -> list:
    out = []
    for i in range(1, len(a)):
        c = a[i]
        for _ in range((i - 1) % F.p):
            c = F.add(c, a[i])
        out.append(c if i % F.p else F.zero)
    return _trim_generic(F, out)


def p_powmod(F, a: Sequence, n: int, m: Sequence) -> list:
    result = [F.one]
    base = p_mod(F, a, m)
    while n:
        if n & 1:
            result = p_mod(F, p_mul(F, result, base), m)
        n >>= 1
        if n:
            base = p_mod(F, p_mul(F, base, base), m)
    return p_mod(F, result, m) if len(m) > 1 else []


def p_pow(F, a: Sequence, n: int) -> list:
    result = [F.one]
    base = list(a)
    while n:
        if n & 1:
            result = p_mul(F, result, base)
        n >>= 1
        if n:
            base = p_mul(F, base, base)
    return result


def p_qpower(F, a: Sequence, q: int) -> list:
    """a(x)^q for q a power of the characteristic: Frobenius on coefficients, x -> x^q."""
    z = F.zero
    out = [z] * ((len(a) - 1) * q + 1) if a else []
    for i, c in enumerate(a):
        out[i * q] = F.pow(c, q) if hasattr(F, "pow") else _field_pow(F, c, q)
    return _trim_generic(F, out)


def _field_pow(F, a, n: int):
    r = F.one
    while n:
        if n & 1:
            r = F.mul(r, a)
        a = F.mul(a, a)
        n >>= 1
    return r


def p_key(F, a: Sequence) -> tuple:
    """Canonical order: degree first, then coefficients low-degree-first."""
    return (len(a), tuple(F.sort_key(c) for c in a))


# ---------------------------------------------------------------------------
# extension fields GF(q)[x]/(P), used for residue fields and factoring g mod P


class ExtField:
    """GF(q^f) realised as base[x]/(modulus); elements are coefficient tuples of length f."""

    def __init__(self, base: FieldSpec, modulus: Sequence[int]):
        self.base = base
        self.modulus = list(modulus)
        self.f = len(modulus) - 1
        self.p = base.p
        self.q = base.q**self.f
        self.zero = tuple([0] * self.f)
        self.one = tuple([1] + [0] * (self.f - 1))

    def _pad(self, a: Sequence[int]) -> tuple:
        return tuple(list(a) + [0] * (self.f - len(a)))

    def add(self, a, b):
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        B = self.base
        return tuple(B.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        B = self.base
        return self._pad(p_mod(B, p_mul(B, p_trim(list(a)), p_trim(list(b))), self.modulus))

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of 0")
        return self.pow(a, self.q - 2)

    def pow(self, a, n: int):
        return _field_pow(self, a, n)

    def from_base(self, c: int):
        return self._pad([c])

    def from_poly(self, a: Sequence[int]):
        return self._pad(p_mod(self.base, list(a), self.modulus))

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.base.q) for _ in range(self.f))

    def sort_key(self, a):
        return tuple(self.base.sort_key(c) for c in a)

    def elements(self) -> Iterable[tuple]:
        q = self.base.q
        for code in range(self.q):
            yield tuple((code // q**i) % q for i in range(self.f))


# ---------------------------------------------------------------------------
# factorization (Cantor-Zassenhaus with a seeded trial sequence)


def _pth_root(F, a: Sequence) -> list:
    p = F.p
    e_root = F.q // p  # x -> x^(q/p) inverts Frobenius on GF(q)
    return _trim_generic(F, [_field_pow(F, a[i], e_root) for i in range(0, len(a), p)])


def _squarefree(F, f: list) -> list[tuple[list, int]]:
    out: list[tuple[list, int]] = []
    fp = p_deriv(F, f)
    if not fp:
        return [(g, m * F.p) for g, m in _squarefree(F, _pth_root(F, f))]
    c = p_gcd(F, f, fp)
    w = p_divmod(F, f, c)[0]
    i = 1
    while len(w) > 1:
        y = p_gcd(F, w, c)
        fac = p_divmod(F, w, y)[0]
        if len(fac) > 1:
            out.append((p_monic(F, fac), i))
        w = y
        c = p_divmod(F, c, y)[0]
        i += 1
    if len(c) > 1:
        out.extend((g, m * F.p) for g, m in _squarefree(F, _pth_root(F, c)))
    return out


def _distinct_degree(F, f: list) -> list[tuple[list, int]]:
    out = []
    x = [F.zero, F.one]
    h = list(x)
    i = 0
    while len(f) - 1 >= 2 * (i + 1):
        i += 1
        h = p_powmod(F, h, F.q, f)
        g = p_gcd(F, f, p_sub(F, h, x))
        if len(g) > 1:
            out.append((g, i))
            f = p_divmod(F, f, g)[0]
            h = p_mod(F, h, f)
    if len(f) > 1:
        out.append((p_monic(F, f), len(f) - 1))
    return out


def _equal_degree(F, f: list, d: int, rng: random.Random) -> list[list]:
    n = len(f) - 1
    if n == d:
        return [p_monic(F, f)]
    while True:
        a = _trim_generic(F, [F.random(rng) for _ in range(n)])
        if len(a) < 2:
            continue
        if F.p == 2:
            k = (F.q.bit_length() - 1) * d
            b = p_mod(F, a, f)
            t = list(b)
            for _ in range(k - 1):
                t = p_mod(F, p_mul(F, t, t), f)
                b = p_add(F, b, t)
        else:
            b = p_sub(F, p_powmod(F, a, (F.q**d - 1) // 2, f), [F.one])
        g = p_gcd(F, f, b)
        if 0 < len(g) - 1 < n:
            return (_equal_degree(F, g, d, rng)
                    + _equal_degree(F, p_divmod(F, f, g)[0], d, rng))


def factor_list(F, f: Sequence) -> list[tuple[list, int]]:
    """Monic irreducible factors with multiplicities, canonically sorted."""
    f = _trim_generic(F, list(f))
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    f = p_monic(F, f)
    rng = random.Random(FACTOR_SEED)
    out: dict[tuple, list] = {}
    for g, m in _squarefree(F, f):
        for h, d in _distinct_degree(F, g):
            for irr in _equal_degree(F, h, d, rng):
                key = p_key(F, irr)
                if key in out:
                    out[key][1] += m
                else:
                    out[key] = [irr, m]
    return [(v[0], v[1]) for k, v in sorted(out.items())]


# ---------------------------------------------------------------------------
# user-facing Poly


VARIABLES = ("t", "T", "y", "x")


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial over a FieldSpec; ``coeffs`` lowest degree first."""

    field: FieldSpec
    coeffs: tuple[int, ...]
    var: str = "t"

    def __post_init__(self):
        c = list(self.coeffs)
        p_trim(c)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_list(cls, field: FieldSpec, coeffs: Iterable[int], var: str = "t") -> "Poly":
        return cls(field, tuple(coeffs), var)

    @classmethod
    def monomial(cls, field: FieldSpec, k: int, c: int = 1, var: str = "t") -> "Poly":
        return cls(field, tuple([0] * k + [c]), var)

    @property
    def degree(self) -> int | float:
        return float("-inf") if not self.coeffs else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _check(self, other: "Poly"):
        if self.field is not other.field or self.var != other.var:
            raise ValueError("polynomials over different rings")

    def _wrap(self, c: list) -> "Poly":
        return Poly(self.field, tuple(c), self.var)

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        return self._wrap(p_add(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        return self._wrap(p_sub(self.field, self.coeffs, other.coeffs))

    def __neg__(self) -> "Poly":
        return self._wrap(p_neg(self.field, self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        return self._wrap(p_mul(self.field, self.coeffs, other.coeffs))

    def __pow__(self, n: int) -> "Poly":
        return self._wrap(p_pow(self.field, self.coeffs, n))

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        q, r = p_divmod(self.field, self.coeffs, other.coeffs)
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def gcd(self, other: "Poly") -> "Poly":
        self._check(other)
        return self._wrap(p_gcd(self.field, self.coeffs, other.coeffs))

    def monic(self) -> "Poly":
        return self._wrap(p_monic(self.field, self.coeffs))

    def scale(self, c: int) -> "Poly":
        return self._wrap(p_scale(self.field, self.coeffs, c))

    def __call__(self, x: int) -> int:
        return p_eval(self.field, self.coeffs, x)

    def qpower(self) -> "Poly":
        return self._wrap(p_qpower(self.field, self.coeffs, self.field.q))

    def derivative(self) -> "Poly":
        return self._wrap(p_deriv(self.field, self.coeffs))

    def with_var(self, var: str) -> "Poly":
        return Poly(self.field, self.coeffs, var)

    def sort_key(self) -> tuple:
        return p_key(self.field, self.coeffs)

    def __str__(self) -> str:
        return format_poly(self.field, self.coeffs, self.var)

    def __repr__(self) -> str:
        return f"Poly({self}, {self.field!r})"


def gcd(a: Poly, b: Poly) -> Poly:
    return a.gcd(b)


def factor(f: Poly) -> list[tuple[Poly, int]]:
    """Complete factorization of f into monic irreducibles (leading coefficient dropped)."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    return [(f._wrap(g), m) for g, m in factor_list(f.field, f.coeffs)]


def is_irreducible(f: Poly) -> bool:
    fs = factor(f)
    return len(fs) == 1 and fs[0][1] == 1


# ---------------------------------------------------------------------------
# irreducible enumeration by a vectorised sieve


def _monic_table(field: FieldSpec, d: int) -> np.ndarray:
    """All monic polynomials of degree d as rows of coefficients (low first)."""
    q = field.q
    codes = np.arange(q**d, dtype=np.int64)
    rows = np.empty((q**d, d + 1), dtype=np.int64)
    for i in range(d):
        rows[:, i] = (codes // q**i) % q
    rows[:, d] = 1
    return rows


def _encode(rows: np.ndarray, q: int) -> np.ndarray:
    d = rows.shape[1] - 1
    weights = q ** np.arange(d, dtype=np.int64)
    return rows[:, :d] @ weights


def _batch_mul(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Products of every row of a with every row of b; rows are monic coefficient vectors."""
    da, db = a.shape[1] - 1, b.shape[1] - 1
    out = np.zeros((a.shape[0], b.shape[0], da + db + 1), dtype=np.int64)
    for i in range(da + 1):
        prod = field.mul_np[a[:, i][:, None, None], b[None, :, :]]
        out[:, :, i:i + db + 1] = field.add_np[out[:, :, i:i + db + 1], prod]
    return out.reshape(-1, da + db + 1)


@functools.lru_cache(maxsize=None)
def irreducible_array(field: FieldSpec, d: int) -> np.ndarray:
    """Monic irreducibles of degree d as rows (low first), in low-first lex order."""
    q = field.q
    if d == 1:
        rows = np.zeros((q, 2), dtype=np.int64)
        rows[:, 0] = np.arange(q)
        rows[:, 1] = 1
        return rows
    reducible = np.zeros(q**d, dtype=bool)
    for a in range(1, d // 2 + 1):
        left = irreducible_array(field, a)
        right = _monic_table(field, d - a)
        reducible[_encode(_batch_mul(field, left, right), q)] = True
    rows = _monic_table(field, d)[~reducible]
    rows.setflags(write=False)
    return rows


def _irreducible_rows(field: FieldSpec, d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(c) for c in r) for r in irreducible_array(field, d).tolist())


def irreducibles_of_degree(field: FieldSpec, d: int, var: str = "t") -> list[Poly]:
    polys = [Poly(field, r, var) for r in _irreducible_rows(field, d)]
    return sorted(polys, key=Poly.sort_key)


def irreducibles_up_to(field: FieldSpec, d: int, var: str = "t") -> list[Poly]:
    """All monic irreducibles of degree 1..d, sorted by degree then low-first lex."""
    if d < 1:
        raise ValueError("degree bound must be >= 1")
    out: list[Poly] = []
    for k in range(1, d + 1):
        out.extend(irreducibles_of_degree(field, k, var))
    return out


# ---------------------------------------------------------------------------
# matrices over k: lists of lists of ints


def mat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_zero(r: int, c: int) -> list[list[int]]:
    return [[0] * c for _ in range(r)]


def mat_add(F: FieldSpec, a, b):
    return [[F.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(F: FieldSpec, a, b):
    return [[F.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(F: FieldSpec, a, c: int):
    return [[F.mul(x, c) for x in row] for row in a]


def mat_mul(F: FieldSpec, a, b):
    if not a:
        return []
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * k for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for j in range(m):
            x = ai[j]
            if x:
                bj = b[j]
                mx = F._mul[x]
                for l in range(k):
                    if bj[l]:
                        oi[l] = F._add[oi[l]][mx[bj[l]]]
    return out


def mat_pow(F: FieldSpec, a, n: int):
    result = mat_identity(len(a))
    while n:
        if n & 1:
            result = mat_mul(F, result, a)
        a = mat_mul(F, a, a)
        n >>= 1
    return result


def mat_vec(F: FieldSpec, a, v):
    return [p_dot(F, row, v) for row in a]


def p_dot(F: FieldSpec, u, v) -> int:
    s = 0
    for x, y in zip(u, v):
        if x and y:
            s = F._add[s][F._mul[x][y]]
    return s


def companion(F: FieldSpec, f: Sequence[int]):
    """Matrix of multiplication by x on k[x]/f in the basis 1, x, ..., x^(n-1)."""
    n = len(f) - 1
    m = mat_zero(n, n)
    for i in range(1, n):
        m[i][i - 1] = 1
    for i in range(n):
        m[i][n - 1] = F.neg(f[i])
    return m


def char_poly(F: FieldSpec, m, var: str = "T") -> Poly:
    """det(var*I - m) by the division-free Berkowitz recurrence."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("char_poly needs a square matrix")
    vect = [1]
    for r in range(n):
        a = m[r][r]
        row = m[r][:r]
        col = [m[i][r] for i in range(r)]
        sub = [mrow[:r] for mrow in m[:r]]
        c = [1, F.neg(a)]
        v = col
        for _ in range(r):
            c.append(F.neg(p_dot(F, row, v)))
            v = mat_vec(F, sub, v)
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(min(i, r) + 1):
                if i - j < len(c):
                    s = F.add(s, F.mul(c[i - j], vect[j]))
            new.append(s)
        vect = new
    return Poly(F, tuple(reversed(vect)), var)


def mat_rank(F: FieldSpec, a) -> int:
    return len(row_echelon(F, a)[1])


def row_echelon(F: FieldSpec, a):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in a]
    pivots = []
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(x, inv) for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                mf = F._mul[f]
                rows[i] = [F._sub[x][mf[y]] for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def nullspace(F: FieldSpec, a, ncols: int | None = None) -> list[list[int]]:
    """Basis of {v : a v = 0}, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    rows, pivots = row_echelon(F, a)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(rows, pivots):
            v[pc] = F.neg(row[fc])
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# polynomial text format


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def _split_terms(text: str) -> list[tuple[str, str]]:
    s = text.replace(" ", "").replace("−", "-")
    out = []
    i = 0
    depth = 0
    start = 0
    sign = "+"
    if not s:
        raise ConfigError("empty polynomial")
    if s[0] in "+-":
        sign = s[0]
        i = start = 1
    while i < len(s):
        ch = s[i]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            out.append((sign, s[start:i]))
            sign = ch
            start = i + 1
        i += 1
    out.append((sign, s[start:]))
    return out


def parse_scalar(field: FieldSpec, text: str) -> int:
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError(f"bad coefficient {text!r}")
        parts = [x for x in text[1:-1].split(",") if x.strip()]
        coords = [int(x) for x in parts]
        if len(coords) > field.e:
            raise ConfigError(f"too many coordinates in {text!r}")
        return field._from_coords(coords + [0] * (field.e - len(coords)))
    try:
        n = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad coefficient {text!r}") from exc
    return field.from_int(n)


def parse_terms(field: FieldSpec, text: str, variables: Sequence[str]) -> dict[tuple[int, ...], int]:
    """Parse a sum of terms ``c*v1^a*v2^b`` into {exponent tuple: coefficient}."""
    out: dict[tuple[int, ...], int] = {}
    for sign, term in _split_terms(text):
        if not term:
            raise ConfigError(f"empty term in {text!r}")
        exps = [0] * len(variables)
        coeff = 1
        for factor_txt in term.split("*"):
            if not factor_txt:
                raise ConfigError(f"bad term {term!r}")
            base, _, power = factor_txt.partition("^")
            if base in variables:
                try:
                    exps[variables.index(base)] += int(power) if power else 1
                except ValueError as exc:
                    raise ConfigError(f"bad exponent in {term!r}") from exc
            else:
                if power:
                    raise ConfigError(f"exponent on a coefficient in {term!r}")
                coeff = field.mul(coeff, parse_scalar(field, base))
        if sign == "-":
            coeff = field.neg(coeff)
        key = tuple(exps)
        out[key] = field.add(out.get(key, 0), coeff)
    return {k: v for k, v in out.items() if v}


def parse_poly(field: FieldSpec, text: str, var: str = "t") -> Poly:
    terms = parse_terms(field, text, [var])
    if not terms:
        return Poly(field, (), var)
    n = max(k[0] for k in terms) + 1
    c = [0] * n
    for (k,), v in terms.items():
        c[k] = v
    return Poly(field, tuple(c), var)


def format_monomial(field: FieldSpec, c: int, powers: Sequence[tuple[str, int]]) -> str:
    mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in powers if k)
    if not mono:
        return field.format_scalar(c)
    if c == 1:
        return mono
    return field.format_scalar(c) + "*" + mono


def format_poly(field: FieldSpec, coeffs: Sequence[int], var: str = "t") -> str:
    terms = [format_monomial(field, c, [(var, k)]) for k, c in reversed(list(enumerate(coeffs))) if c]
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# vectorised arithmetic on int arrays of field elements


class NpField:
    """Elementwise field arithmetic on numpy arrays (prime fields avoid table lookups)."""

    def __init__(self, F: FieldSpec):
        self.F = F
        self.prime = F.e == 1
        self.p = F.p

    def add(self, a, b):
        return (a + b) % self.p if self.prime else self.F.add_np[a, b]

    def sub(self, a, b):
        return (a - b) % self.p if self.prime else self.F.sub_np[a, b]

    def mul(self, a, b):
        return (a * b) % self.p if self.prime else self.F.mul_np[a, b]

    def neg(self, a):
        return (-a) % self.p if self.prime else self.F.neg_np[a]

    def inv(self, a):
        return self.F.inv_np[a]

    def conv(self, a, b, N: int):
        """Truncated product of series stored along the last axis."""
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros(shape, dtype=np.int64)
        for i in range(N):
            ai = a[..., i:i + 1]
            if not ai.any():
                continue
            out[..., i:] = self.add(out[..., i:], self.mul(ai, b[..., :N - i]))
        return out

    def matmul(self, a, b):
        if self.prime:
            return (a @ b) % self.p
        out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
        for k in range(a.shape[-1]):
            out = self.add(out, self.mul(a[..., :, k:k + 1], b[..., k:k + 1, :]))
        return out
