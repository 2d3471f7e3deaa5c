"""Lattices in K_inf, their monic index, the unit lattice exp^-1(E(R)) and H(E/R).

The unit lattice is found by linear algebra over k.  Let s0 be an isometry
radius of exp and P >= s0 - 1.  For u in the window spanned by t^a y^j with
-P <= a <= B, exp(u) lies in R + {val >= P+1} exactly when u is the
truncation of a unit of degree <= B.  So the k-solutions of "coefficients
t^-1 .. t^-P of exp(u) vanish" are the truncated units, and a reduced
(orthogonal) k[t]-basis can be read off degree by degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .basering import BaseRing, FiniteKtModule, KInfElement, module_size
from .drinfeld import (DrinfeldModule, ExpSeries, certified_exp_series, exp_eval, isometry_radius,
                       phi_t)
from .errors import DegenerateBasis, InvZero, PrecisionExhausted, RankDeficient, WindowNotStabilized
from .exactalg import FieldSpec, Poly, mat_rank, nullspace, row_echelon
from .nuclear import lvalue_trace
from .series import LaurentSeries, TruncSeries, monic_normalize

MAX_WINDOW = 64
MAX_LEIBNIZ = 7


# ---------------------------------------------------------------------------
# determinants over k((t^-1))


def _parity(perm: Sequence[int]) -> int:
    seen, sign = set(), 0
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign += length - 1
    return sign % 2


def laurent_det(F: FieldSpec, rows: Sequence[Sequence[LaurentSeries]]) -> LaurentSeries:
    """Determinant by the Leibniz expansion.

    No divisions, so precision tracking stays exact; the matrices here are
    d x d with d the rank of R over k[t], which keeps d! small.
    """
    n = len(rows)
    if n > MAX_LEIBNIZ:
        raise ValueError(f"determinant of size {n} exceeds {MAX_LEIBNIZ}")
    acc = LaurentSeries.zero(F)
    if n == 0:
        return LaurentSeries.from_poly([1], F)
    for perm in itertools.permutations(range(n)):
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        acc = acc - term if _parity(perm) else acc + term
    return acc


@dataclass(frozen=True)
class Lattice:
    """k[t]-span of d elements of K_inf, d = rank of R over k[t]."""

    ring: BaseRing
    basis: tuple[KInfElement, ...]

    def __post_init__(self):
        if len(self.basis) != self.ring.d:
            raise ValueError(f"need {self.ring.d} basis vectors")

    @classmethod
    def standard(cls, ring: BaseRing) -> "Lattice":
        """R itself, with basis 1, y, ..., y^(d-1)."""
        return cls(ring, tuple(ring.kinf_monomial(0, j) for j in range(ring.d)))

    def matrix(self) -> list[list[LaurentSeries]]:
        return [list(b.coords) for b in self.basis]

    def det(self) -> LaurentSeries:
        return laurent_det(self.ring.spec, self.matrix())

    def scaled(self, factors: Sequence[LaurentSeries]) -> "Lattice":
        return Lattice(self.ring, tuple(b.scale(f) for b, f in zip(self.basis, factors)))

    def transformed(self, sigma: Sequence[Sequence[LaurentSeries]]) -> "Lattice":
        """Image under the k((t^-1))-linear map acting on coordinates by sigma (column vectors)."""
        d = self.ring.d
        out = []
        for b in self.basis:
            coords = []
            for i in range(d):
                acc = None
                for j in range(d):
                    term = sigma[i][j] * b.coords[j]
                    acc = term if acc is None else acc + term
                coords.append(acc)
            out.append(KInfElement(self.ring, tuple(coords)))
        return Lattice(self.ring, tuple(out))


def lattice_index(L1: Lattice, L2: Lattice, N: int) -> LaurentSeries:
    """[L1 : L2] as a monic Laurent series in T with N certified leading coefficients."""
    if L1.ring != L2.ring:
        raise ValueError("lattices live in different spaces")
    if N < 1:
        raise ValueError("N must be >= 1")
    d1, d2 = L1.det(), L2.det()
    if not d1.coeffs or not d2.coeffs:
        raise DegenerateBasis("basis determinant has no certified nonzero coefficient")
    try:
        ratio = d2 * d1.inverse(N - 1 - d1.val() + 1)
    except InvZero as exc:
        raise DegenerateBasis(str(exc)) from exc
    if not ratio.coeffs:
        raise PrecisionExhausted("index has no certified coefficient")
    if ratio.prec is not None and ratio.prec - ratio.lead < N - 1:
        raise PrecisionExhausted(
            f"index known to relative precision {ratio.prec - ratio.lead + 1}, need {N}")
    out = monic_normalize(ratio).with_var("T")
    return out.truncate(out.lead + N - 1)


# ---------------------------------------------------------------------------
# exp on coefficient windows


def _exp_for_window(E: DrinfeldModule, B: int, P: int) -> ExpSeries:
    """exp series certified for inputs of degree <= B, values modulo t^-(P+1)."""
    R = E.ring
    return certified_exp_series(E, P + R.mul_loss + 1, -B, growth=B + R.tau_loss)


def _radius(E: DrinfeldModule) -> int:
    if E.rank == 0:
        return 1
    s = _exp_for_window(E, 0, 4)
    return max(1, isometry_radius(s))


# ---------------------------------------------------------------------------
# unit lattice


@dataclass
class UnitLattice:
    lattice: Lattice
    window: tuple[int, int]  # (B, P)
    radius: int
    degrees: tuple[int, ...]


def _window_units(E: DrinfeldModule, B: int, P: int, s: ExpSeries) -> list[tuple[int, KInfElement]]:
    """Reduced k[t]-basis candidates of the unit lattice among degrees <= B.

    Returns (degree, truncated element) pairs with independent leading vectors.
    """
    R = E.ring
    F = R.spec
    d = R.d
    cols = [(a, j) for a in range(B, -P - 1, -1) for j in range(d)]
    images = []
    for a, j in cols:
        v = exp_eval(s, R.kinf_monomial(a, j), P)
        images.append(v.coefficient_vector(1, P))
    nrows = d * P
    A = [[images[c][r] for c in range(len(cols))] for r in range(nrows)]
    kernel = nullspace(F, A, len(cols)) if nrows else [
        [1 if i == k else 0 for i in range(len(cols))] for k in range(len(cols))]
    if not kernel:
        return []
    rows, pivots = row_echelon(F, kernel)
    rows = rows[:len(pivots)]
    chosen: list[tuple[int, KInfElement]] = []
    leads: list[list[int]] = []
    for row, pc in sorted(zip(rows, pivots), key=lambda rp: -rp[1]):
        deg = cols[pc][0]
        base = (B - deg) * d
        lead = row[base:base + d]
        if mat_rank(F, leads + [lead]) > len(leads):
            leads.append(lead)
            chosen.append((deg, _element_from_row(R, row, cols, P)))
    return chosen


def _element_from_row(R: BaseRing, row: list[int], cols, P: int) -> KInfElement:
    F = R.spec
    per = [dict() for _ in range(R.d)]
    for c, (a, j) in zip(row, cols):
        if c:
            per[j][a] = c
    coords = []
    for j in range(R.d):
        terms = per[j]
        if not terms:
            coords.append(LaurentSeries.zero(F, P))
            continue
        top = max(terms)
        coeffs = [terms.get(top - k, 0) for k in range(top + P + 1)]
        coords.append(LaurentSeries.from_coeffs(F, coeffs, prec=P, lead=-top))
    return KInfElement(R, tuple(coords))


def unit_lattice(E: DrinfeldModule, N: int, B0: int = 1) -> UnitLattice:
    """A certified reduced k[t]-basis of exp^-1(E(R)), precise enough for N index coefficients."""
    R = E.ring
    d = R.d
    if E.rank == 0:
        return UnitLattice(Lattice.standard(R), (0, 0), 1, tuple([0] * d))
    s0 = _radius(E)
    B = max(0, B0)
    P = max(N + 1, s0)
    while True:
        s = _exp_for_window(E, B, P)
        found = _window_units(E, B, P, s)
        if len(found) == d:
            L = Lattice(R, tuple(x for _, x in found))
            try:
                lattice_index(Lattice.standard(R), L, N)
                return UnitLattice(L, (B, P), s0, tuple(deg for deg, _ in found))
            except PrecisionExhausted:
                P = 2 * P
                continue
        B = 2 * B if B else 1
        if B > MAX_WINDOW:
            raise RankDeficient(f"found {len(found)} of {d} generators with degree <= {B // 2}")


# ---------------------------------------------------------------------------
# class module


@dataclass
class ClassModule:
    module: FiniteKtModule
    size: Poly
    radius: int
    span_dim: int


def _frac_vector(x: KInfElement, depth: int) -> list[int]:
    return x.coefficient_vector(1, depth) if depth > 0 else []


def class_module(E: DrinfeldModule, N: int | None = None) -> ClassModule:
    """H(E/R) = K_inf / (R + exp K_inf) with t acting through phi_E(t).

    W = K_inf/(R + ball_s0) is finite; the image S of exp in W is the
    smallest subspace containing exp(t^-(s0-1) y^j) that is stable under
    phi_E(t) applied to truncated representatives.  Truncation errors land
    in exp(ball_(s0-1)), which is already in the span of those generators.
    """
    R = E.ring
    F = R.spec
    d = R.d
    s0 = _radius(E)
    depth = s0 - 1
    if E.rank == 0 or depth <= 0:
        M = FiniteKtModule(F, [])
        return ClassModule(M, module_size(M), s0, 0)
    s = _exp_for_window(E, 0, depth)
    phi = phi_t(E)
    dim = d * depth

    def lift(vec: Sequence[int]) -> KInfElement:
        coords = []
        for j in range(d):
            part = vec[j * depth:(j + 1) * depth]
            coords.append(LaurentSeries.from_coeffs(F, part, None, lead=1))
        return KInfElement(R, tuple(coords))

    def step(vec: Sequence[int]) -> list[int]:
        return _frac_vector(phi.apply(lift(vec)).truncate(depth), depth)

    gens = [_frac_vector(exp_eval(s, R.kinf_monomial(-depth, j), depth), depth) for j in range(d)]
    span: list[list[int]] = []
    frontier = gens
    rounds = 0
    while True:
        grown = False
        nxt = []
        for v in frontier:
            if mat_rank(F, span + [v]) > len(span):
                span.append(v)
                grown = True
            nxt.append(step(v))
        frontier = nxt
        rounds += 1
        if not grown and rounds > 1:
            break
        if rounds > dim + 2:
            raise WindowNotStabilized("image of exp did not stabilise")
    # H = W / S: complement coordinates are the non-pivot columns of rref(S)
    if span:
        srows, spiv = row_echelon(F, span)
        srows = srows[:len(spiv)]
    else:
        srows, spiv = [], []
    comp = [c for c in range(dim) if c not in set(spiv)]

    def reduce_mod_s(v: list[int]) -> list[int]:
        v = list(v)
        for row, pc in zip(srows, spiv):
            if v[pc]:
                c = v[pc]
                v = [F.sub(x, F.mul(c, y)) for x, y in zip(v, row)]
        return [v[c] for c in comp]

    tmat = [[0] * len(comp) for _ in comp]
    for col, c in enumerate(comp):
        e = [0] * dim
        e[c] = 1
        img = reduce_mod_s(step(e))
        for r in range(len(comp)):
            tmat[r][col] = img[r]
    M = FiniteKtModule(F, tmat)
    return ClassModule(M, module_size(M), s0, len(span))


# ---------------------------------------------------------------------------
# main identity


@dataclass
class MainReport:
    lhs: TruncSeries
    index: LaurentSeries
    size_h: Poly
    rhs: list[int]
    quotient: LaurentSeries
    equal: bool
    quotient_is_poly: bool
    quotient_matches: bool
    units: UnitLattice = field(repr=False)
    classes: ClassModule = field(repr=False)

    @property
    def verdict(self) -> str:
        ok = self.equal and self.quotient_is_poly and self.quotient_matches
        return "VERIFIED" if ok else "VERIFICATION_FAILED"


def _poly_as_laurent(p: Poly) -> LaurentSeries:
    return LaurentSeries.from_poly(list(p.coeffs), p.field, var="T")


def verify_main_theorem(E: DrinfeldModule, N: int) -> MainReport:
    """Compare L(E/R) with [R : exp^-1 E(R)] * |H(E/R)| modulo T^-N."""
    R = E.ring
    F = R.spec
    lhs = lvalue_trace(E, N)
    units = unit_lattice(E, N)
    index = lattice_index(Lattice.standard(R), units.lattice, N)
    classes = class_module(E, N)
    size_h = classes.size
    rhs_series = index * _poly_as_laurent(size_h)
    try:
        rhs = [rhs_series[i] for i in range(N)]
        equal = rhs == list(lhs.coeffs) and (not rhs_series.coeffs or rhs_series.lead >= 0)
    except PrecisionExhausted:
        rhs, equal = [], False
    lhs_l = LaurentSeries.from_coeffs(F, lhs.coeffs, prec=N - 1, lead=0, var="T")
    quotient = lhs_l / index
    h = size_h.degree
    upto = quotient.prec if quotient.prec is not None else N - 1
    tail = [quotient[i] for i in range(1, upto + 1)] if upto >= 1 else []
    top_ok = not quotient.coeffs or quotient.lead >= -h
    is_poly = top_ok and not any(tail)
    matches = is_poly and all(quotient[-k] == (size_h.coeffs[k] if k < len(size_h.coeffs) else 0)
                              for k in range(0, h + 1))
    return MainReport(lhs, index, size_h, rhs, quotient, equal, is_poly, matches, units, classes)
