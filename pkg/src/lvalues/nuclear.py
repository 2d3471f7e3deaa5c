"""Nuclear operator series on K_inf/fR and their determinants over k[[Z]]/Z^N.

Spaces are modelled by monomials t^a y^j.  An operator acts by lifting a
monomial to K_inf, applying a twisted polynomial exactly, and reducing:
polynomial parts modulo f, fractional parts cut at the nucleus depth.  The
nucleus U_M is spanned by t^-m y^j with m >= M, so a depth-M window keeps
the exponents -(M-1) .. deg f - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .basering import BaseRing, KInfElement, ResidueField
from .drinfeld import DrinfeldModule, TwistedPoly, act_matrix, phi_t
from .errors import LValueError, NotLocallyContracting
from .exactalg import FieldSpec, NpField, p_mod, p_monic, p_trim
from .series import TruncSeries, ts_inv


# ---------------------------------------------------------------------------
# operator series


@dataclass(frozen=True)
class OperatorSeries:
    """Phi = sum_{n<N} phi_n Z^n with phi_0 = 0; the operator of interest is 1 + Phi."""

    ring: BaseRing
    phis: tuple[TwistedPoly, ...]

    def __post_init__(self):
        if self.phis and not self.phis[0].is_zero():
            raise ValueError("phi_0 must vanish")

    @property
    def N(self) -> int:
        return len(self.phis)

    @classmethod
    def zero(cls, ring: BaseRing, N: int) -> "OperatorSeries":
        return cls(ring, tuple(TwistedPoly(ring, []) for _ in range(N)))

    @classmethod
    def monomial(cls, ring: BaseRing, op: TwistedPoly, n: int, N: int) -> "OperatorSeries":
        """op * Z^n, n >= 1."""
        phis = [TwistedPoly(ring, []) for _ in range(N)]
        if n < N:
            phis[n] = op
        return cls(ring, tuple(phis))

    def check_nuclear(self) -> None:
        for n, p in enumerate(self.phis):
            if n and not p.tau_free_part().is_zero():
                raise NotLocallyContracting(f"coefficient of Z^{n} has a tau-free part")

    def __add__(self, other: "OperatorSeries") -> "OperatorSeries":
        return OperatorSeries(self.ring, tuple(a + b for a, b in zip(self.phis, other.phis)))

    def __neg__(self) -> "OperatorSeries":
        return OperatorSeries(self.ring, tuple(-a for a in self.phis))

    def then_compose(self, other: "OperatorSeries") -> "OperatorSeries":
        """Phi' with 1 + Phi' = (1 + self)(1 + other) as operators (other applied first)."""
        N = min(self.N, other.N)
        R = self.ring
        out = []
        for n in range(N):
            acc = self.phis[n] + other.phis[n]
            for a in range(1, n):
                acc = acc + self.phis[a] * other.phis[n - a]
            out.append(acc)
        return OperatorSeries(R, tuple(out))

    def inverse(self) -> "OperatorSeries":
        """Phi' with 1 + Phi' = (1 + self)^-1 mod Z^N."""
        # (1+Phi)^-1 = sum_k (-Phi)^k; Phi has no Z^0 term so N terms suffice
        neg = -self
        term = neg
        acc = OperatorSeries.zero(self.ring, self.N)
        for _ in range(1, self.N):
            acc = acc + term
            term = _plain_product(term, neg)
        return acc


def _plain_product(a: OperatorSeries, b: OperatorSeries) -> OperatorSeries:
    N = min(a.N, b.N)
    R = a.ring
    out = []
    for n in range(N):
        acc = TwistedPoly(R, [])
        for i in range(1, n):
            acc = acc + a.phis[i] * b.phis[n - i]
        out.append(acc)
    return OperatorSeries(R, tuple(out))


def theta_from_drinfeld(E: DrinfeldModule, N: int) -> OperatorSeries:
    """phi_n = (t - phi_E(t)) o t^(n-1) for 1 <= n < N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    R = E.ring
    head = -TwistedPoly(R, [R.zero(), *E.coeffs])
    phis = [TwistedPoly(R, [])]
    tpow = R.one()
    for n in range(1, N):
        phis.append(head * TwistedPoly.scalar(R, tpow))
        tpow = tpow * R.t()
    return OperatorSeries(R, tuple(phis))


# ---------------------------------------------------------------------------
# spaces


class CompactSpace:
    """K_inf / fR for a monic f in k[t] (f = 1 gives V = K_inf/R)."""

    def __init__(self, ring: BaseRing, modulus: Sequence[int] | None = None):
        F = ring.spec
        f = p_monic(F, p_trim(list(modulus))) if modulus is not None else [1]
        if not f:
            raise ValueError("modulus must be nonzero")
        self.ring = ring
        self.f = f
        self.fdeg = len(f) - 1

    def __repr__(self) -> str:
        return f"CompactSpace({self.ring!r}, f={self.f})"

    def exponents(self, M: int) -> list[int]:
        return list(range(self.fdeg - 1, -M, -1))

    def basis(self, M: int) -> list[tuple[int, int]]:
        """(a, j) for t^a y^j spanning the window of depth M."""
        return [(a, j) for j in range(self.ring.d) for a in self.exponents(M)]

    def lift(self, a: int, j: int) -> KInfElement:
        return self.ring.kinf_monomial(a, j)

    def reduce(self, x: KInfElement, M: int) -> list[int]:
        F = self.ring.spec
        exps = self.exponents(M)
        out: list[int] = []
        for s in x.coords:
            poly: dict[int, int] = {}
            frac: dict[int, int] = {}
            for k, c in enumerate(s.coeffs):
                if not c:
                    continue
                e = -(s.lead + k)
                (poly if e >= 0 else frac)[e] = c
            if poly:
                top = max(poly)
                plist = [poly.get(i, 0) for i in range(top + 1)]
                plist = p_mod(F, plist, self.f) if self.fdeg else []
            else:
                plist = []
            for e in exps:
                out.append(plist[e] if e >= 0 and e < len(plist) else (frac.get(e, 0) if e < 0 else 0))
        return out

    def frac_val(self, x: KInfElement) -> float:
        """Valuation of the fractional part (the quotient norm on V)."""
        best = math.inf
        for s in x.coords:
            for k, c in enumerate(s.coeffs):
                if c and s.lead + k > 0:
                    best = min(best, s.lead + k)
                    break
        return best


def _term_loss(R: BaseRing, a, i: int) -> Fraction:
    q = R.q
    return Fraction(a.mul_loss()) + Fraction(R.tau_loss * (q**i - 1), q - 1)


def find_nucleus(ops: OperatorSeries, V: CompactSpace | None = None) -> int:
    """Smallest uniform depth M such that U_M is a common nucleus of every phi_n.

    A valuation bound covers all m past a seed depth; the depths below the
    seed are then checked image by image, and the scan stops at the first
    failure so that every m >= M is covered.
    """
    ops.check_nuclear()
    R = ops.ring
    V = V or CompactSpace(R)
    q = R.q
    seed = 1
    for p in ops.phis[1:]:
        for i, a in p.terms():
            need = (1 + _term_loss(R, a, i)) / (q**i - 1)
            seed = max(seed, math.ceil(need))

    def contracts(m: int) -> bool:
        for p in ops.phis[1:]:
            if p.is_zero():
                continue
            for j in range(R.d):
                if V.frac_val(p.apply(V.lift(-m, j))) < m + 1:
                    return False
        return True

    for m in range(seed, seed + 2):
        if not contracts(m):
            raise LValueError(f"valuation bound violated at depth {m}")
    M = seed
    while M > 1 and contracts(M - 1):
        M -= 1
    return M


# ---------------------------------------------------------------------------
# determinants over k[[Z]]/Z^N


def det_series(F: FieldSpec, A: np.ndarray) -> list[int]:
    """Determinant of a matrix over k[[Z]]/Z^N stored as A[row, col, power]."""
    dim = A.shape[0]
    N = A.shape[2]
    nf = NpField(F)
    A = A.copy()
    det = np.zeros(N, dtype=np.int64)
    det[0] = 1
    for c in range(dim):
        cand = np.nonzero(A[c:, c, 0])[0]
        if cand.size == 0:
            raise LValueError("no unit pivot: matrix is not invertible modulo Z")
        r = c + int(cand[0])
        if r != c:
            A[[c, r]] = A[[r, c]]
            det = nf.neg(det)
        piv = A[c, c]
        det = nf.conv(det, piv, N)
        pinv = np.array(ts_inv(F, [int(v) for v in piv]), dtype=np.int64)
        below = A[c + 1:, c]
        if below.size and below.any():
            factor = nf.conv(below, pinv[None, :], N)
            upd = nf.conv(factor[:, None, :], A[c, c:][None, :, :], N)
            A[c + 1:, c:] = nf.sub(A[c + 1:, c:], upd)
    return [int(v) for v in det]


def operator_matrices(ops: OperatorSeries, V: CompactSpace, M: int) -> np.ndarray:
    """A[row, col, n]: matrix of 1 + Phi on the depth-M window."""
    basis = V.basis(M)
    dim = len(basis)
    N = ops.N
    A = np.zeros((dim, dim, max(N, 1)), dtype=np.int64)
    for i in range(dim):
        A[i, i, 0] = 1
    for n in range(1, N):
        p = ops.phis[n]
        if p.is_zero():
            continue
        for col, (a, j) in enumerate(basis):
            A[:, col, n] = V.reduce(p.apply(V.lift(a, j)), M)
    return A


def det_window(ops: OperatorSeries, V: CompactSpace, M: int) -> TruncSeries:
    F = ops.ring.spec
    N = ops.N
    if not V.basis(M):
        return TruncSeries.one(F, N)
    return TruncSeries(F, tuple(det_series(F, operator_matrices(ops, V, M))))


def det_compact(ops: OperatorSeries, V: CompactSpace | None = None, N: int | None = None,
                M: int | None = None) -> TruncSeries:
    """det(1 + Phi | V) mod Z^N, computed on V/U for a verified nucleus U."""
    V = V or CompactSpace(ops.ring)
    if N is not None and N != ops.N:
        ops = truncate_ops(ops, N)
    nucleus = find_nucleus(ops, V)
    if M is not None:
        if M < nucleus:
            raise LValueError(f"depth {M} is not a nucleus (needs >= {nucleus})")
        nucleus = M
    return det_window(ops, V, nucleus)


def truncate_ops(ops: OperatorSeries, N: int) -> OperatorSeries:
    R = ops.ring
    phis = list(ops.phis[:N]) + [TwistedPoly(R, [])] * max(0, N - ops.N)
    return OperatorSeries(R, tuple(phis))


def det_finite(ops: OperatorSeries, target: ResidueField | CompactSpace, N: int | None = None) -> TruncSeries:
    """Ordinary determinant of 1 + Phi on a residue field or on R/fR."""
    if N is not None and N != ops.N:
        ops = truncate_ops(ops, N)
    F = ops.ring.spec
    N = ops.N
    if isinstance(target, CompactSpace):
        return det_window(ops, target, 1)
    dim = target.dim
    A = np.zeros((dim, dim, N), dtype=np.int64)
    A[np.arange(dim), np.arange(dim), 0] = 1
    for n in range(1, N):
        p = ops.phis[n]
        if not p.is_zero():
            A[:, :, n] = np.array(act_matrix(p, target), dtype=np.int64)
    return TruncSeries(F, tuple(det_series(F, A)))


def lvalue_trace(E: DrinfeldModule, N: int, M: int | None = None) -> TruncSeries:
    """L(E/R) mod T^-N as det(1 + Theta | K_inf/R), with Z = T^-1."""
    ops = theta_from_drinfeld(E, N)
    return det_compact(ops, CompactSpace(E.ring), M=M)
