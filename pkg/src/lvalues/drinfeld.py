"""Drinfeld modules over R: phi_E(t), Euler factors, exp_E and log_E.

Valuation bookkeeping for the exp/log tails uses two ring constants:
``tau_loss`` bounds how far the Frobenius on K_inf can lower valuations
(coming from y^(jq) mod g) and ``mul_loss`` does the same for products.
Both are zero for R = k[t].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .basering import (BaseRing, KInfElement, MaxIdeal, ResidueField, RingElement,
                       max_ideals_up_to, residue_field)
from .errors import PrecisionExhausted, TailNotCertified
import numpy as np

from .exactalg import NpField, char_poly, irreducible_array, mat_add, mat_identity, mat_mul, mat_zero
from .series import LaurentSeries, TruncSeries

INF = float("inf")


class TwistedPoly:
    """sum_j a_j tau^j in R{tau}, with tau r = r^q tau."""

    def __init__(self, ring: BaseRing, coeffs: Sequence[RingElement]):
        c = list(coeffs)
        while c and c[-1].is_zero():
            c.pop()
        self.ring = ring
        self.coeffs: tuple[RingElement, ...] = tuple(c)

    @classmethod
    def tau(cls, ring: BaseRing, power: int = 1, coeff: RingElement | None = None) -> "TwistedPoly":
        c = [ring.zero()] * power + [coeff if coeff is not None else ring.one()]
        return cls(ring, c)

    @classmethod
    def scalar(cls, ring: BaseRing, r: RingElement) -> "TwistedPoly":
        return cls(ring, [r])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self):
        return [(j, a) for j, a in enumerate(self.coeffs) if not a.is_zero()]

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        R = self.ring
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [R.zero()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [R.zero()] * (n - len(other.coeffs))
        return TwistedPoly(R, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "TwistedPoly":
        return TwistedPoly(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other: "TwistedPoly") -> "TwistedPoly":
        return self + (-other)

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        """Composition: (a tau^i)(b tau^j) = a b^(q^i) tau^(i+j)."""
        R = self.ring
        if not self.coeffs or not other.coeffs:
            return TwistedPoly(R, [])
        out = [R.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b.frobenius(i)
        return TwistedPoly(R, out)

    def apply(self, x: KInfElement) -> KInfElement:
        acc = None
        xp = x
        for j, a in enumerate(self.coeffs):
            if j:
                xp = xp.tau()
            if a.is_zero():
                continue
            term = xp * a
            acc = term if acc is None else acc + term
        return acc if acc is not None else self.ring.kinf_zero(x.prec())

    def tau_free_part(self) -> RingElement:
        return self.coeffs[0] if self.coeffs else self.ring.zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, TwistedPoly) and self.coeffs == other.coeffs

    def __str__(self) -> str:
        parts = []
        for j, a in self.terms():
            s = str(a)
            s = f"({s})" if "+" in s else s
            if j == 0:
                parts.append(s)
            else:
                tau = "tau" if j == 1 else f"tau^{j}"
                parts.append(tau if s == "1" else f"{s}*{tau}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class DrinfeldModule:
    """phi_E(t) = t + r_1 tau + ... + r_n tau^n over R; n = 0 is the trivial module."""

    ring: BaseRing
    coeffs: tuple[RingElement, ...]

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1].is_zero():
            raise ValueError("leading coefficient r_n must be nonzero")

    @classmethod
    def carlitz(cls, ring: BaseRing) -> "DrinfeldModule":
        return cls(ring, (ring.one(),))

    @classmethod
    def trivial(cls, ring: BaseRing) -> "DrinfeldModule":
        return cls(ring, ())

    @classmethod
    def parse(cls, ring: BaseRing, texts: Sequence[str]) -> "DrinfeldModule":
        cs = [ring.parse(s) for s in texts]
        while cs and cs[-1].is_zero():
            cs.pop()
        return cls(ring, tuple(cs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __str__(self) -> str:
        return str(phi_t(self))


def phi_t(E: DrinfeldModule) -> TwistedPoly:
    return TwistedPoly(E.ring, [E.ring.t(), *E.coeffs])


# ---------------------------------------------------------------------------
# finite-field side


def act_matrix(p: TwistedPoly, ell: ResidueField) -> list[list[int]]:
    """Matrix of sum a_j tau^j acting k-linearly on a residue field."""
    F = ell.spec
    n = ell.dim
    out = mat_zero(n, n)
    tau_j = mat_identity(n)
    for j, a in enumerate(p.coeffs):
        if j:
            tau_j = mat_mul(F, ell.tau_mat, tau_j)
        if not a.is_zero():
            out = mat_add(F, out, mat_mul(F, ell.mul_matrix(a), tau_j))
    return out


def _reversed_series(F, poly_coeffs: Sequence[int], N: int) -> list[int]:
    """f(T)/T^deg f as a series in T^-1, for monic f."""
    rev = list(reversed(poly_coeffs))
    return (rev + [0] * N)[:N]


def euler_factor(E: DrinfeldModule, m: MaxIdeal, N: int, ell: ResidueField | None = None) -> TruncSeries:
    """|R/m| / |E(R/m)| in 1 + T^-1 k[[T^-1]], modulo T^-N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ell = ell or residue_field(E.ring, m)
    F = ell.spec
    num = char_poly(F, ell.t_mat)
    den = char_poly(F, act_matrix(phi_t(E), ell))
    a = TruncSeries(F, tuple(_reversed_series(F, num.coeffs, N)))
    b = TruncSeries(F, tuple(_reversed_series(F, den.coeffs, N)))
    return a / b


@dataclass
class EulerDiagnostics:
    ideals: int
    stable_to: int
    top_degrees: tuple[int, ...] = ()


def _batch_berkowitz(nf: NpField, A: np.ndarray) -> np.ndarray:
    """Division-free characteristic polynomials of a batch (rows low first)."""
    B, D, _ = A.shape
    p = np.ones((B, 1), dtype=np.int64)  # high first
    for k in range(1, D + 1):
        M = A[:, :k - 1, :k - 1]
        Rw = A[:, k - 1, :k - 1]
        Cl = A[:, :k - 1, k - 1]
        col = np.zeros((B, k + 1), dtype=np.int64)
        col[:, 0] = 1
        col[:, 1] = nf.neg(A[:, k - 1, k - 1])
        v = Cl
        for j in range(2, k + 1):
            col[:, j] = nf.neg(nf.add(np.zeros(B, dtype=np.int64), _rowdot(nf, Rw, v)))
            if j < k:
                v = nf.matmul(M, v[:, :, None])[:, :, 0]
        padded = np.concatenate([p, np.zeros((B, 1), dtype=np.int64)], axis=1)
        p = nf.conv(col, padded, k + 1)
    return p[:, ::-1]


def _rowdot(nf: NpField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return nf.matmul(a[:, None, :], b[:, :, None])[:, 0, 0]


def _tree_product(nf: NpField, S: np.ndarray, N: int) -> np.ndarray:
    while S.shape[0] > 1:
        if S.shape[0] % 2:
            S = np.concatenate([S, np.eye(1, N, dtype=np.int64)])
        S = nf.conv(S[0::2], S[1::2], N)
    return S[0] if S.shape[0] else np.eye(1, N, dtype=np.int64)[0]


def _kt_degree_product(E: DrinfeldModule, deg: int, N: int) -> tuple[TruncSeries, int]:
    """Product of the Euler factors at all primes of k[t] of one degree."""
    F = E.ring.spec
    nf = NpField(F)
    P = irreducible_array(F, deg)
    B, D = P.shape[0], deg
    # powers t^k mod P for k <= q (D - 1) + 1
    top = E.ring.q * (D - 1) + 1
    pw = [np.zeros((B, D), dtype=np.int64)]
    pw[0][:, 0] = 1
    for _ in range(top):
        cur = pw[-1]
        lead = cur[:, D - 1:D]
        nxt = np.zeros_like(cur)
        nxt[:, 1:] = cur[:, :D - 1]
        pw.append(nf.sub(nxt, nf.mul(lead, P[:, :D])))
    C = np.stack(pw[1:D + 1], axis=2)
    Tau = np.stack([pw[j * E.ring.q] for j in range(D)], axis=2)
    eye = np.broadcast_to(np.eye(D, dtype=np.int64), (B, D, D))
    A = C.copy()
    Tj = eye
    for r in E.coeffs:
        Tj = nf.matmul(Tau, Tj)
        coeffs = list(r.coords[0])
        H = np.zeros((B, D, D), dtype=np.int64)
        for c in reversed(coeffs):
            H = nf.add(nf.matmul(H, C), nf.mul(eye, c))
        A = nf.add(A, nf.matmul(H, Tj))
    den = _batch_berkowitz(nf, A)
    rev = lambda m: np.concatenate([m[:, ::-1], np.zeros((B, N), dtype=np.int64)], axis=1)[:, :N]
    num_s = _tree_product(nf, rev(P), N)
    den_s = _tree_product(nf, rev(den), N)
    fac = TruncSeries(F, tuple(int(v) for v in num_s)) / TruncSeries(F, tuple(int(v) for v in den_s))
    return fac, B


def euler_product(E: DrinfeldModule, D: int, N: int) -> tuple[TruncSeries, EulerDiagnostics]:
    """Product of Euler factors over ideals of residue degree <= D, modulo T^-N.

    ``stable_to`` is the number of leading coefficients left unchanged by the
    factors of the two highest degrees (an empirical stabilisation witness).
    """
    F = E.ring.spec
    if D < 1:
        raise ValueError("degree bound must be >= 1")
    total = TruncSeries.one(F, N)
    before = TruncSeries.one(F, N)
    if E.ring.d == 1:
        count = 0
        for deg in range(1, D + 1):
            if E.rank:
                fac, b = _kt_degree_product(E, deg, N)
                total = total * fac
            else:
                b = irreducible_array(F, deg).shape[0]
            count += b
            if deg <= D - 2:
                before = total
        ideals = range(count)
    else:
        ideals = max_ideals_up_to(E.ring, D)
        for m in ideals:
            if E.rank:
                total = total * euler_factor(E, m, N)
            if m.deg_k <= D - 2:
                before = total
    stable = N
    for i in range(N):
        if before.coeffs[i] != total.coeffs[i]:
            stable = i
            break
    return total, EulerDiagnostics(len(ideals), stable, tuple(range(max(1, D - 1), D + 1)))


# ---------------------------------------------------------------------------
# exp and log


def _tau_loss_total(R: BaseRing, j: int) -> Fraction:
    """Bound on val(x) * q^j - val(x^(q^j))."""
    q = R.q
    return Fraction(R.tau_loss * (q**j - 1), q - 1)


def _val(x: KInfElement) -> float:
    return x.val()


@dataclass
class ExpSeries:
    E: DrinfeldModule
    imax: int
    prec: int
    growth: int
    e: list[KInfElement] = field(default_factory=list)

    @property
    def dvals(self) -> list[float]:
        """Certified lower bounds on val(e_i).

        Each bound is the better of what the truncated value shows and what
        the recursion forces from earlier bounds.
        """
        q = self.E.ring.q
        out: list[float] = []
        for i, x in enumerate(self.e):
            v = _val(x)
            if i:
                rec = [q**j * out[i - j] - self.step_loss(j)
                       for j in range(1, min(self.E.rank, i) + 1) if out[i - j] != INF]
                if rec:
                    v = max(v, math.ceil(q**i + min(rec)))
            out.append(v)
        return out

    def step_loss(self, j: int) -> Fraction:
        """Valuation loss of x -> r_j x^(q^j) (1-based j)."""
        r = self.E.coeffs[j - 1]
        return r.mul_loss() + _tau_loss_total(self.E.ring, j)

    def tail_constant(self) -> Fraction | float:
        """c with val(e_i) >= c q^i for every i > imax, or raise TailNotCertified."""
        n = self.E.rank
        q = self.E.ring.q
        if n == 0:
            return INF
        losses = [self.step_loss(j) for j in range(1, n + 1)]
        if q ** (self.imax + 1) < max(losses):
            raise TailNotCertified("imax too small for the inductive valuation bound")
        window = range(max(0, self.imax - n + 1), self.imax + 1)
        if self.imax - n + 1 < 0:
            raise TailNotCertified("need at least rank-many coefficients")
        vals = [self.dvals[i] for i in window]
        finite = [Fraction(int(v)) / q**i for v, i in zip(vals, window) if v != INF]
        return min(finite) if finite else INF


def exp_series(E: DrinfeldModule, imax: int, prec: int, growth: int = 0) -> ExpSeries:
    """Coefficients e_0..e_imax of exp_E, e_i certified modulo t^-(prec + growth q^i) + 1.

    Recursion: e_i (t^(q^i) - t) = sum_{j=1}^{min(n,i)} r_j e_{i-j}^(q^j).
    """
    if imax < 0:
        raise ValueError("imax must be >= 0")
    R = E.ring
    q = R.q
    F = R.spec
    margin = 0
    while True:
        out = [R.embed(R.one())]
        ok = True
        for i in range(1, imax + 1):
            target = prec + growth * q**i
            acc = None
            for j in range(1, min(E.rank, i) + 1):
                term = out[i - j].truncate(target + margin).tau(j) * E.coeffs[j - 1]
                acc = term if acc is None else acc + term
            if acc is None:
                out.append(R.kinf_zero())
                continue
            div = LaurentSeries.from_poly([0, F.neg(1)] + [0] * (q**i - 2) + [1], F)
            vnum = acc.val()
            inv_prec = max(q**i, target + margin - (int(vnum) if vnum != INF else 0))
            ei = acc.scale(div.inverse(inv_prec)).truncate(target + margin)
            if ei.prec() is not None and ei.prec() < target:
                ok = False
                break
            out.append(ei)
        if ok:
            out = [x if i == 0 else x.truncate(prec + growth * q**i) for i, x in enumerate(out)]
            return ExpSeries(E, imax, prec, growth, out)
        margin += max(8, margin)
        if margin > 4096:
            raise PrecisionExhausted("exp coefficients could not be certified")


def exp_eval(s: ExpSeries, x: KInfElement, target: int) -> KInfElement:
    """sum_i e_i x^(q^i) modulo t^-(target+1), with a certified tail."""
    R = s.E.ring
    q = R.q
    if x.is_zero() and x.prec() is None:
        return R.kinf_zero()
    if s.E.rank == 0:
        return x.truncate(target)
    c = s.tail_constant()
    vx = x.val()
    tau_rate = Fraction(R.tau_loss, q - 1)
    if c != INF:
        kappa = c + vx - tau_rate
        i1 = s.imax + 1
        if kappa <= 0 or kappa * q**i1 + tau_rate - R.mul_loss <= target:
            raise TailNotCertified(f"exp tail not certified at imax={s.imax} for val(x)={vx}")
    acc = x.truncate(target)
    xp = x
    for i in range(1, s.imax + 1):
        xp = xp.tau()
        if s.e[i].is_zero() and s.e[i].prec() is None:
            continue
        acc = acc + (xp * s.e[i]).truncate(target)
    if acc.prec() is not None and acc.prec() < target:
        raise PrecisionExhausted(f"exp value certified only to t^-{acc.prec()}")
    return acc


def certified_exp_series(E: DrinfeldModule, prec: int, min_val: int, growth: int = 0,
                         start: int = 2) -> ExpSeries:
    """Smallest imax >= start whose tail certificate covers inputs of valuation
    >= min_val at target precision ``prec``."""
    imax = max(start, E.rank)
    while True:
        s = exp_series(E, imax, prec, growth)
        try:
            exp_tail_ok(s, min_val, prec)
            return s
        except TailNotCertified:
            imax += 1
            if imax > 64:
                raise


def exp_tail_ok(s: ExpSeries, vx: int, target: int) -> None:
    R = s.E.ring
    q = R.q
    if s.E.rank == 0:
        return
    c = s.tail_constant()
    if c == INF:
        return
    tau_rate = Fraction(R.tau_loss, q - 1)
    kappa = c + vx - tau_rate
    if kappa <= 0 or kappa * q ** (s.imax + 1) + tau_rate - R.mul_loss <= target:
        raise TailNotCertified(f"exp tail not certified at imax={s.imax} for val(x)={vx}")


def isometry_radius(s: ExpSeries) -> int:
    """Smallest s0 such that exp is a bijective isometry of {val >= s0} onto itself.

    Needs val(e_i x^(q^i)) > val(x) whenever val(x) >= s0, i.e.
    val(e_i) + (q^i - 1) s0 - loss_i >= 1 for every i >= 1.
    """
    from .errors import IsometryRadiusNotCertified
    R = s.E.ring
    q = R.q
    if s.E.rank == 0:
        return -(10**9)
    c = s.tail_constant()
    tau_rate = Fraction(R.tau_loss, q - 1)
    best = None
    for i in range(1, s.imax + 1):
        v = s.dvals[i]
        if v == INF:
            continue
        loss = R.mul_loss + _tau_loss_total(R, i)
        need = math.ceil((1 + loss - v) / (q**i - 1))
        best = need if best is None else max(best, need)
    best = best if best is not None else -(10**9)
    if c != INF:
        # tail: c q^i + (q^i - 1) s0 - mul_loss - tau_rate (q^i - 1) >= 1 for i > imax
        i1 = s.imax + 1
        s_min = math.floor(tau_rate - c) + 1
        best = max(best, s_min)
        while (c * q**i1 + (q**i1 - 1) * best - R.mul_loss - tau_rate * (q**i1 - 1)) < 1:
            best += 1
            if best > 10**6:
                raise IsometryRadiusNotCertified("no isometry radius found")
    return best


@dataclass
class LogSeries:
    E: DrinfeldModule
    imax: int
    prec: int
    l: list[KInfElement]
    exp: ExpSeries

    @property
    def lvals(self) -> list[float]:
        return [_val(x) for x in self.l]

    def tail_constants(self) -> tuple[Fraction, Fraction]:
        """(c, c') with val(l_k) >= c q^k - c' for all k, or raise TailNotCertified."""
        R = self.E.ring
        q = R.q
        tau_rate = Fraction(R.tau_loss, q - 1)
        mu = R.mul_loss
        s = self.exp
        cands = []
        for i in range(1, s.imax + 1):
            v = s.dvals[i]
            if v != INF:
                cands.append(Fraction(int(v) - mu, q**i - 1) - tau_rate)
        ce = s.tail_constant()
        if ce != INF:
            cands.append(ce - tau_rate)
        if not cands:
            return Fraction(10**9), Fraction(0)
        cprime = min(cands)
        if ce != INF:
            sv = cprime + tau_rate
            i1 = s.imax + 1
            if q**i1 * (ce - sv) + sv - mu < 0:
                raise TailNotCertified("exp tail too weak for a log certificate")
        c = min((Fraction(int(v)) + cprime) / q**k for k, v in enumerate(self.lvals) if v != INF)
        return c, cprime


def log_series(E: DrinfeldModule, imax: int, prec: int) -> LogSeries:
    """Compositional inverse of exp_E: l_k = -sum_{i=1}^k e_i l_{k-i}^(q^i)."""
    R = E.ring
    s = exp_series(E, imax, prec)
    out = [R.embed(R.one())]
    for k in range(1, imax + 1):
        acc = None
        for i in range(1, k + 1):
            if s.e[i].is_zero() and s.e[i].prec() is None:
                continue
            term = out[k - i].tau(i) * s.e[i]
            acc = term if acc is None else acc + term
        out.append(R.kinf_zero() if acc is None else (-acc).truncate(prec))
    return LogSeries(E, imax, prec, out, s)


def log_eval(s: LogSeries, x: KInfElement, target: int) -> KInfElement:
    R = s.E.ring
    q = R.q
    if s.E.rank == 0:
        return x.truncate(target)
    c, cprime = s.tail_constants()
    tau_rate = Fraction(R.tau_loss, q - 1)
    kappa = c + x.val() - tau_rate
    k1 = s.imax + 1
    if kappa <= 0 or kappa * q**k1 - cprime + tau_rate - R.mul_loss <= target:
        raise TailNotCertified(f"log tail not certified at imax={s.imax}")
    acc = x.truncate(target)
    xp = x
    for k in range(1, s.imax + 1):
        xp = xp.tau()
        acc = acc + (xp * s.l[k]).truncate(target)
    if acc.prec() is not None and acc.prec() < target:
        raise PrecisionExhausted(f"log value certified only to t^-{acc.prec()}")
    return acc


def certified_log_eval(E: DrinfeldModule, x: KInfElement, target: int, start: int = 2) -> KInfElement:
    imax = max(start, E.rank, 1)
    while True:
        s = log_series(E, imax, target + 8)
        try:
            return log_eval(s, x, target)
        except TailNotCertified:
            imax += 1
            if imax > 40:
                raise
