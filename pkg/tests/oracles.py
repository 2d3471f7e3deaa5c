"""Slow, obviously-correct reference computations that share no code with the package."""

from itertools import permutations, product


def mobius(n: int) -> int:
    out, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            out = -out
        k += 1
    return -out if n > 1 else out


def necklace(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over a field with q elements."""
    return sum(mobius(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _pmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def monic_polys(p: int, d: int):
    for low in product(range(p), repeat=d):
        yield list(low) + [1]


def is_irreducible_trial(f, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg f / 2 (prime fields)."""
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for g in monic_polys(p, d):
            if not _pmod(f, g, p):
                return False
    return n >= 1


def brute_zeta(p: int, N: int) -> list[int]:
    """sum over monic f in F_p[t] of 1/f(T), coefficients of T^0 .. T^-(N-1)."""
    acc = [0] * N
    for d in range(N):
        for f in monic_polys(p, d):
            # 1/f = T^-d / (1 + f_{d-1} T^-1 + ...): invert the reversed polynomial
            rev = f[::-1] + [0] * N
            inv = [0] * N
            inv[0] = 1
            for k in range(1, N):
                inv[k] = -sum(rev[i] * inv[k - i] for i in range(1, k + 1)) % p
            for k in range(N - d):
                acc[d + k] = (acc[d + k] + inv[k]) % p
    return acc


def series_mul(a, b, p, N):
    out = [0] * N
    for i, x in enumerate(a[:N]):
        for j, y in enumerate(b[:N - i]):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def leibniz_det(A, p: int, N: int) -> list[int]:
    """Determinant over F_p[[Z]]/Z^N of a matrix whose entries are coefficient lists."""
    n = len(A)
    total = [0] * N
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = [1] + [0] * (N - 1)
        for i in range(n):
            term = series_mul(term, A[i][perm[i]], p, N)
        total = [(x + sign * y) % p for x, y in zip(total, term)]
    return total


def charpoly_int(M, p: int) -> list[int]:
    """det(T - M) over F_p by Leibniz on polynomial entries, low degree first."""
    n = len(M)
    total = [0] * (n + 1)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = [1]
        for i in range(n):
            entry = [(-M[i][perm[i]]) % p] + ([1] if perm[i] == i else [0])
            term = _pmul(term, entry, p)
        for k, c in enumerate(term):
            total[k] = (total[k] + sign * c) % p
    return total
