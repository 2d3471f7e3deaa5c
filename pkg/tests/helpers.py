"""Random instances shared by the property and acceptance tests."""

from lvalues import DrinfeldModule, LaurentSeries, OperatorSeries, TwistedPoly
from lvalues.lattice import Lattice


def random_twisted(R, rng, max_tau=2, max_deg=2, min_tau=1):
    """A random element of R{tau} with no terms below tau^min_tau."""
    coeffs = [R.zero()] * min_tau + [R.random_element(rng, max_deg) for _ in range(max_tau - min_tau + 1)]
    return TwistedPoly(R, coeffs)


def random_ops(R, rng, N, max_tau=2, max_deg=5, density=0.6):
    """A random nuclear series sum_{1<=n<N} phi_n Z^n."""
    phis = [TwistedPoly(R, [])]
    for _ in range(1, N):
        phis.append(random_twisted(R, rng, max_tau, max_deg) if rng.random() < density else TwistedPoly(R, []))
    return OperatorSeries(R, tuple(phis))


def random_module(R, rng, rank, deg=2):
    coeffs = [R.random_element(rng, deg) for _ in range(rank)]
    while rank and coeffs[-1].is_zero():
        coeffs[-1] = R.random_element(rng, deg)
    return DrinfeldModule(R, tuple(coeffs))


def geometric_inverse_part(R, op, N):
    """Phi with 1 + Phi = (1 - op Z)^-1 = sum_k (op Z)^k mod Z^N."""
    phis = [TwistedPoly(R, [])]
    power = TwistedPoly.scalar(R, R.one())
    for _ in range(1, N):
        power = power * op
        phis.append(power)
    return OperatorSeries(R, tuple(phis))


def rand_laurent(F, rng, top=2, bottom=3):
    """A random exact element of k[t, t^-1] with t-degrees in [-bottom, top]."""
    return LaurentSeries.from_coeffs(F, [rng.randrange(F.q) for _ in range(top + bottom + 1)], lead=-top)


def random_lattice(R, rng):
    while True:
        sigma = [[rand_laurent(R.spec, rng) for _ in range(R.d)] for _ in range(R.d)]
        L = Lattice.standard(R).transformed(sigma)
        if L.det().coeffs:
            return L
