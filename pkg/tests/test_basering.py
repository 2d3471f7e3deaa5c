import random

import pytest
from hypothesis import given, strategies as st

import oracles
from lvalues.basering import FiniteKtModule, max_ideals_up_to, module_size, residue_field, ring_make
from lvalues.errors import LValueError
from lvalues.exactalg import Poly, char_poly, field_make, mat_identity, mat_mul, mat_pow


def test_ring_construction(f2, f3):
    assert ring_make(f2, None).d == 1
    assert ring_make(f2, "y^2+y+t").d == 2
    assert ring_make(f3, "y^2-t").d == 2


@pytest.mark.parametrize("g", ["t*y^2+1", "y^2+t^2", "y^2"])
def test_ring_rejects_bad_modulus(f2, g):
    # not monic in y, or a square in characteristic 2
    with pytest.raises((ValueError, LValueError)):
        ring_make(f2, g)


def test_ideal_examples(r2, r3, quad):
    assert [str(m) for m in max_ideals_up_to(r2, 2)] == ["(t)", "(t + 1)", "(t^2 + t + 1)"]
    over_t = [m for m in max_ideals_up_to(quad, 1) if m.P.coeffs == (0, 1)]
    assert len(over_t) == 2 and all(m.deg_k == 1 for m in over_t)
    assert len(max_ideals_up_to(r3, 1)) == 3


@pytest.mark.parametrize("p,D", [(2, 8), (3, 4)])
def test_ideal_counts_on_the_line(p, D):
    R = ring_make(field_make(p), None)
    ideals = max_ideals_up_to(R, D)
    for d in range(1, D + 1):
        assert sum(m.deg_k == d for m in ideals) == oracles.necklace(p, d)


def test_ideal_counts_on_rational_curve(quad):
    # t = y^2 + y, so R = F_2[y] and ideals are counted like irreducibles in y
    ideals = max_ideals_up_to(quad, 6)
    for d in range(1, 7):
        assert sum(m.deg_k == d for m in ideals) == oracles.necklace(2, d)
    assert len(ideals) == len(set(map(str, ideals)))


def test_residue_field_examples(r2, r3):
    m_t, _, m_q = max_ideals_up_to(r2, 2)
    ell = residue_field(r2, m_t)
    assert (ell.dim, ell.t_mat, ell.tau_mat) == (1, [[0]], [[1]])
    ell = residue_field(r2, m_q)
    F = r2.spec
    assert char_poly(F, ell.t_mat) == Poly.from_list(F, [1, 1, 1], "T")
    assert mat_pow(F, ell.tau_mat, 2) == mat_identity(2)
    m = max_ideals_up_to(r3, 1)[1]
    assert str(m) == "(t + 1)" and residue_field(r3, m).t_mat == [[2]]


@pytest.mark.parametrize("g,p,D", [(None, 2, 4), (None, 3, 3), ("y^2+y+t", 2, 4), ("y^2-t", 3, 2)])
def test_frobenius_semilinearity(g, p, D):
    R = ring_make(field_make(p), g)
    F = R.spec
    rng = random.Random(7)
    for m in max_ideals_up_to(R, D):
        ell = residue_field(R, m)
        assert mat_pow(F, ell.tau_mat, ell.dim) == mat_identity(ell.dim)
        assert char_poly(F, ell.t_mat).degree == ell.dim
        r = R.random_element(rng, 3)
        lhs = mat_mul(F, ell.tau_mat, ell.mul_matrix(r))
        rhs = mat_mul(F, ell.mul_matrix(r.frobenius()), ell.tau_mat)
        assert lhs == rhs


def test_residue_field_size_is_norm(quad):
    # |R/m| as a k[t]-module is P^(deg h)
    for m in max_ideals_up_to(quad, 4):
        ell = residue_field(quad, m)
        F = quad.spec
        expected = Poly.from_list(F, m.P.coeffs, "T") ** (m.deg_k // (len(m.P.coeffs) - 1))
        assert char_poly(F, ell.t_mat) == expected


def test_module_size_examples(f2):
    t = Poly.from_list(f2, [0, 1])
    f = Poly.from_list(f2, [1, 1, 1])
    T = lambda *c: Poly.from_list(f2, c, "T")
    assert module_size(FiniteKtModule.cyclic(t)) == T(0, 1)
    assert module_size(FiniteKtModule.cyclic(f)) == T(1, 1, 1)
    both = FiniteKtModule.cyclic(t).direct_sum(FiniteKtModule.cyclic(Poly.from_list(f2, [1, 1])))
    assert module_size(both) == T(0, 1, 1)


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_module_size_properties(seed, n, m):
    F = field_make(3)
    rng = random.Random(seed)
    A = FiniteKtModule(F, [[rng.randrange(3) for _ in range(n)] for _ in range(n)])
    B = FiniteKtModule(F, [[rng.randrange(3) for _ in range(m)] for _ in range(m)])
    # the number of elements is q^dim, so #M = q^deg|M|
    assert module_size(A).degree == A.dim
    assert module_size(A.direct_sum(B)) == module_size(A) * module_size(B)


def test_kinf_examples(r2, quad):
    x = r2.kinf_monomial(-1, 0)
    assert x.tau() == r2.kinf_monomial(-2, 0)
    assert x * r2.t() == r2.embed(r2.one())
    y = quad.embed(quad.y())
    assert y.tau() == quad.embed(quad.y() + quad.t())


def test_kinf_tau_is_multiplicative(quad):
    rng = random.Random(3)
    for _ in range(10):
        a, b = quad.random_element(rng, 3), quad.random_element(rng, 3)
        assert quad.embed(a * b).tau() == quad.embed(a.frobenius() * b.frobenius())
        assert (quad.embed(a) * b).tau() == quad.embed(a).tau() * b.frobenius()
