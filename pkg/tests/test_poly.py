from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from crnid.poly import (
    CatalogMismatch,
    PolynomialSyntaxError,
    PolyRing,
    Role,
    TermOrder,
    UnknownVariable,
    VariableCatalog,
    content_normalize,
    evaluate,
    format_polynomial,
    leading_term,
    monic,
    names_in,
    parse_polynomial,
    partial_derivative,
    substitute,
)

NAMES = ["x1", "x2", "p11", "k1"]
RING = PolyRing(VariableCatalog.from_names(NAMES))

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.lists(st.integers(0, 3), min_size=len(NAMES), max_size=len(NAMES))
polys = st.lists(st.tuples(coeffs, exps), max_size=5).map(RING.from_terms)


def to_sympy(p):
    syms = sp.symbols(NAMES)
    return sp.expand(sum(sp.Rational(c.numerator, c.denominator) * sp.prod([s ** e for s, e in zip(syms, ex)])
                         for c, ex in ((Fraction(c), ex) for c, ex in p.exponent_terms())))


class TestCatalog:
    def test_roles_guessed_from_names(self):
        cat = VariableCatalog.from_names(["x1", "p12", "k3", "y2", "x1_2", "p11_3"])
        assert cat.roles == (Role.STATE, Role.COVARIANCE, Role.RATE, Role.SLACK,
                             Role.EXT_STATE, Role.EXT_COVARIANCE)

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            VariableCatalog.from_names(["x1", "x1"])

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            RING.var("z9")

    def test_mixing_catalogs_rejected(self):
        other = PolyRing(VariableCatalog.from_names(["z"]))
        with pytest.raises(CatalogMismatch):
            RING.var("x1") + other.var("z")


class TestParseFormat:
    def test_parse_example(self):
        p = RING.parse("3/2*x1^2*p11 - k1")
        assert p == Fraction(3, 2) * RING.var("x1") ** 2 * RING.var("p11") - RING.var("k1")

    def test_implicit_coefficient_product(self):
        assert RING.parse("2x1") == RING.parse("2*x1")

    def test_parentheses_and_powers(self):
        assert RING.parse("(x1 + 1)^2") == RING.parse("x1^2 + 2*x1 + 1")

    def test_syntax_error_position(self):
        with pytest.raises(PolynomialSyntaxError):
            RING.parse("x1 + * 2")

    def test_names_in(self):
        assert names_in("2*x1*p11 - k3^2") == ["x1", "p11", "k3"]

    @given(polys)
    def test_round_trip(self, p):
        assert parse_polynomial(format_polynomial(p), RING) == p

    @given(polys)
    def test_agrees_with_sympy(self, p):
        assert sp.expand(sp.sympify(format_polynomial(p).replace("^", "**"))) == to_sympy(p)


class TestRingAxioms:
    @given(polys, polys, polys)
    def test_associativity(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)

    @given(polys, polys)
    def test_commutativity(self, a, b):
        assert a + b == b + a
        assert a * b == b * a

    @given(polys, polys, polys)
    def test_distributivity(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(polys)
    def test_identities_and_inverse(self, a):
        assert a + RING.zero() == a
        assert a * RING.one() == a
        assert a - a == RING.zero()
        assert not (a * RING.zero())

    @given(polys, polys)
    def test_product_matches_sympy(self, a, b):
        assert to_sympy(a * b) == sp.expand(to_sympy(a) * to_sympy(b))

    @given(polys, polys)
    def test_degree_additive(self, a, b):
        if a and b:
            assert (a * b).total_degree() == a.total_degree() + b.total_degree()


class TestOrders:
    def test_lex_vs_grevlex_leading_term(self):
        p = RING.parse("x1*k1^3 + x1^2")
        assert leading_term(p, TermOrder.LEX)[1] == (2, 0, 0, 0)
        assert leading_term(p, TermOrder.GREVLEX)[1] == (1, 0, 0, 3)

    def test_grlex_vs_grevlex(self):
        ring = PolyRing(VariableCatalog.from_names(["a", "b", "c"]))
        p = ring.parse("a*c^2 + b^3 + a*b*c")
        assert leading_term(p, TermOrder.GRLEX)[1] == (1, 1, 1)
        # grevlex prefers the smaller exponent in the last variable, so b^3 beats a*b*c
        assert leading_term(p, TermOrder.GREVLEX)[1] == (0, 3, 0)
        q = ring.parse("a*c^2 + b^3")
        assert leading_term(q, TermOrder.GRLEX)[1] == (1, 0, 2)
        assert leading_term(q, TermOrder.GREVLEX)[1] == (0, 3, 0)

    @given(polys)
    def test_order_change_preserves_polynomial(self, p):
        for o in TermOrder:
            assert p.with_order(o) == p


class TestCalculus:
    @given(polys)
    def test_derivative_matches_sympy(self, p):
        x1 = sp.Symbol("x1")
        assert to_sympy(partial_derivative(p, "x1")) == sp.expand(sp.diff(to_sympy(p), x1))

    @given(polys, st.fractions(-3, 3, max_denominator=3))
    def test_substitute_then_evaluate(self, p, v):
        point = {"x1": v, "x2": Fraction(1, 2), "p11": 2, "k1": -1}
        assert evaluate(substitute(p, {"x1": v}), point) == evaluate(p, point)

    def test_content_and_monic(self):
        p = RING.parse("4*x1 - 6*k1")
        assert content_normalize(p) == RING.parse("2*x1 - 3*k1")
        assert monic(RING.parse("-2*x1 + 1")) == RING.parse("x1 - 1/2")
