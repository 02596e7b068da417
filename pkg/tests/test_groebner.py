import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from crnid.groebner import (
    GroebnerOptions,
    IdealGenerators,
    Triviality,
    buchberger,
    groebner,
    is_trivial,
    normal_form,
    reduce_basis,
    s_polynomial,
    spoly_residues,
)
from crnid.poly import PolyRing, TermOrder, VariableCatalog, format_polynomial

from groebner_cases import GB_CASES, case

SYMPY_ORDER = {TermOrder.LEX: "lex", TermOrder.GRLEX: "grlex", TermOrder.GREVLEX: "grevlex"}


def sympy_reduced(names, gens, order):
    """Reduced basis from sympy, made monic in the same order (sympy keeps integer content)."""
    syms = sp.symbols(names)
    exprs = [sp.sympify(format_polynomial(g).replace("^", "**"), locals=dict(zip(names, syms))) for g in gens]
    o = SYMPY_ORDER[order]
    G = sp.groebner(exprs, *syms, order=o)
    return {sp.expand(g / sp.LC(g, *syms, order=o)) for g in G.exprs}


def as_sympy(polys, names):
    syms = dict(zip(names, sp.symbols(names)))
    return {sp.expand(sp.sympify(format_polynomial(p).replace("^", "**"), locals=syms)) for p in polys}


def test_shared_root_basis():
    ring, gens = case("unit_root_shared")
    assert groebner(gens).polys == [ring.parse("z - 1")]


def test_coprime_roots_unit():
    ring, gens = case("unit_root_coprime")
    assert groebner(gens).polys == [ring.one()]
    assert is_trivial(gens).status is Triviality.TRIVIAL


def test_textbook_example_both_orders():
    _, gens = case("clo_lex", TermOrder.GRLEX)
    assert set(map(str, groebner(gens, TermOrder.GRLEX).polys)) == {"x^2", "x*y", "y^2 - 1/2*x"}
    _, gens = case("clo_lex", TermOrder.LEX)
    assert set(map(str, groebner(gens, TermOrder.LEX).polys)) == {"x - 2*y^2", "y^3"}


@pytest.mark.parametrize("name", [n for n in GB_CASES if n != "ex1_positive"])
@pytest.mark.parametrize("order", list(TermOrder))
def test_reduced_basis_matches_sympy(name, order):
    ring, gens = case(name, order)
    G = groebner(gens, order)
    assert as_sympy(G.polys, ring.catalog.names) == sympy_reduced(ring.catalog.names, gens, order)


@pytest.mark.parametrize("name", list(GB_CASES))
def test_spolys_reduce_to_zero(name):
    _, gens = case(name)
    G = groebner(gens)
    assert all(not r for r in spoly_residues(G.polys))
    # and the generators lie in the ideal of the basis
    assert all(not normal_form(g, G.polys) for g in gens)


@pytest.mark.parametrize("name", list(GB_CASES))
def test_reduced_basis_unique_under_shuffles(name):
    _, gens = case(name)
    ref = groebner(gens).polys
    rng = random.Random(name)
    for _ in range(20):
        g = list(gens)
        rng.shuffle(g)
        g = [p.scale(rng.choice([1, -2, Fraction(1, 3)])) for p in g]
        assert groebner(g).polys == ref


@pytest.mark.parametrize("name", [n for n, (v, _) in GB_CASES.items() if len(v) <= 6])
def test_triviality_order_independent(name):
    verdicts = {is_trivial(case(name, o)[1], o).status for o in TermOrder}
    assert len(verdicts) == 1


def test_ex1_identifiability_ideal_is_unit():
    _, gens = case("ex1_positive")
    assert is_trivial(gens).status is Triviality.TRIVIAL


def test_cofactor_certificate():
    ring, gens = case("unit_hyperbola")
    res = is_trivial(gens, opts=GroebnerOptions(track_cofactors=True))
    assert res.status is Triviality.TRIVIAL
    cof = res.basis.cofactors[0]
    combo = sum((c * g for c, g in zip(cof, gens)), ring.zero())
    assert combo.is_constant() and combo


def test_budget_exhaustion_reported():
    _, gens = case("three_spheres")
    res = is_trivial(gens, opts=GroebnerOptions(max_pairs=1, early_unit_abort=False))
    assert res.status is Triviality.BUDGET_EXHAUSTED
    assert res.reason


def test_empty_generators_rejected():
    with pytest.raises(ValueError):
        buchberger([])


def test_ideal_generators_dedupe_scalar_multiples():
    ring, _ = case("circle_line")
    g = IdealGenerators([ring.parse("x - y"), ring.parse("2*x - 2*y"), ring.parse("y - x")])
    assert len(g) == 1


def test_s_polynomial_cancels_leading_terms():
    ring, (f, g) = case("clo_lex", TermOrder.GREVLEX)
    s = s_polynomial(f, g)
    assert s.total_degree() <= 4
    assert s == ring.parse("x^3 - 2*x*y") * ring.var("y") - ring.parse("x^2*y - 2*y^2 + x") * ring.var("x")


def test_normal_form_is_exact_remainder():
    ring, gens = case("twisted_cubic", TermOrder.LEX)
    G = groebner(gens, TermOrder.LEX).polys
    p = ring.parse("x^5*y + z^2 - 3/2*y")
    r = normal_form(p, G, TermOrder.LEX)
    syms = sp.symbols("x y z")
    q, rem = sp.reduced(sp.sympify("x**5*y + z**2 - 3*y/2"), [sp.sympify(format_polynomial(g).replace("^", "**"))
                                                                for g in G], *syms, order="lex")
    assert as_sympy([r], ["x", "y", "z"]) == {sp.expand(rem)}


def test_sugar_selection_agrees():
    _, gens = case("three_spheres")
    a = groebner(gens, opts=GroebnerOptions(selection="sugar")).polys
    b = groebner(gens).polys
    assert a == b


# random small ideals against the sympy oracle
RING2 = PolyRing(VariableCatalog.from_names(["a", "b", "c"]))
small_coeff = st.integers(-3, 3)
small_exp = st.lists(st.integers(0, 2), min_size=3, max_size=3)
small_poly = st.lists(st.tuples(small_coeff, small_exp), min_size=1, max_size=3).map(RING2.from_terms).filter(bool)


@settings(max_examples=40)
@given(st.lists(small_poly, min_size=1, max_size=3), st.sampled_from(list(TermOrder)))
def test_random_ideals_match_sympy(gens, order):
    G = groebner(gens, order)
    assert as_sympy(G.polys, ["a", "b", "c"]) == sympy_reduced(["a", "b", "c"], gens, order)
    assert all(not r for r in spoly_residues(G.polys))


@settings(max_examples=30)
@given(st.lists(small_poly, min_size=1, max_size=3))
def test_random_triviality_order_independent(gens):
    assert len({is_trivial(gens, o).status for o in TermOrder}) == 1


@settings(max_examples=30)
@given(st.lists(small_poly, min_size=1, max_size=3), st.randoms(use_true_random=False))
def test_reduce_basis_idempotent(gens, rnd):
    G = groebner(gens)
    again = reduce_basis(G.polys[::-1])
    assert again.polys == G.polys
