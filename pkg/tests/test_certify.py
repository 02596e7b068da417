import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crnid.certify import (
    CRITERION_DISCRIMINATION,
    CRITERION_GENERAL,
    CRITERION_POSITIVE,
    CertifyOptions,
    ConstraintSet,
    DegenerateData,
    Status,
    certify_discriminability,
    certify_identifiability,
    constraints_from_decl,
    discriminate_from_data,
    exact_witness_at,
    exactly_one_constraints,
    find_rank_drop_witness,
    identifiability_ideal,
    mixed_constraints,
    point_values,
    positivity_constraints,
    solve_stationary,
    verdict_report,
)
from crnid.crn import stationary_matrix
from crnid.groebner import normal_form
from crnid.poly import evaluate
from crnid.symmat import canonical_key

from conftest import network
from test_symmat import minor_rank

EX1_POSITIVE_IDEAL = ["k1*y1^2 - 1", "k2*y2^2 - 1", "k3*y3^2 - 1", "k1 - k2*x1 - k3*x1^2",
                      "k1 - k3*(4*p11*x1 - x1^2) - k2*(2*p11 - x1)",
                      "2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2"]
EX1_MIXED_IDEAL = ["k1 - k2*x1 - k3*x1^2", "k1 - k3*(4*p11*x1 - x1^2) - k2*(2*p11 - x1)",
                   "k1*y1^2 - 1", "k2*y2^2 - 1", "k3 - y3^2",
                   "2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2"]
EX1_DISCR_IDEAL = ["k1 - k2*x1 - k3*x1^2", "k1 - k3*(4*p11*x1 - x1^2) - k2*(2*p11 - x1)",
                   "k1*y1^2 - 1", "k2 - y2^2", "k3 - y3^2", "k2*k3", "(k2 + k3)*y4^2 - 1",
                   "2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2"]


def keys(ideal):
    return {canonical_key(p) for p in ideal.generators()}


def expected_keys(ideal, texts):
    return {canonical_key(ideal.ring.parse(t)) for t in texts}


class TestConstraintSets:
    def test_lift_polynomials(self):
        K = mixed_constraints([("strict", 1), ("strict", 2), ("nonneg", 3)])
        ring = K.ring()
        assert K.polynomials(ring) == [ring.parse("k1*y1^2 - 1"), ring.parse("k2*y2^2 - 1"), ring.parse("k3 - y3^2")]

    def test_exactly_one_sets(self):
        K1, K2, Ku = exactly_one_constraints(3, 2, 3)
        assert K1.contains([1, 1, 0]) and not K1.contains([1, 0, 1])
        assert K2.contains([1, 0, 1]) and not K2.contains([1, 1, 0])
        assert Ku.contains([1, 1, 0]) and Ku.contains([1, 0, 1])
        assert not Ku.contains([1, 1, 1]) and not Ku.contains([1, 0, 0])
        assert Ku.slack_names == ["y1", "y2", "y3", "y4"]

    @given(st.lists(st.fractions(min_value=0, max_value=5, max_denominator=5), min_size=3, max_size=3))
    def test_lift_exists_exactly_on_k(self, k):
        _, _, Ku = exactly_one_constraints(3, 2, 3)
        sq = Ku.lift_squares(k)
        if sq is None:
            assert not Ku.contains(k)
            return
        ring = Ku.ring()
        # substitute y^2 through the squared slack values: every lift vanishes
        for p in Ku.polynomials(ring):
            val = Fraction(0)
            for c, ex in p.exponent_terms():
                term = Fraction(c)
                for name, e in zip(ring.catalog.names, ex):
                    if name.startswith("k"):
                        term *= Fraction(k[int(name[1:]) - 1]) ** e
                    elif e:
                        assert e % 2 == 0
                        term *= sq[name] ** (e // 2)
                val += term
            assert val == 0

    def test_invalid_sets(self):
        with pytest.raises(ValueError):
            ConstraintSet(2, ("strict",))
        with pytest.raises(ValueError):
            exactly_one_constraints(3, 2, 2)
        with pytest.raises(ValueError):
            mixed_constraints([("strict", 1), ("strict", 1)])

    def test_from_file_declaration(self):
        doc = network("r1_nonneg")
        assert constraints_from_decl(doc.constraints, 3).describe() == "k1 > 0, k2 > 0, k3 >= 0"
        doc = network("r8")
        assert constraints_from_decl(doc.constraints, 6).pairs == ((5, 6),)


class TestIdealAssembly:
    def test_example1_positive_ideal(self):
        ideal = identifiability_ideal(network("r1").model, positivity_constraints(3))
        assert keys(ideal) == expected_keys(ideal, EX1_POSITIVE_IDEAL)
        assert ideal.raw_count == 8

    def test_example1_mixed_ideal(self):
        K = mixed_constraints([("strict", 1), ("strict", 2), ("nonneg", 3)])
        ideal = identifiability_ideal(network("r1").model, K)
        assert keys(ideal) == expected_keys(ideal, EX1_MIXED_IDEAL)

    def test_example1_discrimination_ideal(self):
        _, _, Ku = exactly_one_constraints(3, 2, 3)
        ideal = identifiability_ideal(network("r1").model, Ku)
        assert keys(ideal) == expected_keys(ideal, EX1_DISCR_IDEAL)

    def test_priority_orders_cover_same_generators(self):
        m = network("r4").model
        a = identifiability_ideal(m, positivity_constraints(5), CertifyOptions(priority="minors_first"))
        b = identifiability_ideal(m, positivity_constraints(5), CertifyOptions(priority="lifts_first"))
        assert keys(a) == keys(b)
        assert a.generators().polys[0].total_degree() >= 2  # minors lead


class TestCertification:
    @pytest.mark.parametrize("name", ["r1", "r3", "r4", "r5", "r7"])
    def test_positive_rates_certified(self, name):
        v = certify_identifiability(network(name).model)
        assert v.status is Status.CERTIFIED and v.criterion == CRITERION_POSITIVE
        assert v.exit_code == 0

    def test_mixed_set_certified(self):
        doc = network("r1_nonneg")
        v = certify_identifiability(doc.model, constraints_from_decl(doc.constraints, 3))
        assert v.certified and v.criterion == CRITERION_GENERAL

    @pytest.mark.parametrize("name,pair", [("r1", (2, 3)), ("r8", (5, 6)), ("r9", (5, 6))])
    def test_discrimination_certified(self, name, pair):
        v = certify_discriminability(network(name).model, *pair)
        assert v.certified and v.criterion == CRITERION_DISCRIMINATION

    def test_lifts_first_order_same_verdict(self):
        v = certify_identifiability(network("r4").model, opts=CertifyOptions(priority="lifts_first"))
        assert v.certified

    def test_budget_gives_inconclusive(self):
        v = certify_identifiability(network("feedback").model, opts=CertifyOptions(max_pairs=200))
        assert v.status is Status.INCONCLUSIVE and "budget" in v.reason and v.exit_code == 2

    def test_nonneg_states_still_certified(self):
        v = certify_identifiability(network("r1").model, opts=CertifyOptions(nonneg_states=True))
        assert v.certified and "nonnegative_states_lifted" in v.assumptions
        assert v.num_vars == 9

    def test_unit_certificate_cofactors(self):
        m = network("r1").model
        ideal = identifiability_ideal(m, positivity_constraints(3))
        v = certify_identifiability(m, opts=CertifyOptions(track_cofactors=True))
        gens = ideal.generators().polys
        cof = v.basis.cofactors[0]
        combo = sum((c * g for c, g in zip(cof, gens)), ideal.ring.zero())
        assert combo.is_constant() and combo

    def test_report_schema(self):
        v = certify_identifiability(network("r1").model)
        rep = verdict_report(v, network("r1").model, timing=False)
        for key in ["tool_version", "crn", "theorem", "verdict", "ideal", "basis_stats", "witness",
                    "assumptions", "timing_ms"]:
            assert key in rep
        assert rep["verdict"] == "certified" and rep["timing_ms"] is None
        assert rep["assumptions"][0] == "unique_stable_equilibrium"


class TestStationarySolve:
    def test_example1_closed_form(self):
        m = network("r1").model
        sol = solve_stationary(m, [1, 1, 1])
        x = (-1 + 5 ** 0.5) / 2
        assert abs(sol.x[0] - x) < 1e-10
        # P from the scalar Lyapunov equation 2(-k2 - 2 k3 x) p + k1 + k2 x + k3 x^2 = 0
        p = (1 + x + x * x) / (2 * (1 + 2 * x))
        assert abs(sol.P[0, 0] - p) < 1e-10

    def test_feedback_point(self):
        sol = solve_stationary(network("feedback").model, [10, 1, 10, 1, 1, 10])
        assert np.allclose(sol.x, [10, 10 / 11], atol=1e-10, rtol=0)
        assert np.allclose(sol.P, [[10, 0], [0, 10 / 11]], atol=1e-10, rtol=0)

    def test_residuals_vanish(self):
        m = network("r7").model
        sol = solve_stationary(m, [3, 1, 2, 1, 1, 1])  # equilibrium x = (2, 1/2, 2)
        A = stationary_matrix(m).A
        from crnid.certify import evaluate_matrix_float
        An = evaluate_matrix_float(A, point_values(m, sol.x, sol.P))
        assert np.linalg.norm(An @ np.array([3, 1, 2, 1, 1, 1], dtype=float)) < 1e-8

    @pytest.mark.parametrize("name,r", [("r1", 3), ("r3", 3), ("r4", 5)])
    @pytest.mark.parametrize("a", [Fraction(2), Fraction(1, 3)])
    def test_scale_gauge(self, name, r, a):
        m = network(name).model
        rng = random.Random(name)
        k = [Fraction(rng.randint(1, 4), rng.randint(1, 2)) for _ in range(r)]
        s1 = solve_stationary(m, k)
        s2 = solve_stationary(m, [a * v for v in k])
        assert np.allclose(s1.x, s2.x, atol=1e-9) and np.allclose(s1.P, s2.P, atol=1e-9)

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            solve_stationary(network("r1").model, [1, 0, 1])
        with pytest.raises(ValueError):
            solve_stationary(network("r1").model, [1, 1])


class TestWitness:
    def test_feedback_witness_verified_independently(self):
        m = network("feedback").model
        k = [10, 1, 10, 1, 1, 10]
        x = [Fraction(10), Fraction(10, 11)]
        P = [[Fraction(10), 0], [0, Fraction(10, 11)]]
        w = exact_witness_at(m, k, x, P)
        assert w is not None and w.rank < m.r - 1
        A = stationary_matrix(m).A.evaluate(point_values(m, x, P))
        assert minor_rank(A) == w.rank
        assert all(sum(a * b for a, b in zip(row, w.null_vector)) == 0 for row in A)
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in A)

    def test_search_finds_feedback_witness(self):
        s = find_rank_drop_witness(network("feedback").model, candidates=[[10, 1, 10, 1, 1, 10]])
        assert s.witness is not None and s.verdict_status is Status.NOT_IDENTIFIABLE

    @pytest.mark.parametrize("name", ["r1", "r3", "r4"])
    def test_certified_networks_have_no_witness_on_grid(self, name):
        m = network(name).model
        assert find_rank_drop_witness(m, samples=15, seed=1).witness is None

    def test_example1_rank_two_on_integer_grid(self):
        m = network("r1").model
        A = stationary_matrix(m).A
        for k in [(a, b, c) for a in (1, 2, 3) for b in (1, 2, 3) for c in (1, 2, 3)]:
            sol = solve_stationary(m, k)
            An = [[complex(0)]]
            from crnid.certify import evaluate_matrix_float
            An = evaluate_matrix_float(A, point_values(m, sol.x, sol.P))
            assert np.linalg.matrix_rank(An, tol=1e-9) == 2


class TestDataDiscrimination:
    def _moments(self, m, k):
        sol = solve_stationary(m, k, strict=False)
        return sol.x, sol.P

    def test_r8_model_1(self):
        m = network("r8").model
        x, P = self._moments(m, [1, 1, 1, 1, 2, 0])
        d = discriminate_from_data(m, (5, 6), x, P)
        assert d.c1 <= 1e-12 and d.c2 >= 1e-4 and d.selected == 1

    def test_r8_model_2(self):
        m = network("r8").model
        x, P = self._moments(m, [1, 1, 1, 1, 0, 2])
        d = discriminate_from_data(m, (5, 6), x, P)
        assert d.c2 <= 1e-12 and d.c1 >= 1e-4 and d.selected == 2

    def test_minimizer_is_scaled_generator(self):
        m = network("r8").model
        k = np.array([1, 1, 1, 1, 2, 0], dtype=float)
        x, P = self._moments(m, k)
        d = discriminate_from_data(m, (5, 6), x, P)
        assert np.allclose(np.array(d.k1), k / np.linalg.norm(k), atol=1e-6)

    def test_degenerate_moments(self):
        m = network("r8").model
        with pytest.raises(DegenerateData):
            discriminate_from_data(m, (5, 6), [0, 0], [[0, 0], [0, 0]])
        with pytest.raises(ValueError):
            discriminate_from_data(m, (5, 6), [1, 1], [[1, 2], [0, 1]])
