import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorffcs import coherent
from hausdorffcs.coherent import (
    CoherentState,
    CSParams,
    action_identity_residual,
    normalization,
    normalization_terms,
    overlap,
    resolution_weight,
)
from hausdorffcs.errors import ConvergenceError, DomainError
from hausdorffcs.moments import BesselIExp, BesselK, CoulombAlt, CoulombExact, GeneralPower, rho
from hausdorffcs.weights import WeightFunction

EXAMPLE = GeneralPower(a=1.0, nu=0.0, k=2, l=1)
FAMILIES = [EXAMPLE, GeneralPower(a=1.0, nu=0.25, k=3, l=2), BesselK(), BesselIExp(), CoulombExact(), CoulombAlt()]


class TestNormalization:
    @pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label)
    def test_zero_action(self, family):
        assert normalization(family, 0.0) == 1.0
        assert normalization_terms(family, 0.0).terms == 1

    @pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label)
    def test_series_is_warning_free(self, family):
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            assert normalization(family, 0.7) > 1.0
            assert abs(overlap(family, CSParams(0.7, 0.0), CSParams(0.7, 1.0))) < 1.0

    def test_general_example(self):
        oracle = math.fsum(math.exp(math.sqrt(n + 1.0) - 1.0) * 0.5**n for n in range(10_000))
        assert normalization(EXAMPLE, 0.5) == pytest.approx(oracle, rel=1e-12)

    def test_coulomb_exact_example(self):
        oracle = math.fsum(2.0 * (n + 1.0) / (n + 2.0) * 0.5**n for n in range(10_000))
        assert normalization(CoulombExact(), 0.5) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label)
    def test_increasing_and_convex(self, family):
        J = np.linspace(0.0, 0.95, 20)
        values = np.array([normalization(family, j) for j in J])
        assert values[0] == 1.0
        assert np.all(values >= 1.0)
        assert np.all(np.diff(values) > 0.0)
        assert np.all(np.diff(values, 2) > 0.0)

    @pytest.mark.parametrize("family", [CoulombExact(), CoulombAlt()], ids=lambda f: f.label)
    @pytest.mark.parametrize("J", [0.1, 0.5, 0.9])
    def test_truncation_budget(self, family, J):
        summary = normalization_terms(family, J)
        predicted = math.log(coherent.SERIES_TOL) / math.log(J)
        assert coherent.MIN_TERMS < summary.terms <= 2.0 * predicted + coherent.MIN_TERMS
        assert 0.0 <= summary.tail_bound <= coherent.SERIES_TOL * summary.value

    def test_tail_bound_certifies_remainder(self):
        J = 0.8
        summary = normalization_terms(CoulombExact(), J, tol=1e-8)
        n = np.arange(summary.terms, 20_000)
        remainder = math.fsum(J**n / rho(CoulombExact(), n))
        assert remainder <= summary.tail_bound

    @pytest.mark.parametrize("J", [-0.1, 1.0, 1.5, float("nan")])
    def test_action_domain(self, J):
        with pytest.raises(DomainError):
            normalization(EXAMPLE, J)

    def test_too_close_to_radius(self):
        with pytest.raises(ConvergenceError):
            normalization(EXAMPLE, 1.0 - 1e-10)

    def test_term_budget(self):
        with pytest.raises(ConvergenceError):
            coherent._sum_series(CoulombExact(), 0.99, 1e-14, max_terms=100)

    def test_tolerance_domain(self):
        with pytest.raises(DomainError):
            normalization(EXAMPLE, 0.5, tol=0.0)


class TestActionIdentity:
    @pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label)
    @pytest.mark.parametrize("J", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_residual_vanishes(self, family, J):
        assert abs(action_identity_residual(family, J)) <= 1e-10

    @pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.label)
    def test_zero_action(self, family):
        assert action_identity_residual(family, 0.0) == 0.0


class TestOverlap:
    def test_self_overlap(self):
        p = CSParams(0.3, 0.0)
        assert overlap(EXAMPLE, p, p) == pytest.approx(1.0, abs=1e-12)
        q = CSParams(0.6, 2.5)
        assert overlap(CoulombAlt(), q, q) == pytest.approx(1.0, abs=1e-12)

    def test_opposite_phase(self):
        value = overlap(EXAMPLE, CSParams(0.3, 0.0), CSParams(0.3, math.pi))
        assert abs(value) < 1.0

    def test_vacuum(self):
        J = 0.4
        value = overlap(EXAMPLE, CSParams(0.0, 0.0), CSParams(J, 1.3))
        assert value == pytest.approx(1.0 / math.sqrt(normalization(EXAMPLE, J)), rel=1e-13)

    def test_conjugate_symmetry(self):
        p1, p2 = CSParams(0.2, 0.5), CSParams(0.7, -1.0)
        assert overlap(CoulombExact(), p1, p2) == pytest.approx(overlap(CoulombExact(), p2, p1).conjugate(), abs=1e-13)

    @settings(max_examples=60, deadline=None)
    @given(
        J1=st.floats(min_value=0.0, max_value=0.95),
        J2=st.floats(min_value=0.0, max_value=0.95),
        g1=st.floats(min_value=-10.0, max_value=10.0),
        g2=st.floats(min_value=-10.0, max_value=10.0),
    )
    def test_cauchy_schwarz(self, J1, J2, g1, g2):
        assert abs(overlap(EXAMPLE, CSParams(J1, g1), CSParams(J2, g2))) <= 1.0 + 1e-10

    @pytest.mark.parametrize("kwargs", [dict(J=1.0), dict(J=-0.5), dict(J=0.5, gamma=float("inf"))])
    def test_params_validation(self, kwargs):
        with pytest.raises(DomainError):
            CSParams(**kwargs)


class TestCoherentState:
    def test_coefficients_normalised(self):
        state = CoherentState(EXAMPLE, CSParams(0.5, 1.0))
        c = state.coefficients(400)
        assert c.shape == (401,)
        assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, rel=1e-12)
        assert c[0] == pytest.approx(1.0 / math.sqrt(state.norm()), rel=1e-13)

    def test_vacuum_coefficients(self):
        c = CoherentState(EXAMPLE, CSParams(0.0, 2.0)).coefficients(5)
        np.testing.assert_array_equal(c, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0])

    def test_overlap_matches_coefficients(self):
        a = CoherentState(CoulombAlt(), CSParams(0.5, 0.3))
        b = CoherentState(CoulombAlt(), CSParams(0.4, 2.0))
        assert a.overlap(b) == pytest.approx(np.vdot(a.coefficients(300), b.coefficients(300)), abs=1e-12)

    def test_overlap_needs_same_family(self):
        with pytest.raises(DomainError):
            CoherentState(EXAMPLE, CSParams(0.5)).overlap(CoherentState(CoulombAlt(), CSParams(0.5)))

    @pytest.mark.parametrize("n_max", [-1, 2.5])
    def test_coefficients_domain(self, n_max):
        with pytest.raises(DomainError):
            CoherentState(EXAMPLE, CSParams(0.5)).coefficients(n_max)


class TestResolutionWeight:
    def test_product_form(self):
        x = np.array([0.1, 0.5, 0.9])
        expected = np.array([normalization(EXAMPLE, v) for v in x]) * WeightFunction(EXAMPLE)(x)
        np.testing.assert_allclose(resolution_weight(EXAMPLE, x), expected, rtol=1e-14)
        assert isinstance(resolution_weight(EXAMPLE, 0.5), float)

    @pytest.mark.parametrize("x", [0.0, 1.0 - 1e-7, 1.0, -0.2])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            resolution_weight(EXAMPLE, x)
