import math

import mpmath
import pytest

import lkl


def test_spherical_matrix_element_closed_form():
    for rho in (0.5, 1.0, 2.0):
        for lam in (0.3, 1.0, 2.5):
            expected = math.sin(rho * lam) / (rho * math.sinh(lam))
            assert abs(lkl.umat(0, rho, 0, 0, 0, lam) - expected) < 1e-12
    assert abs(lkl.umat(0, 1.0, 0, 0, 0, 1.0).real - 0.7160) < 1e-4


def test_exact_and_quadrature_matrix_elements_agree():
    for l0, l, m, lp in ((0, 1, 0, 2), (1, 1, 1, 2), (1, 2, 0, 2)):
        a = lkl.umat(l0, 1.2, l, m, lp, 0.9)
        b = lkl.umat_quadrature(l0, 1.2, l, m, lp, 0.9)
        assert abs(a - b) < 1e-9


def test_b_closed_form_matches_integral():
    for l in (1, 2, 3):
        for lam in (0.5, 2.0):
            assert abs(lkl.b_component(l, lam) - lkl.b_component_integral(l, lam)) < 1e-10


def test_f0_series_against_mpmath_quadrature():
    mpmath.mp.dps = 30
    for z in (1.5, 2.0, 5.0):
        value, error, terms = lkl.f0_series(z)
        oracle = mpmath.quad(lambda x: mpmath.exp(-z * x * mpmath.coth(x)), [0, 1, 5, mpmath.inf])
        assert abs(value - complex(oracle)) < 1e-10 * abs(value)
        assert terms > 0
        assert error < 1e-10


def test_q0_weights_positive():
    for rho in (0.0, 0.5, 2.0, 4.0):
        assert lkl.kweight(0, [], 0, rho, 2.0).real > 0


def test_supplementary_component_threshold():
    trace, supp = lkl.decomposition_weight(0, [], 0, 1.0, 0.5)
    assert trace >= 0 and supp is not None and supp > 0
    trace, supp = lkl.decomposition_weight(0, [], 0, 1.0, 2.0)
    assert trace >= 0 and supp is None


def test_pole_and_domain_errors():
    with pytest.raises(lkl.PoleError):
        lkl.projection("u_to_cl", 1, 1, 0, 0.0, 1.0)
    with pytest.raises(ValueError):
        lkl.kweight(1, [], 0, 1.0, 2.0)


def test_bound_state_bracket_limit():
    assert lkl.bound_state_bracket_limit() == pytest.approx(-4 * math.pi * (math.log(4) - 1))
    assert abs(lkl.bound_state_bracket_sum(200) - lkl.bound_state_bracket_limit()) < 0.05


def test_suite_listing():
    assert set(lkl.suite_names()) >= {"consistency", "kernels", "series", "residues", "laurent", "all"}
