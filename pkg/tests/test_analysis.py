import numpy as np
import pytest
from hypothesis import given, strategies as st

from cbhmetric.analysis import (
    chebyshev_grid,
    eigencurve_table,
    equidistant_first_order,
    find_gamma_critical,
    fit_series,
    leading_order_estimate,
    positivity,
    power_pattern,
)
from cbhmetric.errors import NonPositiveMetric, NoSignChange
from cbhmetric.families import family_matrix, named_family, theta2


def test_positivity_examples():
    rep = positivity(theta2(0.4), gamma=0.4)
    assert np.allclose(rep.eigenvalues, [0.6, 1.4])
    assert rep.positive_definite
    assert np.isclose(rep.anisotropy, 0.8)
    for fam, N in (("zero_param", 4), ("chessboard", 6), ("linearized", 3)):
        assert np.allclose(positivity(family_matrix(fam, N, 0.0)).eigenvalues, 1)
    assert not positivity(np.diag([1.0, -1e-3])).positive_definite


@pytest.mark.parametrize("family,N,expected", [
    ("zero_param", 3, 1 / np.sqrt(2)),
    ("zero_param", 4, 1 / np.sqrt(2)),
    ("chessboard", 5, 0.5558929700),
    ("chessboard", 6, 0.5),
])
def test_critical_gamma(family, N, expected):
    res = find_gamma_critical(family, N)
    assert abs(res.gamma_critical - expected) <= 1e-8
    lo, hi = res.bracket
    assert hi - lo <= 1e-10
    assert positivity(family_matrix(family, N, lo)).positive_definite
    assert not positivity(family_matrix(family, N, hi)).positive_definite


def test_critical_gamma_is_deterministic():
    a = find_gamma_critical("chessboard", 5)
    b = find_gamma_critical("chessboard", 5)
    assert a.gamma_critical == b.gamma_critical and a.bracket == b.bracket


def test_critical_gamma_no_sign_change():
    with pytest.raises(NoSignChange) as info:
        find_gamma_critical("delta_rule", 3)
    assert info.value.min_eigenvalue > 0
    with pytest.raises(NoSignChange):
        find_gamma_critical("delta_rule", 4, {"nu": 2})


def test_critical_gamma_rejects_non_positive_start():
    with pytest.raises(NonPositiveMetric):
        find_gamma_critical("general", 3, {"params": [1.0, 2.0, 0.0]})


def test_series_examples():
    fit = fit_series("chessboard", 6)
    assert np.allclose(fit.A, [-5, -3, -1, 1, 3, 5], atol=1e-3)
    assert np.allclose(fit.B, [10, 6, 4, 4, 6, 10], atol=1e-3)
    assert fit.residual <= 1e-6
    fit = fit_series("zero_param", 4)
    assert np.allclose(fit.A, [-3, -1, 1, 3], atol=1e-4)
    assert np.allclose(fit.B, [3, 1, 1, 3], atol=1e-3)
    fit = fit_series("linearized", 5)
    assert np.allclose(fit.A, [-4, -2, 0, 2, 4], atol=1e-8)
    assert np.allclose(fit.B, 0, atol=1e-6)


@pytest.mark.parametrize("N", range(2, 9))
def test_equidistant_first_order(N):
    assert np.allclose(fit_series("zero_param", N).A, equidistant_first_order(N), atol=1e-4)


def test_leading_order_estimate():
    assert np.isclose(leading_order_estimate(4), 1 / 3)
    assert np.isclose(leading_order_estimate(6), 0.2)
    assert leading_order_estimate(2) == 1.0
    with pytest.raises(ValueError):
        leading_order_estimate(1)


def test_eigencurve_table_layout():
    t = eigencurve_table("chessboard", 5, [0.2, 0.0, 0.1])
    assert t.columns == ["gamma", "theta_1", "theta_2", "theta_3", "theta_4", "theta_5"]
    assert list(t.gamma) == [0.0, 0.1, 0.2]
    assert np.allclose(t.eigenvalues[0], 1)
    text = t.to_csv()
    assert "\r" not in text and text.startswith("gamma,theta_1")
    assert text == eigencurve_table("chessboard", 5, [0.0, 0.1, 0.2]).to_csv()
    with pytest.raises(ValueError):
        eigencurve_table("chessboard", 5, [0.5, 1.0])


def test_chebyshev_grid():
    g = chebyshev_grid(12)
    assert len(g) == 12 and np.all(np.diff(g) > 0) and np.all(np.abs(g) < 1)


@pytest.mark.parametrize("N", [5, 6])
def test_power_pattern_rules(N):
    coef, allowed = power_pattern("chessboard", N)
    assert np.max(np.abs(coef[~allowed])) <= 1e-9
    # first-row entries are single monomials gamma^(j-1) (or vanish)
    for j in range(N):
        assert set(np.nonzero(np.abs(coef[0, j]) > 1e-9)[0]) <= {j}
    assert np.isclose(coef[0, 1, 1], np.sqrt(N - 1))
    assert np.all(np.abs(np.diagonal(coef[:, :, 0]) - 1) <= 1e-9)


@given(gamma=st.floats(0.0, 0.49))
def test_positivity_threshold_property(gamma):
    T = named_family(6, "chessboard", gamma).matrix
    rep = positivity(T)
    assert rep.positive_definite == (rep.min_eigenvalue > rep.threshold)
    assert len(rep.eigenvalues) == 6
