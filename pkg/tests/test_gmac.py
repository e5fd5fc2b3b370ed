import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macjsc.exceptions import DegenerateRho, MacjscError
from macjsc.gmac import (
    GaussianSourceParams,
    GmacParams,
    gaussian_source_conditions,
    gmac_outer_bounds,
    lemma3_rho_bound,
    lt_distortions,
    lt_induced_rho,
    lt_rate_region,
    quantizer_covariance,
    rho_feasibility_interval,
    sweep_rho,
)
from macjsc.instances import asymmetric_pair
from macjsc.mc import gaussian_cmi_mc
from macjsc.pmf import entropy, mutual_info

CASES = settings(max_examples=200, deadline=None)


def logdet_cmi(K, A, B, C=()):
    """I(A;B|C) in bits for a Gaussian vector with covariance K."""
    A, B, C = list(A), list(B), list(C)

    def ld(idx):
        return np.linalg.slogdet(K[np.ix_(idx, idx)])[1] if idx else 0.0

    return 0.5 * (ld(A + C) + ld(B + C) - ld(A + B + C) - ld(C)) / math.log(2)


def mac_cov(p: GmacParams):
    """Covariance of (X1, X2, Y) with Y = X1 + X2 + N."""
    c = p.rho * math.sqrt(p.P1 * p.P2)
    Kx = np.array([[p.P1, c], [c, p.P2]])
    K = np.zeros((3, 3))
    K[:2, :2] = Kx
    K[2, :2] = K[:2, 2] = Kx.sum(1)
    K[2, 2] = Kx.sum() + p.sigmaN2
    return K


@pytest.mark.parametrize("rho", [0.0, 0.3, -0.4, 0.9])
def test_outer_bounds_match_logdet(rho):
    p = GmacParams(3.0, 4.0, 1.0, rho)
    K = mac_cov(p)
    i1, i2, isum = gmac_outer_bounds(p)
    assert i1 == pytest.approx(logdet_cmi(K, [0], [2], [1]), abs=1e-12)
    assert i2 == pytest.approx(logdet_cmi(K, [1], [2], [0]), abs=1e-12)
    assert isum == pytest.approx(logdet_cmi(K, [0, 1], [2]), abs=1e-12)


def test_correlation_bound():
    assert lemma3_rho_bound(0.0) == 0.0
    assert lemma3_rho_bound(0.5) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(MacjscError):
        lemma3_rho_bound(-0.1)


def test_correlation_bound_on_gaussian_pair():
    # jointly Gaussian (U1, U2) attain the bound with X = U
    r = 0.6
    mi = -0.5 * math.log2(1 - r * r)
    assert lemma3_rho_bound(mi) == pytest.approx(r)


def test_interval_matches_grid_scan():
    a = asymmetric_pair()
    p = GmacParams(3.0, 4.0, 1.0)
    H1, H2, Hs = entropy(a, "U1", "U2"), entropy(a, "U2", "U1"), entropy(a, ("U1", "U2"))
    iv = rho_feasibility_interval(p, H1, H2, Hs, mutual_info(a, "U1", "U2"))
    grid = np.linspace(0, 1, 200001)
    ok = [r for r in grid if all(b > h for b, h in zip(gmac_outer_bounds(p.with_rho(r)), (H1, H2, Hs)))]
    assert iv.sum_threshold == pytest.approx(min(ok), abs=1e-5)
    assert min(iv.cap1, iv.cap2) == pytest.approx(max(ok), abs=1e-5)
    assert iv.feasible
    assert iv.hi == pytest.approx(iv.source_bound)


def test_interval_empty_when_entropy_too_large():
    iv = rho_feasibility_interval(GmacParams(0.1, 0.1), 0.9, 0.9, 1.9, 0.1)
    assert not iv.feasible
    assert iv.to_dict()["rho_min"] is None


def test_lt_rate_region_and_degenerate():
    r1, r2, rs = lt_rate_region(GmacParams(3.0, 4.0, 1.0, 0.0))
    assert (r1, r2, rs) == pytest.approx((1.0, math.log2(5) / 2, 1.5))
    with pytest.raises(DegenerateRho):
        lt_rate_region(GmacParams(3.0, 4.0, 1.0, 1.0))


def test_lt_induced_rho_and_distortions_match_covariance():
    g = GaussianSourceParams(1.0, 2.0, 0.7, 1.2, 0.8)
    K = quantizer_covariance(g)
    assert lt_induced_rho(g) == pytest.approx(K[2, 3] / math.sqrt(K[2, 2] * K[3, 3]))
    # var(U_i | W1, W2) by Schur complement
    Kww = K[2:, 2:]
    for i, d in enumerate(lt_distortions(g, lt_induced_rho(g))):
        kuw = K[i, 2:]
        assert d == pytest.approx(K[i, i] - kuw @ np.linalg.solve(Kww, kuw))


def test_lt_distortion_example():
    g = GaussianSourceParams(1.0, 1.0, 0.5, 1.0, 1.0)
    d1, _ = lt_distortions(g, 0.0)
    assert d1 == pytest.approx(0.25 * (1 - 0.25 * 0.75))


@pytest.mark.parametrize("rates", [(0.5, 0.5), (1.0, 0.3), (2.0, 1.5)])
def test_source_conditions_match_logdet(rates):
    g = GaussianSourceParams(1.0, 1.5, 0.6, *rates)
    K = quantizer_covariance(g)
    rep = gaussian_source_conditions(g, GmacParams(3.0, 4.0))
    assert rep.rows[0].lhs == pytest.approx(logdet_cmi(K, [0], [2], [3]), abs=1e-10)
    assert rep.rows[1].lhs == pytest.approx(logdet_cmi(K, [1], [3], [2]), abs=1e-10)
    assert rep.rows[2].lhs == pytest.approx(logdet_cmi(K, [0, 1], [2, 3]), abs=1e-10)


def test_source_conditions_match_monte_carlo():
    g = GaussianSourceParams(1.0, 1.0, 0.5, 1.0, 1.0)
    K = quantizer_covariance(g)
    rep = gaussian_source_conditions(g, GmacParams(3.0, 4.0))
    est = gaussian_cmi_mc(K, [0, 1], [2, 3], n=200_000, seed=1)
    assert abs(est.value - rep.rows[2].lhs) <= 4 * est.stderr


def test_quantizer_covariance_needs_positive_rate():
    with pytest.raises(MacjscError):
        quantizer_covariance(GaussianSourceParams(1.0, 1.0, 0.5, 0.0, 1.0))


def test_sweep_includes_rates_below_unit_rho():
    rows = sweep_rho(GmacParams(1.0, 1.0), [0.0, 0.5, 1.0])
    assert "R1_max" in rows[1] and "R1_max" not in rows[2]


def test_param_validation():
    with pytest.raises(MacjscError):
        GmacParams(-1.0, 1.0)
    with pytest.raises(MacjscError):
        GaussianSourceParams(1.0, 1.0, 1.5)


# -- properties -------------------------------------------------------------------


@CASES
@given(
    st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 10),
    st.floats(0.0, 1.0), st.floats(0.0, 1.0),
)
def test_bounds_monotone_in_rho(P1, P2, s, r_a, r_b):
    lo, hi = sorted((r_a, r_b))
    a = gmac_outer_bounds(GmacParams(P1, P2, s, lo))
    b = gmac_outer_bounds(GmacParams(P1, P2, s, hi))
    assert b[0] <= a[0] + 1e-12
    assert b[1] <= a[1] + 1e-12
    assert b[2] >= a[2] - 1e-12
