import math

import numpy as np
import pytest

from macjsc.exceptions import MacjscError
from macjsc.gmac import GmacParams, gmac_outer_bounds
from macjsc.instances import asymmetric_pair, binary_pair
from macjsc.mc import (
    GaussianInputs,
    McConfig,
    estimate_mi,
    gaussian_cmi_mc,
    lemma2_dominance,
    lemma5_convergence,
    lemma_on_identity,
)
from macjsc.mixture import MixtureSpec, SymbolMixture, standardize
from oracles import conditional_rate, logdet_cmi, sum_rate

CFG = McConfig(n=100_000, seed=0, sigmaN2=1.0, powers=(3.0, 4.0))


@pytest.fixture(scope="module")
def spec():
    rng = np.random.default_rng(4)

    def one(shift):
        return SymbolMixture(rng.dirichlet([1, 1]), rng.normal(shift, 0.4, 2), rng.uniform(0.3, 0.9, 2))

    return standardize(MixtureSpec((one(-0.7), one(0.7)), (one(-0.5), one(0.6))), asymmetric_pair())


@pytest.mark.parametrize("target, k", [("I1", 0), ("I2", 1), ("Isum", 2)])
def test_gaussian_inputs_match_closed_form(target, k):
    e = estimate_mi(GaussianInputs(3.0, 4.0, 0.3), None, target, CFG)
    exact = gmac_outer_bounds(GmacParams(3.0, 4.0, 1.0, 0.3))[k]
    assert abs(e.value - exact) <= 4 * e.stderr + 1e-3


@pytest.mark.parametrize("user, target", [(1, "I1c"), (2, "I2c")])
def test_conditional_rates_match_quadrature(spec, user, target):
    a = asymmetric_pair()
    e = estimate_mi(spec, a, target, CFG)
    exact = conditional_rate(spec, a.probs, user, CFG.powers, CFG.sigmaN2)
    assert abs(e.value - exact) <= 4 * e.stderr + 1e-3


def test_sum_rate_matches_quadrature(spec):
    a = asymmetric_pair()
    e = estimate_mi(spec, a, "Isum", CFG)
    exact = sum_rate(spec, a.probs, CFG.powers, CFG.sigmaN2)
    assert abs(e.value - exact) <= 4 * e.stderr + 1e-3


def test_conditioning_on_partner_source_lowers_rate(spec):
    a = asymmetric_pair()
    for c, u in (("I1c", "I1"), ("I2c", "I2")):
        ec, eu = estimate_mi(spec, a, c, CFG), estimate_mi(spec, a, u, CFG)
        assert ec.value <= eu.value + 3 * math.hypot(ec.stderr, eu.stderr)


def test_identity_gap_is_small(spec):
    chk = lemma_on_identity(spec, asymmetric_pair(), CFG)
    assert abs(chk.gap) <= 3 * chk.gap_stderr + 1e-4
    assert chk.lhs == pytest.approx(chk.rhs, abs=0.02)


def test_independent_sources_have_zero_gap():
    a = binary_pair(0.25, 0.25)
    spec = standardize(MixtureSpec.standard(2, 2, 1), a)
    e1 = estimate_mi(spec, a, "I1", McConfig(n=20_000, powers=(1.0, 1.0)))
    e1c = estimate_mi(spec, a, "I1c", McConfig(n=20_000, powers=(1.0, 1.0)))
    assert e1.value == pytest.approx(0.5, abs=0.02)
    assert e1c.value == pytest.approx(0.5, abs=0.02)


def test_seed_determinism(spec):
    a = asymmetric_pair()
    cfg = McConfig(n=20_000, seed=3, powers=(3.0, 4.0))
    assert estimate_mi(spec, a, "I1", cfg).value == estimate_mi(spec, a, "I1", cfg).value


def test_gaussian_dominates_sum_rate(spec):
    g, m = lemma2_dominance(spec, asymmetric_pair(), CFG)
    assert m.value <= g.value + 3 * m.stderr


def test_convergence_to_gaussian():
    a = binary_pair(0.25, 0.25)
    specs = [MixtureSpec.standard(2, 2, 1)]
    res = lemma5_convergence(specs, a, 0.0, McConfig(n=50_000, powers=(1.0, 1.0)))
    assert res.closed_form == pytest.approx(0.5 * math.log2(3))
    assert res.errors[0] <= 4 * res.estimates[0].stderr + 1e-3


def test_gaussian_cmi_mc_matches_logdet():
    K = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.3], [0.2, 0.3, 1.0]])
    e = gaussian_cmi_mc(K, [0], [1], [2], n=100_000, seed=0)
    assert abs(e.value - logdet_cmi(K, [0], [1], [2])) <= 4 * e.stderr


def test_config_validation():
    with pytest.raises(MacjscError):
        McConfig(n=0)
    with pytest.raises(MacjscError):
        estimate_mi(GaussianInputs(1.0, 1.0, 0.0), None, "nope", CFG)
