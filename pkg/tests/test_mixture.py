import json
import math

import numpy as np
import pytest
from sklearn.base import clone

from macjsc.exceptions import DegenerateRho, MacjscError, SymbolNotCovered, ZeroVarianceComponent
from macjsc.instances import asymmetric_pair, binary_pair
from macjsc.mixture import (
    CorrelatedGaussianMapper,
    FitResult,
    MixtureSpec,
    SymbolMixture,
    constraint_residuals,
    fit_mixture,
    induced_density,
    induced_rho,
    l2_objective,
    sample_codeword,
    standardize,
    target_norm2,
)
from oracles import quad_l2


def random_spec(rng, k=2):
    def one():
        return SymbolMixture(rng.dirichlet(np.ones(k)), rng.normal(0, 0.6, k), rng.uniform(0.2, 1.5, k))

    return MixtureSpec((one(), one()), (one(), one()))


@pytest.fixture(scope="module")
def quick_fit():
    return fit_mixture(asymmetric_pair(), 0.3, (2,), n_starts=2, seed=0, maxfev=2000)


@pytest.mark.parametrize("seed", range(4))
def test_objective_matches_quadrature(seed):
    rng = np.random.default_rng(100 + seed)
    a = asymmetric_pair()
    spec = standardize(random_spec(rng), a)
    rho = rng.uniform(-0.8, 0.8)
    obj, normed = l2_objective(spec, a, rho)
    assert obj == pytest.approx(quad_l2(spec, a.probs, rho), abs=1e-6)
    assert normed == pytest.approx(obj / target_norm2(rho))


def test_target_norm_matches_quadrature():
    from scipy import integrate

    rho = 0.3
    q = 1 - rho * rho
    f2 = lambda y, x: (math.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * q)) / (2 * math.pi * math.sqrt(q))) ** 2  # noqa: E731
    val, _ = integrate.dblquad(f2, -8, 8, -8, 8)
    assert target_norm2(rho) == pytest.approx(val, rel=1e-8)


def test_density_integrates_to_one():
    from scipy import integrate

    a = binary_pair()
    spec = standardize(random_spec(np.random.default_rng(3)), a)
    val, _ = integrate.dblquad(lambda y, x: float(induced_density(spec, a, x, y)), -9, 9, -9, 9)
    assert val == pytest.approx(1.0, abs=1e-6)


def test_standard_spec_is_product_normal():
    a = asymmetric_pair()
    spec = MixtureSpec.standard(2, 2, 1)
    assert induced_rho(spec, a) == 0.0
    _, normed = l2_objective(spec, a, 0.0)
    assert normed == pytest.approx(0.0, abs=1e-14)


def test_induced_rho_matches_sampling():
    a = asymmetric_pair()
    spec = standardize(random_spec(np.random.default_rng(7)), a)
    rng = np.random.default_rng(0)
    n = 400_000
    cells = rng.choice(4, size=n, p=a.probs.ravel())
    x1 = sample_codeword(spec, 1, cells // 2, rng)
    x2 = sample_codeword(spec, 2, cells % 2, rng)
    assert np.corrcoef(x1, x2)[0, 1] == pytest.approx(induced_rho(spec, a), abs=0.01)


def test_standardize_zeroes_residuals():
    a = asymmetric_pair()
    spec = standardize(random_spec(np.random.default_rng(11)), a)
    assert np.abs(constraint_residuals(spec, a)).max() < 1e-12


def test_validation_errors():
    a = asymmetric_pair()
    with pytest.raises(DegenerateRho):
        l2_objective(MixtureSpec.standard(), a, 1.0)
    point = SymbolMixture([1.0], [0.0], [0.0])
    spec = MixtureSpec((point, point), (point, point))
    with pytest.raises(ZeroVarianceComponent):
        l2_objective(spec, a, 0.3)
    with pytest.raises(SymbolNotCovered):
        l2_objective(MixtureSpec.standard(1, 2), a, 0.3)
    with pytest.raises(MacjscError):
        SymbolMixture([0.5, 0.6], [0.0, 0.0], [1.0, 1.0])


def test_json_round_trip():
    spec = random_spec(np.random.default_rng(1))
    back = MixtureSpec.from_json(spec.to_json())
    a = binary_pair()
    assert l2_objective(back, a, 0.2) == l2_objective(spec, a, 0.2)


def test_fit_meets_constraints(quick_fit):
    assert np.abs(quick_fit.constraint_residuals).max() <= 1e-6
    baseline = l2_objective(MixtureSpec.standard(), asymmetric_pair(), 0.3)[1]
    assert quick_fit.normalized_distortion < baseline
    assert len(quick_fit.start_objectives) == 2


def test_fit_is_deterministic(quick_fit):
    again = fit_mixture(asymmetric_pair(), 0.3, (2,), n_starts=2, seed=0, maxfev=2000)
    assert again.normalized_distortion == quick_fit.normalized_distortion


def test_fit_result_round_trip(quick_fit):
    back = FitResult.from_dict(json.loads(json.dumps(quick_fit.to_dict())))
    assert back.normalized_distortion == quick_fit.normalized_distortion
    assert l2_objective(back.spec, asymmetric_pair(), 0.3)[1] == pytest.approx(quick_fit.normalized_distortion)


def test_sample_codeword_moments():
    a = asymmetric_pair()
    spec = standardize(random_spec(np.random.default_rng(2)), a)
    x = sample_codeword(spec, 1, 0, np.random.default_rng(0), size=200_000)
    m = spec.source1[0]
    assert x.mean() == pytest.approx(m.mean(), abs=0.01)
    assert (x**2).mean() == pytest.approx(m.second_moment(), abs=0.02)


def test_mapper_estimator_api():
    rng = np.random.default_rng(0)
    a = asymmetric_pair()
    X = np.column_stack(np.unravel_index(rng.choice(4, 3000, p=a.probs.ravel()), (2, 2)))
    est = CorrelatedGaussianMapper(rho=0.3, n_starts=1, maxfev=1000, powers=(3.0, 4.0))
    assert clone(est).get_params() == est.get_params()
    out = est.fit(X).transform(X)
    assert out.shape == (3000, 2)
    assert est.score() <= 0
    assert np.var(out[:, 1]) == pytest.approx(4.0, rel=0.1)


def test_mapper_accepts_known_pmf():
    est = CorrelatedGaussianMapper(n_starts=1, maxfev=500).fit(source_pmf=asymmetric_pair())
    assert est.source_pmf_.names == ("U1", "U2")
