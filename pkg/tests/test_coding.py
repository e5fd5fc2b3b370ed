import math

import numpy as np
import pytest

from macjsc import make_joint
from macjsc.coding import (
    EVENTS,
    AwgnMapping,
    Codebooks,
    CodebookConfig,
    decode_block,
    encode_block,
    generate_codebooks,
    run_experiment,
    sweep_blocklengths,
)
from macjsc.exceptions import BudgetExceeded, DecodeError, MacjscError
from macjsc.instances import binary_pair, lossless_adder_system, lossless_random_input_system
from macjsc.mixture import MixtureSpec


def independent_system():
    return lossless_random_input_system(make_joint([("U1", 2), ("U2", 2)], np.full((2, 2), 0.25)))


def test_codebook_sizes():
    cfg = CodebookConfig(independent_system(), 6, delta=0.2)
    # identity encoders: I(U;W) = H(U) = 1 bit
    assert cfg.codebook_rates() == pytest.approx((1.2, 1.2))
    assert cfg.codebook_sizes() == (math.ceil(2 ** 7.2),) * 2


def test_budget():
    with pytest.raises(BudgetExceeded) as e:
        generate_codebooks(CodebookConfig(independent_system(), 20, max_codewords=1000))
    assert e.value.count > 1000


def test_config_validation():
    with pytest.raises(MacjscError):
        CodebookConfig(independent_system(), 0)
    with pytest.raises(MacjscError):
        CodebookConfig(independent_system(), 4, eps=0.0)


def test_encode_decode_round_trip():
    cfg = CodebookConfig(independent_system(), 8, seed=0)
    rng = np.random.default_rng(1)
    book = generate_codebooks(cfg, rng)
    # source blocks copied from codewords, so a typical codeword exists
    src = {"U1": book.w[0][5].copy(), "U2": book.w[1][9].copy()}
    i1 = encode_block(cfg, 1, src, book)
    i2 = encode_block(cfg, 2, src, book)
    assert i1 <= 5 and i2 <= 9
    # identity encoder: the chosen codeword reproduces the source block
    np.testing.assert_array_equal(book.w[0][i1], src["U1"])
    np.testing.assert_array_equal(book.w[1][i2], src["U2"])
    y = 4 * book.x[0][i1] + book.x[1][i2]
    d1, d2 = decode_block(cfg, {"Y": y}, book)
    np.testing.assert_array_equal(book.w[0][d1], src["U1"])
    np.testing.assert_array_equal(book.w[1][d2], src["U2"])


def test_decode_reports_no_candidate():
    cfg = CodebookConfig(independent_system(), 4, seed=0)
    book = generate_codebooks(cfg, np.random.default_rng(0))
    # every channel codeword is all-zero, so output 5 = (1, 1) is unreachable
    book = Codebooks(book.w, (np.zeros_like(book.x[0]), np.zeros_like(book.x[1])), book.rates)
    with pytest.raises(DecodeError) as e:
        decode_block(cfg, {"Y": np.full(4, 5)}, book)
    assert e.value.kind == "none"


def test_e1_rate_matches_closed_form():
    n, trials = 4, 2000
    cfg = CodebookConfig(independent_system(), n, trials=trials, seed=0)
    res = run_experiment(cfg)
    M = cfg.codebook_sizes()[0]
    miss = (1 - 2.0**-n) ** M
    expect = 1 - (1 - miss) ** 2
    se = math.sqrt(expect * (1 - expect) / trials)
    assert abs(res.rate("E1") - expect) <= 4 * se


def test_events_partition_errors():
    res = run_experiment(CodebookConfig(lossless_adder_system((), False, source=binary_pair()), 6, trials=100))
    assert set(res.counts) == set(EVENTS)
    assert sum(res.counts.values()) == res.errors == sum(res.per_trial_errors)
    assert res.successes == res.trials - res.errors
    d = res.to_dict()
    assert d["error_rate"] == res.error_rate


def test_failures_cost_at_least_their_share():
    res = run_experiment(CodebookConfig(independent_system(), 4, trials=200))
    # Hamming distortion is at most 1; every success is lossless here
    assert res.distortion_success == (0.0, 0.0)
    assert res.distortion[0] <= res.error_rate + 1e-12


def test_determinism():
    cfg = CodebookConfig(lossless_random_input_system(), 6, trials=50, seed=7)
    assert run_experiment(cfg).per_trial_errors == run_experiment(cfg).per_trial_errors


def test_error_rate_falls_with_blocklength():
    res = sweep_blocklengths(CodebookConfig(independent_system(), 4, trials=300, seed=0), [4, 8, 12])
    rates = [r.error_rate for r in res]
    assert rates[0] > rates[1] > rates[2]


def test_infeasible_worse_than_feasible():
    bad = run_experiment(CodebookConfig(lossless_adder_system((), False, source=binary_pair()), 8, trials=200))
    good = run_experiment(CodebookConfig(independent_system(), 8, trials=200))
    assert bad.error_rate > good.error_rate + 0.15


def test_awgn_toy_run():
    cfg = CodebookConfig(
        independent_system(), 2, trials=20, seed=0,
        awgn=AwgnMapping(MixtureSpec.standard(2, 2, 1), 3.0, 4.0, 1.0),
    )
    res = run_experiment(cfg)
    assert sum(res.counts.values()) == res.errors
    assert 0 <= res.error_rate <= 1
