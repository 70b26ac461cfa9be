"""Verification driver: suite runner, individual checks and the moment oracle."""

import random

import pytest

from palab.scalar import Laurent, Numeric
from palab.verify import (
    REGISTRY,
    SUITES,
    Context,
    SuiteConfig,
    moment_oracle,
    prop_alpha,
    prop_hilbert,
    report_markdown,
    run_suite,
    v_space_report,
)


def d(p):
    return Laurent.monomial(p)


def test_moment_oracle_values():
    assert moment_oracle(0) == Laurent.constant(1)
    assert moment_oracle(1).is_zero()
    assert moment_oracle(2) == d(2)
    assert moment_oracle(4) == d(4) * 2 + d(2)
    assert moment_oracle(4, 2.0) == Numeric(36.0, 2.0)


def motzkin_weight_bruteforce(m):
    """Sum over all step words of length m of the weighted path product (independent enumeration)."""
    import itertools
    total = Laurent()
    for word in itertools.product((1, 0, -1), repeat=m):
        h, w, ok = 0, Laurent.constant(1), True
        for s in word:
            if s == 1:
                w = w * d(1)
            elif s == -1:
                if h == 0:
                    ok = False
                    break
                w = w * d(1)
            else:
                if h == 0:
                    ok = False
                    break
            h += s
        if ok and h == 0:
            total = total + w
    return total


@pytest.mark.parametrize("m", range(0, 9))
def test_moment_oracle_matches_bruteforce(m):
    assert moment_oracle(m) == motzkin_weight_bruteforce(m)


def test_suite_names():
    names = [c.name for c in REGISTRY]
    assert len(names) == len(set(names))
    assert set(SUITES["structural"]) | set(SUITES["numeric"]) == set(names)


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(mode="exact", delta=2.0)
    with pytest.raises(ValueError):
        SuiteConfig(mode="numeric")


def test_exact_structural_suite_passes():
    cfg = SuiteConfig(k_range=(0, 1), r_range=(1,), N=3, samples=5)
    rep = run_suite(cfg)
    assert rep["summary"]["fail"] == 0
    assert rep["summary"]["pass"] == len(SUITES["structural"])


def test_numeric_commutant_checks_pass():
    cfg = SuiteConfig(mode="numeric", delta=2.5, k_range=(0, 1), r_range=(1,), N=2,
                      checks=("commutant", "lambda_rigidity", "cup_orthogonality", "v_space"))
    rep = run_suite(cfg)
    assert rep["summary"] == {"pass": 4, "fail": 0, "skipped": 0}


def test_positivity_checks_skip_below_two():
    cfg = SuiteConfig(mode="numeric", delta=1.5, k_range=(0,), r_range=(1,),
                      checks=("gram_positivity", "norm_bounds"))
    rep = run_suite(cfg)
    assert all(c["status"] == "skipped" and "positive" in c["reason"] for c in rep["checks"])


def test_reports_are_deterministic():
    cfg = SuiteConfig(k_range=(1,), r_range=(1, 2), N=2, samples=3, seed=7)
    assert run_suite(cfg) == run_suite(cfg)
    assert "passed" in report_markdown(run_suite(cfg))


def test_properties_detect_broken_laws():
    ctx = Context(None)
    assert prop_hilbert(1, 1, 2, 5, random.Random(0), ctx) is None
    assert prop_alpha(0, 1, 2, ctx) is None


def test_v_space_bookkeeping():
    rep = v_space_report(0, 1, 2.0, 3)
    assert rep["dims"][:3] == [1, 1, 11]
    assert rep["bookkeeping_defects"] == [0, 0, 0]
