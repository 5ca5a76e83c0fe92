import json
import math

import numpy as np
import pytest

import mwlab


def test_sieve_tables():
    assert mwlab.sieve("moebius", 3).tolist() == [0, 1, -1, -1, 0, -1, 1, -1]
    assert mwlab.sieve("liouville", 3).tolist() == [0, 1, -1, -1, 1, -1, 1, -1]
    vm = mwlab.sieve("von_mangoldt", 4)
    assert vm.dtype == np.float64
    assert vm[8] == pytest.approx(math.log(2))


def test_mertens():
    mu = mwlab.sieve("moebius", 20)
    assert int(mu[1:1000001].astype(np.int64).sum()) == 212


def test_fwht_matches_matrix():
    lam = 5
    n = 1 << lam
    f = np.arange(n, dtype=np.int64) % 3 - 1
    h = np.array([[(-1) ** bin(a & x).count("1") for x in range(n)] for a in range(n)], dtype=np.int64)
    assert (mwlab.fwht(f) == h @ f).all()
    assert np.allclose(mwlab.fwht(f.astype(float)), h @ f)


def test_trig_coefficient_direct_sum():
    lam, mask = 6, 0b101101
    n = 1 << lam
    x = np.arange(n)
    w = np.array([mwlab.walsh_eval(mask, lam, int(v)) for v in x])
    for k in (0, 1, 5, 33):
        direct = (w * np.exp(-2j * np.pi * k * x / n)).mean()
        assert abs(mwlab.trig_coefficient(mask, lam, k) - direct) < 1e-12


def test_max_correlation_small():
    assert mwlab.max_correlation(mwlab.sieve("moebius", 2), 2) == (2, 3)


def test_reports_and_csv():
    reports = mwlab.theorem_scan("moebius", 8, 10)
    assert [r["params"]["lambda"] for r in reports] == [8, 9, 10]
    assert all(r["pass"] for r in reports)
    csv = mwlab.emit_csv(reports)
    assert csv.splitlines()[0] == "lemma_id,lambda,params_json,lhs,rhs,ratio,fitted_constant,pass"
    assert len(csv.splitlines()) == 4


def test_lemma_checks():
    r = mwlab.lemma_check(3, 10, 0b1011010011)
    assert r["lemma_id"] == "L3"
    assert r["lhs"] <= r["rhs"]
    r5 = mwlab.check_lemma5(12, 4, [3, 4, 5], 0b1010 << 8)
    assert r5["pass"]
    scan = mwlab.run_scan({"lambda_min": 6, "lambda_max": 6, "lemmas": ["L1", "L3"]})
    assert scan["summary"]["failures"] == 0


def test_sums():
    assert mwlab.type1_sum(0, 3, 5) == 8 * 32
    assert mwlab.bilinear_sum(0b1000, 1, 2) == mwlab.type1_sum(0b1000, 1, 2)
    q = mwlab.shifted_quadratic_form(0, 3, 5, 2, 1)
    assert q["value"] == 7 * 32 * 8
    c = mwlab.carry_truncation_rate(4, 8, 2, 2)
    assert c["low_rate"] == 0
    assert c["implied_constant"] <= 8
    s = mwlab.spectral_split(0b11 << 12, 14, 2, 4)
    assert len(s["frequencies"]) <= s["size_bound"]


def test_errors():
    with pytest.raises(ValueError):
        mwlab.sieve("moebius", 0)
    with pytest.raises(MemoryError):
        mwlab.sieve("moebius", 40)


def test_dispatch_deterministic():
    args = ["--seed", "3", "lemma-check", "--lemma", "6", "--lambda", "8", "--masks", "random:10"]
    a = mwlab.dispatch(args)
    b = mwlab.dispatch(args)
    assert a[0] == 0
    assert a == b
    assert json.loads(a[1])["command"] == "lemma-check"
    assert mwlab.dispatch(["--lambda", "99", "sieve"])[0] == 3
