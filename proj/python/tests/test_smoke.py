import json
import math

import numpy as np
import pytest

import partition_fields as pf


def test_version():
    assert pf.__version__ == "0.1.0"


def test_simulate_shapes_and_determinism():
    a = pf.simulate("Karlin2D", [0.6, 0.6], [64, 64], [0.5, 1.0], [0.25, 0.5, 1.0], seed="ab")
    b = pf.simulate("Karlin2D", [0.6, 0.6], [64, 64], [0.5, 1.0], [0.25, 0.5, 1.0], seed="ab")
    assert a["raw"].shape == (2, 3)
    assert np.array_equal(a["raw"], b["raw"])
    assert np.allclose(a["normalized"], a["raw"] / a["normalization"])
    c = pf.simulate("Karlin2D", [0.6, 0.6], [64, 64], [0.5, 1.0], [0.25, 0.5, 1.0], seed="ac")
    assert not np.array_equal(a["raw"], c["raw"])


def test_simulate_1d_corners():
    s = pf.simulate("HS1D", [0.25], [100], [0.25, 0.5, 1.0], seed="1")
    assert s["raw"].shape == (3, 1)
    assert s["corner1"] == [25, 50, 100]
    assert s["truncation_error_bound"] > 0


def test_bad_model_raises():
    with pytest.raises(ValueError):
        pf.simulate("Karlin1D", [1.5], [10], [1.0])
    with pytest.raises(ValueError):
        pf.simulate("NoSuchModel", [0.5], [10], [1.0])


def test_renewal_and_constants():
    q = pf.renewal_q(0.25, 10)
    assert q[0] == 1.0
    assert q[1] == pytest.approx(1 - 2 ** -0.25, abs=1e-15)
    c = math.sin(math.pi / 4) / (math.pi * 0.25 * 1.5 * math.sqrt(math.pi))
    assert pf.c_alpha(0.25) == pytest.approx(c, rel=1e-14)
    w = pf.weights(0.3, 40, 640)
    assert w["b_n_sq"] == pytest.approx(float(np.sum(w["b"] ** 2)), rel=1e-12)
    assert pf.hs_exact_variance(0.25, 64) > 0


def test_pmf_sums_toward_one():
    s = sum(pf.pmf("hs", 0.25, k) for k in range(1, 20001))
    assert s == pytest.approx(1 - 20001 ** -0.25, abs=1e-12)


def test_fbs_and_ks():
    x = pf.sample_fbs(0.3, 0.7, [0.5, 1.0], [0.5, 1.0], seed="5")
    assert x.shape == (2, 2)
    rng = np.random.default_rng(3)
    _, p = pf.ks_normal(list(rng.standard_normal(2000)), 1.0)
    assert 0.0 <= p <= 1.0


def test_verify_variance_suite():
    cfg = {"command": "verify", "suite": "variance", "R": 500, "seed": "9",
           "model": {"kind": "Karlin1D", "alphas": [0.6], "n": [100]}}
    ok, report = pf.verify(json.dumps(cfg))
    assert json.loads(report)["suite"] == "variance"
    assert isinstance(ok, bool)


def test_verify_config_error():
    with pytest.raises(ValueError):
        pf.verify(json.dumps({"command": "verify", "suite": "variance"}))
