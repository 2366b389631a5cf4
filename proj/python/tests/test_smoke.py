import json

import numpy as np
import pytest

import broyden_lab as bl


def test_two_by_two_bfgs():
    res = bl.broyd(np.array([[2.0, 1.0], [1.0, 3.0]]),
                   np.eye(2), np.array([1.0, 0.0]), 0.0)
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert np.allclose(res["g_plus"] @ np.array([1.0, 0.0]), a @ np.array([1.0, 0.0]))
    assert np.allclose(res["g_plus"] @ res["h_plus"], np.eye(2), atol=1e-12)


def test_secant_and_det_ratio():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    a = q @ np.diag([1, 2, 3, 4, 5.0]) @ q.T
    g = np.diag([1, 1, 2, 2, 9.0])
    u = rng.standard_normal(5)
    for tau in (0.0, 0.5, 1.0):
        res = bl.broyd(a, g, u, tau)
        assert np.allclose(res["g_plus"] @ u, a @ u, rtol=1e-10)
        det = np.linalg.det(g) / np.linalg.det(res["g_plus"])
        assert res["det_ratio"] == pytest.approx(det, rel=1e-9)


def test_constants():
    assert bl.k0(10, 1.0, 100.0, 0.0) == 424
    assert bl.k0(1, 1.0, 1.0, 1.0) == 13
    assert bl.region_radius(1.0, 10.0, 5, 0.0, 1.0) == pytest.approx(0.011035362481860234, rel=1e-14)
    assert bl.region_radius(1.0, 10.0, 5, 0.0, 0.0) == float("inf")
    assert bl.augmented_barrier(2 * np.eye(2), np.eye(2)) == pytest.approx(0.3862943611198906)


def test_solve_quadratic_and_logsumexp():
    quad = json.dumps({"kind": "quadratic", "n": 6, "spectrum": {"logspace": [1, 100]}, "seed": 2})
    t = bl.solve(quad, np.zeros(6), "BFGS")
    assert t["status"] == "converged"
    assert t["envelopes_passed"]
    assert np.all(t["xi"] == 1.0)
    assert t["lambda"][-1] <= 1e-12

    lse = json.dumps({"kind": "logsumexp", "n": 3, "m": 6, "mu": 0.5, "gamma": 0.5, "seed": 1})
    t = bl.solve(lse, np.zeros(3), 0.5)
    assert t["status"] == "converged"
    assert t["M"] > 0


def test_errors():
    with pytest.raises(ValueError):
        bl.broyd(np.eye(2), np.eye(2), np.ones(2), 1.5)
    with pytest.raises(bl.ConfigError):
        bl.solve('{"kind": "cubic", "n": 2}', np.zeros(2))
    with pytest.raises(bl.DivergenceError):
        bl.solve(json.dumps({"kind": "quadratic", "n": 2, "spectrum": [1e10, 2e10]}),
                 np.array([1e300, -1e300]))


def test_verify_and_run_config(tmp_path):
    code, out, _ = bl.verify(4, 50, 1)
    assert code == 0 and "inverse_identity" in out
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"instance": {"kind": "quadratic", "n": 4, "spectrum": [1, 2, 3, 4]},
                               "method": "DFP"}))
    code, out, _ = bl.run_config(str(cfg), str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "summary.json").exists()
