"""End-to-end smoke tests for the Python module."""

import json
import math
import random

import pytest

import gmclab


def test_region_predicates():
    assert gmclab.in_ea(0.9j, 1)
    assert not gmclab.in_ea(1.2j, 1)
    # The wing beyond the disk: inside until Re + Im reaches sqrt(2).
    assert gmclab.in_ea(1.3 + 0.05j, 1)
    assert not gmclab.in_ea(1.3 + 0.2j, 1)
    assert gmclab.in_eap(0.8j, 2, 1)
    assert not gmclab.in_eap(1.0 + 0j, 2, 1)
    assert gmclab.real_moment_cutoff(1.0, 1) == pytest.approx(2.0)
    assert gmclab.besov_threshold(0.8j, 2, 1) == pytest.approx(-0.32)
    assert gmclab.besov_threshold(1j / math.sqrt(2), 2, 2) == pytest.approx(-0.25)


def test_region_errors_are_value_errors():
    with pytest.raises(ValueError):
        gmclab.besov_threshold(2.5 + 0j, 2, 1)
    with pytest.raises(ValueError):
        gmclab.boundary_polyline("hexagon")


def test_boundary_polyline_closes():
    # The trace is cyclic: the start vertex is not repeated at the end, but
    # the last vertex must land within one step of it.
    points = gmclab.boundary_polyline("eye", d=1, n_points=64)
    assert len(points) >= 64
    gap = math.hypot(points[-1][0] - points[0][0], points[-1][1] - points[0][1])
    assert 0.0 < gap < 0.2
    assert points[0] == pytest.approx((math.sqrt(2.0), 0.0))


def test_field_variance_and_covariance():
    assert gmclab.sigma2_analytic(1, 10) == pytest.approx(
        sum(1.0 / k for k in range(1, 11)), abs=1e-12
    )
    # Large-cutoff covariance approaches -log(2 sin(pi t)).
    cov = gmclab.covariance_oracle(1, (0.25, 0.0), (0.0, 0.0), 50000)
    assert cov == pytest.approx(-math.log(2 * math.sin(math.pi * 0.25)), abs=1e-3)

    r = gmclab.field_realization(d=1, m=8, cutoff=64, seed=11)
    assert len(r["values"]) == 256
    assert r["sigma2"] == pytest.approx(gmclab.sigma2_analytic(1, 64), abs=1e-12)
    assert r["imag_residue"] < 1e-9


def test_chaos_unit_mean():
    mu = gmclab.chaos_realization(0.8j, d=1, m=8, cutoff=64, seed=3)
    moduli = [abs(v) for v in mu["values"]]
    # Purely imaginary parameter: the density has constant modulus.
    expected = math.exp(0.8**2 * mu["sigma2"] / 2 - mu["log_scale"])
    assert min(moduli) == pytest.approx(expected, rel=1e-12)
    assert max(moduli) == pytest.approx(expected, rel=1e-12)

    samples = gmclab.pair_samples(
        0.8j, d=1, m=8, cutoff=64, f_kind="constant", f_center=(0.5, 0.0),
        f_scale=0.1, count=200, seed=7,
    )
    mean = sum(samples) / len(samples)
    assert abs(mean - 1.0) < 0.2
    # Reproducible for any worker count.
    again = gmclab.pair_samples(
        0.8j, d=1, m=8, cutoff=64, f_kind="constant", f_center=(0.5, 0.0),
        f_scale=0.1, count=200, seed=7, threads=3,
    )
    assert samples == again


def test_scaling_samples_shape():
    out = gmclab.scaling_pair_samples(
        0.7j, d=1, m=9, center=(0.5, 0.0), bump_scale=0.1, epsilon=0.25,
        cutoff=64, count=120, seed=5,
    )
    assert len(out["lhs"]) == 120
    assert len(out["rhs"]) == 120
    assert out["epsilon"] == 0.25


def test_ks_and_bootstrap():
    a = [i / 997.0 for i in range(997)]
    b = [(i + 0.5) / 997.0 for i in range(997)]
    ks = gmclab.ks_two_sample(a, b)
    assert ks.p_value > 0.99
    with pytest.raises(ValueError):
        gmclab.ks_two_sample([1.0] * 200, [1.0] * 200)

    ci = gmclab.bootstrap_mean([float(i) for i in range(100)], seed=2)
    assert ci["lo"] <= ci["estimate"] <= ci["hi"]
    assert ci["estimate"] == pytest.approx(49.5)


def test_tail_index_on_pareto():
    rng = random.Random(12)
    samples = [rng.random() ** -0.5 for _ in range(20000)]  # exponent 2
    report = gmclab.tail_index(samples, seed=4)
    assert report.plateau
    for point in report.ladder:
        assert point.alpha_hat == pytest.approx(2.0, rel=0.2)
        assert point.se == pytest.approx(point.alpha_hat / math.sqrt(point.k))
    assert not report.no_finite_tail_below(10.0)


def test_moment_estimate_flags():
    est = gmclab.estimate_abs_moment(
        0.8j, p=2, d=1, m=8, cutoff=32, f_kind="bump", f_center=(0.5, 0.0),
        f_scale=0.2, count=60, seed=9,
    )
    assert est["region_ok"] and not est["divergence_expected"]
    assert est["ladder_cutoffs"] == [8, 16, 32]
    assert est["ci"][0] <= est["estimate"] <= est["ci"][1]


def test_besov_estimate_smoke():
    out = gmclab.besov_estimate(
        0.8j, d=1, m=10, cutoff=512, filter="db4", p=2, count=20, seed=13,
    )
    assert out["s_predicted"] == pytest.approx(-0.32)
    assert not out["smooth_input"]
    assert out["s_hat"] is not None
    assert len(out["levels"]) >= 4
    assert "db4" in gmclab.shipped_filters()


def test_moment_slope_prediction():
    assert gmclab.predicted_moment_slope(0.8j, 2, 1) == pytest.approx(-0.36)
    assert gmclab.predicted_moment_slope(0.5 + 0j, 2, 1) == pytest.approx(-0.75)


def test_run_plan_roundtrip(tmp_path):
    plan = {
        "betas": [[0.0, 0.8]],
        "d": 1,
        "m": 8,
        "cutoff": 32,
        "f": {"kind": "bump", "center": [0.5, 0.5], "scale": 0.15},
        "count": 40,
        "seed": 21,
        "estimator": "samples",
        "p_list": [],
        "out_dir": str(tmp_path / "run"),
    }
    text = json.dumps(plan)
    gmclab.validate_plan(text)
    out = gmclab.run_plan(text)
    report = json.loads(open(out["report_path"]).read())
    assert report["kind"] == "samples"
    first = open(out["sample_paths"][0]).read()
    again = gmclab.run_plan(text, threads=2)
    assert open(again["sample_paths"][0]).read() == first

    bad = dict(plan, betas=[[0.0, 1.3]])
    with pytest.raises(ValueError):
        gmclab.validate_plan(json.dumps(bad))
