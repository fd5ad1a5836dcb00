import math

import pytest

import cmaswitch as cs


def test_configuration_space():
    assert len(cs.enumerate_space(True)) == 4608
    assert len(cs.enumerate_space(False)) == 1536
    variants = dict(cs.common_variants())
    assert variants["CMA-ES"] == "00000000000"
    assert variants["BIPOP-CMA-ES"] == "00000000002"
    cfg = cs.decode("00100001000")
    assert cfg.mirrored == 1 and cfg.pairwise == 1
    assert cs.encode(cfg) == "00100001000"
    with pytest.raises(ValueError):
        cs.decode("90000000000")


def test_target_grid():
    grid = cs.target_grid()
    assert len(grid) == 51
    assert grid[0] == pytest.approx(100.0)
    assert grid[50] == pytest.approx(1e-8)


def test_benchmark_functions():
    fn = cs.make_function(1, 5, 1)
    assert fn(fn.x_opt) == pytest.approx(fn.f_opt, abs=1e-12)
    x = list(fn.x_opt)
    x[0] += 1.0
    assert fn(x) == pytest.approx(fn.f_opt + 1.0)


def test_static_run_and_metrics():
    records = [
        cs.run_static("00000000000", fid=1, dim=5, instance=1 + (i % 2),
                      budget=50000, seed=100 + i)
        for i in range(4)
    ]
    assert all(r.hits[50] is not None for r in records)
    a = cs.aht(records, 1, "00000000000", 50)
    e = cs.ert(records, 1, "00000000000", 50, 50000)
    assert a == e  # every run succeeded
    assert 100 < a < 5000


def test_adaptive_identity_matches_static():
    seed = 31
    stat = cs.run_static("00000000000", fid=1, budget=30000, seed=seed)
    trip = cs.AdaptiveTriple("00000000000", "00000000000", 25)
    adap = cs.run_adaptive(trip, fid=1, budget=30000, seed=seed)
    assert adap.same_trajectory(stat)
    assert adap.switch_eval is not None


def test_selection_on_tiny_campaign():
    records = []
    for config in ("00000000000", "00000110000"):
        for inst in (1, 2):
            for run in range(3):
                seed = cs.derive_seed(5, config, 5, inst, run)
                r = cs.run_static(config, fid=5, dim=5, instance=inst,
                                  budget=50000, seed=seed)
                records.append(r)
    result = cs.select_windowed(records, 5, 50000, "mean", top_k=5)
    assert result.entries
    assert result.method == "sliding_mean"
    for entry in result.entries:
        assert 2 <= entry.triple.tau_index <= 48
    assert cs.module_difference(result) >= 0.0


def test_analysis_helpers():
    assert cs.relative_improvement(1461.0, 1110.0) == pytest.approx(24.0, abs=0.1)
    assert cs.relative_improvement(1448.0, 1236.0) == pytest.approx(14.6, abs=0.1)
    assert cs.improvement_fraction([90.0, 110.0], 100.0) == pytest.approx(50.0)
    assert cs.normal_quantile(0.75) == pytest.approx(0.6744897501960817)
    w = cs.derive_static_weights("00000000000", 5)
    assert sum(w) == pytest.approx(1.0)
    assert math.isfinite(w[0])
