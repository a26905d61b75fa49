import math

import numpy as np
import pytest

import imgep


def test_gray_scott_rollout_is_deterministic():
    a, invalid = imgep.rollout("gray_scott", [0.05, 0.06], seed=3, width=16, height=16, steps=200)
    b, _ = imgep.rollout("gray_scott", [0.05, 0.06], seed=3, width=16, height=16, steps=200)
    assert a.shape == (16, 16)
    assert not invalid
    assert np.array_equal(a, b)


def test_lenia_rollout_stays_in_range():
    space = imgep.parameter_space("lenia")
    assert len(space) == 41
    params = [(lo + hi) / 2 for _, lo, hi, _ in space]
    obs, invalid = imgep.rollout("lenia", params, steps=10)
    assert obs.shape == (64, 64)
    if not invalid:
        assert obs.min() >= 0.0 and obs.max() <= 1.0


def test_parameters_outside_the_box_are_rejected():
    with pytest.raises(ValueError):
        imgep.rollout("gray_scott", [0.5, 0.05])
    with pytest.raises(ValueError):
        imgep.rollout("conway", [0.1])


def test_features():
    grid = np.zeros((32, 32))
    assert imgep.volume(grid) == 0.0
    assert imgep.hu_moments(grid) == [0.0] * 7
    grid[:, :16] = 1.0
    assert imgep.mean_pixel(grid) == 0.5
    assert imgep.volume(grid) == 0.5
    assert len(imgep.behavior(grid)) == 9
    assert set(imgep.constraint_features(grid)) == {
        "volume", "mean_pixel", "tamura_coarseness", "tamura_contrast", "tamura_directionality"}
    assert imgep.haralick(np.full((8, 8), 0.3))["asm"] == pytest.approx(1.0)
    assert imgep.is_homogeneous(np.full((4, 4), 0.2))
    assert imgep.encode_png(grid)[:8] == b"\x89PNG\r\n\x1a\n"


def test_metrics():
    assert imgep.bins_per_dim(200000) == 21
    assert imgep.bins_per_dim(100000) == 17
    pts = [[0, 0, 0, 0], [1, 1, 1, 1], [0.01, 0, 0, 0]]
    assert imgep.diversity(pts, 16) == 2
    assert imgep.acceptance_rate([-1, -1, 1, -1], 2) == 0.5
    with pytest.raises(ValueError):
        imgep.acceptance_rate([1, 1], 2)


def test_explore_history():
    history = imgep.explore("gray_scott", {"budget": 30, "n_init": 10, "seed": 2, "method": "NRAB"},
                            {"volume": [0.05, 0.9]}, width=16, height=16, steps=100)
    assert [h["index"] for h in history] == list(range(30))
    assert all(h["classification"] in (-1, 1) for h in history)
    assert all(h["random_sample"] for h in history[:10])
    with pytest.raises(KeyError):
        imgep.explore("gray_scott", {"budget": 20, "n_init": 10}, {"area": [0, 1]})


def test_run_plan_and_summarize(tmp_path):
    plan = {
        "system": "gray_scott",
        "gray_scott": {"width": 16, "height": 16, "steps": 100},
        "methods": ["R", "NRAB"],
        "seeds": [1],
        "budget": 30,
        "n_init": 10,
        "roi": {"volume": [0.05, 0.9]},
        "global_bins": 625,
        "constrained_bins": 256,
    }
    rows = imgep.run_plan(plan, tmp_path)
    assert [r["label"] for r in rows] == ["R", "NRAB"]
    assert (tmp_path / "manifest.json").exists()
    again = imgep.summarize(tmp_path)
    for a, b in zip(rows, again):
        assert a["acceptance_rate"] == pytest.approx(b["acceptance_rate"])
        expected = a["ms_per_sample"] / 1000 / a["acceptance_rate"] if a["acceptance_rate"] else math.inf
        assert a["s_per_inlier"] == pytest.approx(expected, rel=1e-6)
