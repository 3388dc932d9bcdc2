import numpy as np
import pytest

import pelflow


def small_scene(**kw):
    args = dict(width=48, height=40, rect_x=14, rect_y=12, rect_width=14, rect_height=12, seed=3)
    args.update(kw)
    return pelflow.synthesize(**args)


def test_scene_shapes_and_truth():
    frames, truth = small_scene(frames=3)
    assert len(frames) == 3 and len(truth) == 2
    assert frames[0].shape == (40, 48) and frames[0].dtype == np.uint8
    assert truth[0].shape == (40, 48, 2)
    vectors = {tuple(v) for v in truth[0].reshape(-1, 2)}
    assert vectors == {(2.0, 0.0), (1.0, 2.0)}


def test_solver_oracles():
    G = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    assert abs(pelflow.gcv_value(G, [1, 2, 3], 1.0, 1.0) - 7.6875) <= 1e-12
    assert pelflow.rls_solve(G[:2], [4, 2], 1.0, 1.0) == (2.0, 1.0)
    assert pelflow.wiener_solve(G[:2], [102, 51]) == (2.0, 1.0)
    l1, l2, value = pelflow.minimize_gcv(np.random.default_rng(0).normal(size=(9, 2)) * 10, list(range(9)), True)
    assert l1 > 0 and l2 > 0 and value >= 0
    with pytest.raises(ValueError):
        pelflow.gcv_value(G[:2], [1, 2], 1.0, 1.0)


def test_estimate_and_evaluate():
    frames, truth = small_scene()
    out = pelflow.estimate(frames[1], frames[0], "wiener")
    assert out["flow"].shape == (40, 48, 2)
    assert set(np.unique(out["status"])) <= {0, 1, 2}
    m = pelflow.evaluate(frames, [out["flow"]], truth)
    assert m["imc_db"] > 0
    assert len(m["mse"]) == 2
    perfect = pelflow.evaluate(frames, truth, truth)
    assert perfect["mse"] == (0.0, 0.0)


def test_nesting_through_bindings():
    frames, _ = small_scene()
    a = pelflow.estimate(frames[1], frames[0], "lscrv")["flow"]
    b = pelflow.estimate(frames[1], frames[0], "lscrvb", masks=[0])["flow"]
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        pelflow.estimate(frames[1], frames[0], "lscrv", colour=1)


def test_file_round_trips(tmp_path):
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(7, 5), dtype=np.uint8)
    pelflow.save_pgm(img, tmp_path / "a.pgm")
    assert np.array_equal(pelflow.load_pgm(tmp_path / "a.pgm"), img)
    flow = rng.normal(size=(4, 6, 2)).astype(np.float32).astype(np.float64)
    pelflow.save_flo(flow, tmp_path / "a.flo")
    assert np.array_equal(pelflow.load_flo(tmp_path / "a.flo"), flow)
    with pytest.raises(OSError):
        pelflow.load_pgm(tmp_path / "missing.pgm")


def test_cli_in_process(tmp_path):
    code, out, _ = pelflow.run_cli(["masks", "show", "--id", "0"])
    assert code == 0 and out.startswith("m0 (9 pixels)")
    code, _, _ = pelflow.run_cli(["synth", "--frames", "0", "--out", str(tmp_path)])
    assert code == 1
