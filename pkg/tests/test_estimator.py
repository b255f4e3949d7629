import json
import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from microdisk_ff import MicrodiskEmitter, SphericalGrid, ZeroPowerError
from microdisk_ff.config import ConfigError, DEFAULTS, build_config, bundled_configs, load_config
from microdisk_ff.nearfield import analytic_mode, sample_grid, write_nearfield
from microdisk_ff.radiation import write_farfield

FAST = dict(resolution_deg=2.0)


def test_params_roundtrip_and_clone():
    est = MicrodiskEmitter(a=0.55, u=0.1, threads=2)
    params = est.get_params()
    assert params["a"] == 0.55 and params["threads"] == 2
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(a=0.6)
    assert est.a == 0.55


def test_defaults_are_optimized_device():
    p = MicrodiskEmitter().get_params()
    assert (p["a"], p["r_h"], p["d"], p["r_d"], p["t"], p["r_u"]) == (0.5168, 0.2, 0.2931, 1.5427, 0.9411, 1.45)
    assert p["u"] == p["v"] == 0.0
    assert load_config("optimized").estimator_params()["a"] == 0.5168


def test_fit_predict_score():
    est = MicrodiskEmitter(**FAST).fit()
    ff = est.predict()
    assert ff.grid.shape == (91, 180)
    assert 0 < est.score() < 1
    assert est.alpha_ is None
    assert len(est.dipoles_) == len(est.holes_)
    assert np.all(est.dipoles_.currents[:, 2] == 0)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        MicrodiskEmitter().score()
    with pytest.raises(NotFittedError):
        MicrodiskEmitter().transform(np.zeros((1, 2)))


def test_transform_gives_currents():
    est = MicrodiskEmitter(**FAST).fit()
    xy = np.array([[h.x, h.y] for h in est.holes_])
    assert np.array_equal(est.transform(xy), est.dipoles_.currents)
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 3)))


def test_fit_alpha_against_reference(tmp_path):
    est = MicrodiskEmitter(**FAST).fit()
    path = tmp_path / "ref.txt"
    write_farfield(path, est.far_field_.scaled(2.5))
    again = MicrodiskEmitter(**FAST).fit(reference=str(path))
    assert again.alpha_ == pytest.approx(2.5, rel=1e-12)
    assert again.alpha_fit_.theta_max == pytest.approx(math.radians(70))


def test_fit_on_custom_grid():
    g = SphericalGrid.uniform(3.0, theta_max=math.pi)
    est = MicrodiskEmitter().fit(grid=g)
    assert est.grid_ is g


def test_imported_nearfield_matches_analytic(tmp_path):
    base = MicrodiskEmitter(**FAST)
    est = clone(base).fit()
    grid = sample_grid(est.field_, -2.3, -2.3, 0.025, 0.025, 185, 185)
    path = tmp_path / "nf.txt"
    write_nearfield(path, grid)
    imp = clone(base).set_params(nearfield=str(path)).fit()
    assert imp.score() == pytest.approx(est.score(), rel=0.01)
    obj = clone(base).set_params(nearfield=grid).fit()
    assert obj.score() == imp.score()


def test_reduce_uv_keeps_score():
    a = MicrodiskEmitter(u=0.4, v=0.3, **FAST).fit().score()
    b = MicrodiskEmitter(u=0.4, v=0.3, reduce_uv=True, **FAST).fit().score()
    assert b == pytest.approx(a, rel=1e-9)


def test_zero_field_has_no_efficiency():
    est = MicrodiskEmitter(amplitude=0.0, **FAST).fit()
    with pytest.raises(ZeroPowerError):
        est.score()


# -- configuration --------------------------------------------------------------


def test_bundled_config():
    assert "optimized" in bundled_configs()
    cfg = load_config("optimized")
    assert cfg.lattice.a == 0.5168 and cfg.disk.r_d == 1.5427
    assert cfg.emitter == {"color_center": "SnV", "purcell": 52.6}
    assert cfg.robustness["count"] == 205
    assert len(cfg.config_hash()) == 64
    assert cfg.config_hash() == load_config("optimized").config_hash()


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        build_config({"lattice": {"spacing": 1}})
    with pytest.raises(ConfigError):
        build_config({"lattice": {"a": 0.3, "r_h": 0.2}})
    with pytest.raises(ConfigError, match="NA"):
        build_config({"farfield": {"na": [1.5]}})
    with pytest.raises(ConfigError, match="not found"):
        build_config({"nearfield": {"source": "file", "path": "missing.txt"}}, tmp_path)
    with pytest.raises(ConfigError, match="not both"):
        build_config({"nearfield": {"source": "analytic", "path": "x"}})
    with pytest.raises(ConfigError):
        build_config({"emitter": {"color_center": "XYZ"}})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(bad)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "none.json")


def test_config_relative_paths(tmp_path):
    base = build_config({})
    f = analytic_mode(base.disk, base.mode)
    write_nearfield(tmp_path / "nf.txt", sample_grid(f, -2.5, -2.5, 0.05, 0.05, 101, 101))
    (tmp_path / "run.json").write_text(json.dumps({"nearfield": {"source": "file", "path": "nf.txt"}}))
    cfg = load_config(tmp_path / "run.json")
    assert cfg.nearfield_path == tmp_path / "nf.txt"
    assert cfg.estimator_params()["nearfield"] == str(tmp_path / "nf.txt")


def test_overrides_change_hash():
    cfg = load_config("optimized")
    other = cfg.with_overrides(farfield={"na": [0.5]})
    assert other.farfield["na"] == [0.5]
    assert other.config_hash() != cfg.config_hash()
    assert set(DEFAULTS) == set(cfg.raw)
