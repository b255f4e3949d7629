import math

import numpy as np
import pytest

from microdisk_ff import InvalidParameterError, MicrodiskEmitter, MicrodiskError, NoBracketError
from microdisk_ff.lattice import canonicalize_alignment, point_group_images
from microdisk_ff.optimizer import (
    RobustnessSpec,
    SweepSpec,
    cumulative_fraction,
    draw_samples,
    golden_section_max,
    refine_argmax,
    robustness,
    run_sweep,
    sweep,
)

FAST = dict(resolution_deg=2.0)


def parabola(x):
    return -((x - 0.52) ** 2) + 1


def test_parabola_refinement():
    res = run_sweep(SweepSpec("a", 0.40, 0.65, 26), parabola)
    assert res.argmax[0] == pytest.approx(0.52)
    shifted = run_sweep(SweepSpec("a", 0.405, 0.655, 26), parabola)
    for r in (res, shifted):
        ref = refine_argmax(r, rtol=1e-4)
        assert ref.value == pytest.approx(0.52, abs=1e-4)
        assert ref.metric >= r.argmax[1]
        lo, hi = ref.interval
        assert hi - lo <= 1e-4 * 0.52 * 1.0001


def test_refinement_never_worse_than_coarse_sample():
    # sharp spike between samples is invisible to the coarse grid; the bracket holds a dip
    def f(x):
        return 1.0 if abs(x - 0.5) < 1e-12 else 0.5 - abs(x - 0.5)

    res = run_sweep(SweepSpec("a", 0.4, 0.6, 21), f)
    ref = refine_argmax(res)
    assert ref.metric >= res.argmax[1]


def test_boundary_maximum_raises():
    res = run_sweep(SweepSpec("a", 0.4, 0.6, 5), lambda x: x)
    with pytest.raises(NoBracketError, match="widen"):
        refine_argmax(res)


def test_constant_metric_tie_break():
    res = run_sweep(SweepSpec("a", 0.4, 0.6, 5), lambda x: 0.0)
    assert res.argmax_index == 0
    assert np.all(res.metrics == 0)
    with pytest.raises(NoBracketError):
        refine_argmax(res)


def test_golden_section_on_cosine():
    (x, y), (lo, hi), n = golden_section_max(math.cos, -1.0, 0.5, 1e-8)
    assert x == pytest.approx(0.0, abs=1e-7)
    assert hi - lo <= 1e-8
    assert n > 10


def test_sweep_spec_validation():
    with pytest.raises(InvalidParameterError):
        SweepSpec("d", 0, 1)
    with pytest.raises(InvalidParameterError):
        SweepSpec("a", 1, 0)
    with pytest.raises(InvalidParameterError):
        SweepSpec("a", 0, 1, count=2)
    with pytest.raises(InvalidParameterError):
        SweepSpec("a", 0, 1, metric="purcell")


def test_failures_recorded_per_point():
    def f(x):
        if x < 0.45:
            raise InvalidParameterError("too small")
        return x

    res = run_sweep(SweepSpec("a", 0.4, 0.6, 5), f)
    assert sorted(res.errors) == [0]
    assert math.isnan(res.metrics[0])
    assert res.summary()["failures"] == {"0": "InvalidParameterError: too small"}
    with pytest.raises(MicrodiskError, match="every sweep point failed"):
        run_sweep(SweepSpec("a", 0.4, 0.6, 5), lambda x: f(0.0))


def test_zero_field_sweep_fails_every_point():
    base = MicrodiskEmitter(amplitude=0.0, **FAST)
    with pytest.raises(MicrodiskError, match="ZeroPowerError"):
        sweep(SweepSpec("a", 0.45, 0.55, 3), base)


def test_na_sweep_matches_curve():
    base = MicrodiskEmitter(**FAST)
    res = sweep(SweepSpec("NA", 0.1, 1.4, 14), base)
    curve = MicrodiskEmitter(**FAST).fit().collection_curve(res.values)
    assert np.array_equal(res.metrics, np.array([c for _, c in curve]))
    eta = sweep(SweepSpec("NA", 0.1, 1.4, 14, metric="eta"), base)
    assert np.allclose(eta.metrics, res.metrics * 52.6 / (52.6 + 0.25))


def test_lattice_sweep_interior_max_and_determinism():
    base = MicrodiskEmitter(r_h=0.18, **FAST)
    spec = SweepSpec("a", 0.40, 0.65, 11)
    a = sweep(spec, base)
    b = sweep(spec, base, threads=3)
    assert np.array_equal(a.metrics, b.metrics)
    i = a.argmax_index
    assert 0 < i < len(a.values) - 1
    s = a.summary()
    assert s["argmax"]["index"] == i and s["count"] == 11


def test_cumulative_fraction():
    m = np.array([0.1, 0.2, np.nan, 0.3])
    t = np.linspace(0, 0.4, 9)
    f = cumulative_fraction(m, t)
    assert np.all(np.diff(f) <= 0)
    assert f[0] == 1.0 and f[-1] == 0.0
    assert cumulative_fraction([np.nan], t).tolist() == [0.0] * 9


def test_robustness_spec_validation():
    with pytest.raises(InvalidParameterError):
        RobustnessSpec(seed=None)
    with pytest.raises(InvalidParameterError):
        RobustnessSpec(seed=1, count=0)
    with pytest.raises(InvalidParameterError):
        RobustnessSpec(seed=1, distributions={"a": {"dist": "normal", "mean": 0.5, "sd": -1}})
    with pytest.raises(InvalidParameterError):
        RobustnessSpec(seed=1, distributions={"uv": {"dist": "cell"}, "u": {"dist": "uniform", "lo": 0, "hi": 1}})
    with pytest.raises(InvalidParameterError):
        RobustnessSpec(seed=1, distributions={"d": {"dist": "uniform", "lo": 0, "hi": 1}})


def test_zero_width_gives_step_curve():
    spec = RobustnessSpec(
        seed=3,
        count=6,
        distributions={"a": {"dist": "normal", "mean": 0.5168, "sd": 0.0}, "t": {"dist": "uniform", "lo": 0.9, "hi": 0.9}},
    )
    res = robustness(spec, MicrodiskEmitter(**FAST))
    assert np.all(res.metrics == res.metrics[0])
    f = res.fraction_above
    assert set(np.unique(f)) <= {0.0, 1.0}
    assert np.all(np.diff(f) <= 0)


def test_robustness_reproducible_and_counts_failures():
    spec = RobustnessSpec(
        seed=11, count=12, distributions={"uv": {"dist": "cell"}, "r_h": {"dist": "normal", "mean": 0.25, "sd": 0.03}}
    )
    base = MicrodiskEmitter(**FAST)
    a = robustness(spec, base)
    b = robustness(spec, base, threads=3)
    assert np.array_equal(a.metrics, b.metrics, equal_nan=True)
    assert a.samples == b.samples
    # r_h >= a/2 overlaps neighboring holes; those samples fail and are counted
    bad = [i for i, s in enumerate(a.samples) if 2 * s["r_h"] >= base.a]
    assert bad and sorted(a.failures) == bad
    s = a.summary()
    assert s["failed"] == len(bad) and s["evaluated"] == 12 - len(bad) and s["seed"] == 11
    c = robustness(RobustnessSpec(seed=12, count=12, distributions=spec.distributions), base)
    assert not np.array_equal(a.metrics, c.metrics, equal_nan=True)


def test_samples_record_reduced_and_canonical_alignment():
    samples = draw_samples(RobustnessSpec(seed=5, count=20), MicrodiskEmitter())
    for s in samples:
        assert (s["u_canonical"], s["v_canonical"]) == pytest.approx(canonicalize_alignment(s["u"], s["v"], 0.5168))
        assert 0 <= s["v_reduced"] <= s["u_reduced"] * math.tan(math.pi / 6) + 1e-12


def test_symmetry_equivalent_alignments_share_efficiency():
    base = MicrodiskEmitter(u=0.13, v=0.05, **FAST)
    ref = base.fit().score()
    a = base.a
    for u, v in point_group_images(0.13, 0.05)[1:6]:
        for t in ((0, 0), (a, 0), (a / 2, a * math.sqrt(3) / 2)):
            e = MicrodiskEmitter(u=u + t[0], v=v + t[1], **FAST).fit()
            assert e.score() == pytest.approx(ref, rel=1e-9)
