import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from microdisk_ff import InvalidParameterError
from microdisk_ff.efficiency import ColorCenter, EfficiencyReport, color_center, eta_total, eta_zpl, presets


def test_presets():
    assert presets() == {"NV": 0.03, "SiV": 0.7, "SnV": 0.8}
    p = presets()
    p["NV"] = 1.0
    assert presets()["NV"] == 0.03


@pytest.mark.parametrize(
    "name, expected, tol",
    [("SnV", 0.995, 0.001), ("SiV", 0.99, 0.005), ("NV", 0.62, 0.01)],
)
def test_eta_zpl_reference_values(name, expected, tol):
    assert eta_zpl(52.6, name) == pytest.approx(expected, abs=tol)


def test_eta_zpl_closed_forms():
    assert eta_zpl(52.6, "NV") == pytest.approx(52.6 / (52.6 + 1 / 0.03 - 1), rel=1e-15)
    assert eta_zpl(0.0, "SnV") == 0.0
    assert eta_zpl(7.0, ColorCenter("ideal", 1.0)) == 1.0
    assert eta_zpl(0.0, ColorCenter("ideal", 1.0)) == 1.0


@given(
    st.floats(min_value=0.01, max_value=1.0),
    st.floats(min_value=0.0, max_value=1e4),
    st.floats(min_value=0.0, max_value=1e4),
)
def test_eta_zpl_monotone_and_matches_rate_ratio(b, f1, f2):
    c = ColorCenter("x", b)
    lo, hi = sorted((f1, f2))
    assert eta_zpl(lo, c) <= eta_zpl(hi, c) + 1e-15
    # enhanced ZPL rate over total rate, with rates in units of the natural ZPL rate
    direct = (hi * 1.0) / (hi * 1.0 + (1.0 / b - 1.0)) if b < 1 else 1.0
    assert eta_zpl(hi, c) == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_eta_zpl_errors():
    with pytest.raises(InvalidParameterError):
        eta_zpl(-1.0, "SnV")
    with pytest.raises(InvalidParameterError):
        eta_zpl(1.0, "GeV")
    with pytest.raises(InvalidParameterError):
        ColorCenter("bad", 0.0)
    with pytest.raises(InvalidParameterError):
        ColorCenter("bad", 1.2)


def test_eta_total():
    assert eta_total(0.995, 0.47) == pytest.approx(0.468, abs=0.002)
    assert eta_total(1.0, 0.3) == 0.3
    assert eta_total(0.0, 0.3) == 0.0
    with pytest.raises(InvalidParameterError):
        eta_total(1.2, 0.5)
    with pytest.raises(InvalidParameterError):
        eta_total(0.5, -0.1)


@given(st.floats(min_value=0, max_value=500), st.sampled_from(["NV", "SiV", "SnV"]), st.floats(0, 1))
def test_report_invariant(f, center, col):
    r = EfficiencyReport.build(f, center, col, 0.7)
    assert r.eta == r.eta_zpl * r.eta_col
    d = r.to_dict()
    assert d["eta"] == r.eta and d["center"] == center


def test_report_validation():
    with pytest.raises(InvalidParameterError):
        EfficiencyReport(52.6, 0.9, 1.5, 0.7)
    with pytest.raises(InvalidParameterError):
        EfficiencyReport(np.inf, 0.9, 0.5, 0.7)
    assert color_center("SnV").sideband_ratio == pytest.approx(0.25)
