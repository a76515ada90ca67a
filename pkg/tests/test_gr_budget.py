"""Relativistic budget magnitudes against the quoted anchors, scaling laws,
and report serialization."""

import numpy as np
import pytest

from grclock import gr_budget


def default_params(**kw):
    return gr_budget.LatticeClockParams(**kw)


def test_grs_per_site_anchor():
    val = gr_budget.grs_per_site(default_params())
    assert val == pytest.approx(4.4e-23, rel=0.02)


def test_grs_millimeter_decade():
    val = gr_budget.grs_over_separation(default_params(separation=1e-3))
    assert 1e-19 <= val < 1e-18


def test_grs_zero_gravity():
    # zero g is outside the validated domain; linearity pins the limit instead
    a = gr_budget.grs_per_site(default_params(g_lo=9.80))
    b = gr_budget.grs_per_site(default_params(g_lo=4.90))
    assert b == pytest.approx(a / 2, rel=1e-12)


def test_grs_linear_scaling():
    p1 = default_params()
    p2 = default_params(lattice_wavelength=2 * p1.lattice_wavelength)
    assert gr_budget.grs_per_site(p2) == pytest.approx(2 * gr_budget.grs_per_site(p1), rel=1e-12)


def test_sds_anchor():
    val = gr_budget.sds_shift(default_params())
    assert val == pytest.approx(-4.5e-21, rel=0.03)


def test_sds_sqrt_depth_scaling():
    shallow = abs(gr_budget.sds_shift(default_params()))
    deep = abs(gr_budget.sds_shift(default_params(depth_x=600, depth_y=600, depth_z=600)))
    # E_band = sum E_R (sqrt(V) - 1/4): doubling V scales by ~sqrt(2) up to
    # the constant -1/4 correction
    assert deep / shallow == pytest.approx(np.sqrt(2), rel=0.01)


def test_sds_unit_depth():
    p = default_params(depth_x=1, depth_y=1, depth_z=1)
    expected = -3 * p.recoil_energy * 0.75 / (2 * p.atom_mass * p.c**2)
    assert gr_budget.sds_shift(p) == pytest.approx(expected, rel=1e-12)


def test_sds_negative_always():
    for v in (1, 10, 300, 5000):
        assert gr_budget.sds_shift(default_params(depth_x=v, depth_y=v, depth_z=v)) < 0


def test_other_corrections_anchors():
    report = gr_budget.other_corrections(default_params())
    assert report.value("p4_kinetic") == pytest.approx(7.9e-31, rel=1.0)
    assert report.value("phi_squared") == pytest.approx(2.7e-26, rel=1.0)
    assert report.value("p_phi_p") == pytest.approx(3.0e-28, rel=1.0)
    # Roentgen lattice-depth factor ~ 1e-11
    assert report.value("roentgen_lattice_depth") == pytest.approx(1e-11, rel=1.0)
    assert report.value("dirac_curved_spacetime") is None


def test_phi_squared_one_meter():
    report = gr_budget.other_corrections(default_params(separation=1.0))
    assert report.value("phi_squared") == pytest.approx(2.7e-22, rel=1.0)


def test_params_validation():
    with pytest.raises(ValueError):
        default_params(g_lo=-1.0)
    with pytest.raises(ValueError):
        default_params(depth_z=0.5)


def test_report_serialization():
    report = gr_budget.other_corrections(default_params())
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "term,fractional_value,note"
    assert "p4_kinetic" in csv_text
    pretty = report.pretty()
    assert "phi_squared" in pretty
    with pytest.raises(KeyError):
        report.value("nonexistent")
