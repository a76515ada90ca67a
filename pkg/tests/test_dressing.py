"""Dressed-state algebra: closed forms against a 2x2 eigen-oracle,
Clebsch-Gordan values against a ladder-recursion oracle, coupling ratios,
and the magnetic-gradient/Rabi sensitivity results."""

from fractions import Fraction
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grclock import dressing


def eigen_oracle(rabi, detuning):
    """Direct 2x2 diagonalization in the {|e,mF>, |g,mF-1>} rotating frame:
    H = [[0, rabi/2], [rabi/2, detuning]] up to the common omega_0 offset."""
    h = np.array([[0.0, rabi / 2.0], [rabi / 2.0, detuning]])
    evals, evecs = np.linalg.eigh(h)
    # |+> is the upper branch; fix gauge so the |e> component is positive
    plus = evecs[:, 1] * np.sign(evecs[0, 1] or 1.0)
    return {"c1": plus[0], "c2": plus[1], "e_plus": evals[1], "e_minus": evals[0]}


def cg_recursion_oracle(f):
    """F x 1 -> F coefficients from ladder-operator recursion: apply
    J- = F- + S- to the stretched |F, F; F x 1> decomposition numerically."""
    # build the coupled |F(out)=F, m> states by explicit diagonalization of
    # J^2 in the product basis |F m1> x |1 m2>
    from grclock.spin_core import spin_matrices

    a = spin_matrices(f)
    b = spin_matrices(1.0)
    da, db = a["z"].shape[0], 3
    eye_a, eye_b = np.eye(da), np.eye(db)
    jz = np.kron(a["z"], eye_b) + np.kron(eye_a, b["z"])
    jp = np.kron(a["+"], eye_b) + np.kron(eye_a, b["+"])
    jm = jp.T
    j2 = jm @ jp + jz @ jz + jz
    evals, evecs = np.linalg.eigh(j2 + 1e-6 * jz)  # lift m degeneracy
    out = {}
    for k in range(evals.size):
        # pick the F(out) = F manifold: J^2 eigenvalue F(F+1)
        m = round((evecs[:, k] @ jz @ evecs[:, k]) * 2) / 2
        jj = evecs[:, k] @ j2 @ evecs[:, k]
        if abs(jj - f * (f + 1)) < 1e-3:
            vec = evecs[:, k]
            # Condon-Shortley gauge: the entry with the largest m1 is positive
            for i1 in reversed(range(da)):
                for i2 in reversed(range(db)):
                    j = i1 * db + i2
                    if abs(vec[j]) > 1e-8:
                        if vec[j] < 0:
                            vec = -vec
                        break
                else:
                    continue
                break
            out[m] = vec
    return out


@pytest.mark.parametrize("f", [1.0, 2.5, 4.5])
def test_cg_against_recursion_oracle(f):
    oracle = cg_recursion_oracle(f)
    for m_out, vec in oracle.items():
        db = 3
        da = int(round(2 * f + 1))
        for i1 in range(da):
            m1 = i1 - f
            for i2 in range(db):
                sigma = i2 - 1
                if m1 + sigma != m_out:
                    continue
                want = vec[i1 * db + i2]
                got = dressing.clebsch_gordan(f, m1, int(sigma))
                assert got == pytest.approx(want, abs=1e-7), (f, m1, sigma)


def test_cg_closed_form_c0():
    # C^0_m = m / sqrt(F(F+1))
    f = 4.5
    for mm in np.arange(-f, f + 1):
        assert dressing.clebsch_gordan(f, mm, 0) == pytest.approx(
            mm / sqrt(f * (f + 1)), abs=1e-12
        )


def test_cg_selection_rule():
    assert dressing.clebsch_gordan(2.0, 0.0, 0) == 0.0


def test_cg_completeness():
    # sum over output channels F' in {F-1, F, F+1} of <F m; 1 sigma|F' m+sigma>^2 = 1
    f = 4.5
    for mm in np.arange(-f + 1, f):
        for sigma in (-1, 0, 1):
            total = sum(
                dressing._cg(
                    Fraction(9, 2), Fraction(mm), Fraction(1), Fraction(sigma),
                    fp, Fraction(mm) + sigma,
                ) ** 2
                for fp in (Fraction(7, 2), Fraction(9, 2), Fraction(11, 2))
                if abs(Fraction(mm) + sigma) <= fp
            )
            assert total == pytest.approx(1.0, abs=1e-12)


def test_cg_range_errors():
    with pytest.raises(ValueError):
        dressing.clebsch_gordan(4.5, 4.5, +1)
    with pytest.raises(ValueError):
        dressing.clebsch_gordan(4.5, 1.5, 2)


# ---------------------------------------------------------------------------
# dressed states

def test_dress_resonant():
    ds = dressing.dress(dressing.DressingConfig(rabi=1.0, detuning=0.0))
    assert ds.c1 == pytest.approx(1 / sqrt(2), abs=1e-14)
    assert ds.c2 == pytest.approx(1 / sqrt(2), abs=1e-14)


def test_dress_quoted_value():
    ds = dressing.dress(dressing.DressingConfig(rabi=1.0, detuning=3.0))
    assert ds.c2**2 == pytest.approx((1 + 3 / sqrt(10)) / 2, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=-1e3, max_value=1e3),
)
def test_dress_against_2x2_oracle(rabi, detuning):
    cfg = dressing.DressingConfig(rabi=rabi, detuning=detuning)
    ds = dressing.dress(cfg)
    oracle = eigen_oracle(rabi, detuning)
    assert ds.c1**2 + ds.c2**2 == pytest.approx(1.0, abs=1e-12)
    assert ds.e_plus - ds.e_minus == pytest.approx(cfg.generalized_rabi, rel=1e-12)
    assert ds.c1 == pytest.approx(abs(oracle["c1"]), abs=1e-9)
    assert ds.c2 == pytest.approx(abs(oracle["c2"]), abs=1e-9)
    assert ds.e_plus == pytest.approx(oracle["e_plus"], abs=1e-9 * max(1.0, abs(oracle["e_plus"])))
    assert ds.e_minus == pytest.approx(oracle["e_minus"], abs=1e-9 * max(1.0, abs(oracle["e_minus"])))


def test_mass_defect_values_and_monotonicity():
    grid = np.linspace(-5, 5, 201)
    vals = [
        dressing.mass_defect(dressing.DressingConfig(rabi=1.0, detuning=float(x)))
        for x in grid
    ]
    assert np.all(np.diff(vals) > 0)
    assert dressing.mass_defect(dressing.DressingConfig(1.0, 0.0)) == pytest.approx(0.5)
    assert dressing.mass_defect(dressing.DressingConfig(1.0, -1.0)) == pytest.approx(
        (1 - 1 / sqrt(2)) / 2, abs=1e-12
    )
    assert dressing.mass_defect(dressing.DressingConfig(1.0, 1e6)) == pytest.approx(1.0, abs=1e-6)


def test_dressing_config_validation():
    with pytest.raises(ValueError):
        dressing.DressingConfig(rabi=-1.0, detuning=0.0)
    with pytest.raises(ValueError):
        dressing.DressingConfig(rabi=1.0, detuning=0.0, f_spin=4.5, m_f=-4.5)


# ---------------------------------------------------------------------------
# couplings

def test_couplings_far_detuned_jz_vanishes():
    cfg = dressing.DressingConfig(rabi=1.0, detuning=1e8)
    _, j_z = dressing.cavity_couplings(cfg, 1.0)
    assert abs(j_z) < 1e-7


def test_jz_nonnegative():
    for x in np.linspace(-4, 4, 41):
        _, j_z = dressing.cavity_couplings(dressing.DressingConfig(1.0, float(x)), 1.0)
        assert j_z >= 0.0


def test_coupling_ratio_chi_independent():
    cfg = dressing.DressingConfig(1.0, 0.7)
    j1 = dressing.cavity_couplings(cfg, 1.0)
    j2 = dressing.cavity_couplings(cfg, 17.3)
    assert j1[1] / j1[0] == pytest.approx(j2[1] / j2[0], rel=1e-12)


def test_heisenberg_point_golden():
    # golden value frozen from the first bisection run
    hp = dressing.heisenberg_point(4.5, 1.5)
    assert hp == pytest.approx(0.25819888974716054, abs=1e-9)
    cfg = dressing.DressingConfig(rabi=1.0, detuning=hp, f_spin=4.5, m_f=1.5)
    j_perp, j_z = dressing.cavity_couplings(cfg, 1.0)
    assert j_z / j_perp == pytest.approx(1.0, abs=1e-10)


def test_heisenberg_point_absent():
    # m_F = 9/2 leaves no crossing inside the bracket
    with pytest.raises(ValueError):
        dressing.heisenberg_point(4.5, 4.5, bracket=(0.5, 5.0))


# ---------------------------------------------------------------------------
# gradient discrimination and Rabi sensitivity

def test_gradient_discrimination_distinguishable():
    configs = [dressing.DressingConfig(1.0, float(x)) for x in (-3.0, 0.0, 3.0)]
    rows = dressing.gradient_discrimination(configs, grs_slope=1.0, zeeman=(0.3, 0.1, 1.5))
    c2sqs = [dressing.mass_defect(c) for c in configs]
    np.testing.assert_allclose(
        [r["grs_slope"] for r in rows], c2sqs, atol=1e-12
    )
    np.testing.assert_allclose(c2sqs, [0.02566, 0.5, 0.97434], atol=1e-4)
    # affine-in-|C2|^2 with intercept -eta_g: slopes differ from any pure
    # proportionality at every interior point
    for r, c2sq in zip(rows, c2sqs):
        assert r["zeeman_slope"] == pytest.approx(
            c2sq * (0.3 - 0.1) * 1.5 - (1 - c2sq) * 0.1, abs=1e-12
        )


def test_gradient_discrimination_degenerate():
    # eta_g = 0 and eta_e m_F = grs_slope: families coincide for all delta
    configs = [dressing.DressingConfig(1.0, float(x)) for x in np.linspace(-2, 2, 9)]
    rows = dressing.gradient_discrimination(configs, grs_slope=1.0, zeeman=(1.0 / 1.5, 0.0, 1.5))
    for r in rows:
        assert r["zeeman_slope"] == pytest.approx(r["grs_slope"], abs=1e-12)


def test_gradient_discrimination_empty():
    with pytest.raises(ValueError):
        dressing.gradient_discrimination([], 1.0, (0.1, 0.1, 1.5))


def test_rabi_sensitivity_cancellation():
    cfg = dressing.DressingConfig(rabi=2.0, detuning=0.7)
    dp, dm, avg = dressing.rabi_sensitivity(cfg, 1e-3)
    assert dp + dm == pytest.approx(0.0, abs=1e-15)
    assert avg == 0.0
    assert dressing.rabi_sensitivity(cfg, 0.0)[0] == 0.0


def test_rabi_sensitivity_requirement_order():
    # Omega/2pi = 10 Hz, delta = 0: |dE-|/2pi < 1e-4 Hz requires dOmega/Omega
    # of order 1e-5 (factor-2 check on 2e-5)
    omega = 2 * np.pi * 10.0
    cfg = dressing.DressingConfig(rabi=omega, detuning=0.0)

    def shift_hz(frac):
        return abs(dressing.rabi_sensitivity(cfg, frac * omega)[1]) / (2 * np.pi)

    frac = 2e-5
    assert shift_hz(frac) == pytest.approx(1e-4, rel=1.0)  # within factor 2
