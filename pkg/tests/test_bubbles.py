"""Tests for the limit bubble profiles and their integral identities."""

import math

import numpy as np
import pytest

from nodal import bubbles as bb
from nodal.constants import theta_sequence


def test_spec_parameters():
    s0 = bb.bubble_spec(0, 0.0)
    assert s0.theta_i == 2.0
    assert abs(s0.beta_i - 2.0 * math.sqrt(2.0)) < 1e-15
    assert s0.sigma_i_alpha == 0.0
    s1 = bb.bubble_spec(1, 0.0)
    th = theta_sequence(1).theta[1]
    assert abs(s1.sigma_i_alpha - math.sqrt((th * th - 4.0) / 2.0)) < 1e-12
    assert abs(s1.sigma_i_alpha - 7.197898327767511) < 1e-12  # frozen
    # alpha rescales sigma through the 1/(2+alpha) power
    s1a = bb.bubble_spec(1, 2.0)
    assert abs(s1a.sigma_i_alpha - s1.sigma_i_alpha ** 0.5) < 1e-13


def test_profile_values_at_anchor_points():
    s0 = bb.bubble_spec(0, 0.0)
    assert bb.bubble_profile(s0, 0.0) == 0.0
    # closed form for the first bubble: log(64/(8+r^2)^2)
    for r in (0.5, 1.0, 3.0, 10.0):
        expected = math.log(64.0 / (8.0 + r * r) ** 2)
        assert abs(bb.bubble_profile(s0, r) - expected) < 1e-13
    s1 = bb.bubble_spec(1, 0.0)
    assert abs(bb.bubble_profile(s1, s1.sigma_i_alpha)) < 1e-12
    assert bb.bubble_profile(s1, 0.0) == -math.inf
    with pytest.raises(ValueError):
        bb.bubble_profile(s1, -1.0)


def test_profile_nonpositive_with_peak_at_sigma():
    for i in (1, 2, 5):
        spec = bb.bubble_spec(i, 0.0)
        sig = spec.sigma_i_alpha
        grid = np.geomspace(sig / 50.0, 50.0 * sig, 800)
        vals = np.array([bb.bubble_profile(spec, float(r)) for r in grid])
        assert np.all(vals <= 0.0)
        assert np.all(vals[np.abs(grid - sig) > 0.05 * sig] < -1e-5)
        # derivative vanishes at sigma
        h = 1e-6 * sig
        dz = (bb.bubble_profile(spec, sig + h) - bb.bubble_profile(spec, sig - h)) / (2 * h)
        assert abs(dz) < 1e-6


def test_first_bubble_tail_decreasing():
    s0 = bb.bubble_spec(0, 0.0)
    grid = np.linspace(1.0, 100.0, 200)
    vals = [bb.bubble_profile(s0, float(r)) for r in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # tail behaves like -2*log of the leading power
    assert abs(bb.bubble_profile(s0, 1e6) - math.log(64.0 / 1e24)) < 1e-9


def test_alpha_change_of_variable_identity():
    # Z_{i,alpha}(r) == Z_{i,0}(r^((alpha+2)/2)) exactly
    for i in (0, 1, 3):
        base = bb.bubble_spec(i, 0.0)
        for alpha in (0.5, 1.0, 2.0):
            spec = bb.bubble_spec(i, alpha)
            for r in np.geomspace(0.01, 50.0, 60):
                lhs = bb.bubble_profile(spec, float(r))
                rhs = bb.bubble_profile(base, float(r) ** ((alpha + 2.0) / 2.0))
                assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(rhs))


def test_mass_first_bubble_exact():
    s0 = bb.bubble_spec(0, 0.0)
    mass = bb.bubble_mass(s0)
    assert abs(mass - 8.0 * math.pi) <= 1e-10 * 8.0 * math.pi


def test_mass_matches_formula():
    for i in (0, 1, 2, 4):
        for alpha in (0.0, 1.0, 2.0):
            spec = bb.bubble_spec(i, alpha)
            expected = 8.0 * math.pi * spec.theta_i / (alpha + 2.0)
            mass = bb.bubble_mass(spec)
            assert abs(mass - expected) <= 1e-8 * expected


def test_mass_singular_bubble_value():
    s1 = bb.bubble_spec(1, 0.0)
    mass = bb.bubble_mass(s1)
    assert abs(mass - 4.0 * math.pi * s1.theta_i) <= 1e-8 * mass
    assert abs(mass - 130.36328931724) < 1e-9  # frozen from the formula


def test_split_integrals():
    th = theta_sequence(2).theta
    for i in (1, 2):
        spec = bb.bubble_spec(i, 0.0)
        split = bb.bubble_split_integrals(spec)
        assert abs(split.inner - (th[i] - 2.0)) <= 1e-8 * (th[i] - 2.0)
        assert abs(split.outer - (th[i] + 2.0)) <= 1e-8 * (th[i] + 2.0)
        assert abs(split.inner + split.outer - 2.0 * th[i]) <= 1e-8 * th[i]


def test_split_integrals_domain():
    with pytest.raises(ValueError):
        bb.bubble_split_integrals(bb.bubble_spec(0, 0.0))
    with pytest.raises(ValueError):
        bb.bubble_split_integrals(bb.bubble_spec(1, 1.0))


def test_pde_residual_small_on_grid():
    grid = np.linspace(0.1, 10.0, 25)
    for i, cap in ((0, 1e-5), (1, 2e-4), (2, 5e-4)):
        spec = bb.bubble_spec(i, 0.0)
        assert bb.bubble_pde_residual(spec, grid) <= cap


def test_pde_residual_order_two():
    grid = np.linspace(0.1, 10.0, 25)
    for i, h in ((0, 8e-3), (1, 2e-3), (2, 2e-3)):
        spec = bb.bubble_spec(i, 0.0)
        r_h = bb.bubble_pde_residual(spec, grid, h)
        r_half = bb.bubble_pde_residual(spec, grid, h / 2.0)
        assert 3.4 <= r_h / r_half <= 4.6


def test_pde_residual_henon_weight():
    grid = np.linspace(0.2, 5.0, 15)
    spec = bb.bubble_spec(1, 1.0)
    assert bb.bubble_pde_residual(spec, grid, 2e-3) <= 1e-2
    r1 = bb.bubble_pde_residual(spec, grid, 2e-3)
    r2 = bb.bubble_pde_residual(spec, grid, 1e-3)
    assert 3.4 <= r1 / r2 <= 4.6


def test_pde_residual_grid_validation():
    spec = bb.bubble_spec(1, 0.0)
    with pytest.raises(ValueError):
        bb.bubble_pde_residual(spec, np.array([0.0, 1.0]))


def test_profile_samples_shape():
    spec = bb.bubble_spec(1, 0.0)
    out = bb.profile_samples(spec, np.linspace(0.0, 10.0, 11))
    assert out.shape == (11, 3)
    assert out[0, 1] == -math.inf and out[0, 2] == 0.0
    assert np.allclose(out[1:, 2], np.exp(out[1:, 1]))


def test_large_index_no_overflow():
    # theta ~ 8i makes direct powers overflow; log-space evaluation must not
    spec = bb.bubble_spec(40, 0.0)
    sig = spec.sigma_i_alpha
    val = bb.bubble_profile(spec, sig)
    assert abs(val) < 1e-9
    assert math.isfinite(bb.bubble_profile(spec, 1e-3))
    assert math.isfinite(bb.bubble_profile(spec, 1e3))
