"""Unit tests for geometry, phase expansion, and pattern computation."""

import math

import numpy as np
import pytest

from planarsynth.array_model import (
    AngleGrid,
    ArrayGeometry,
    PhaseVector,
    RectangularPatch,
    array_factor_bruteforce,
    array_factor_separable,
    element_pattern,
    expand_symmetric,
    wrap_phase,
)

C0 = 299_792_458.0


def uniform_grid(n=361, phi=0.0):
    return AngleGrid(np.linspace(-90.0, 90.0, n), phi)


def random_phase_vector(rng, g):
    return PhaseVector(
        rng.uniform(-np.pi, np.pi - 1e-9, g.m_elems // 2),
        rng.uniform(-np.pi, np.pi - 1e-9, g.n_elems // 2),
    )


class TestGeometry:
    def test_positions_are_centered_pairs(self):
        g = ArrayGeometry(4, 6, dx=0.5, dy=0.7)
        assert np.allclose(g.x_positions(), [-0.75, -0.25, 0.25, 0.75])
        assert np.allclose(g.y_positions(), -g.y_positions()[::-1])
        assert 0.0 not in g.x_positions()

    def test_wavenumber_consistent_with_frequency(self):
        g = ArrayGeometry(2, 2, frequency_hz=1.0e10)
        assert g.wavelength_m == pytest.approx(C0 / 1.0e10)
        assert g.k0 == pytest.approx(2 * np.pi / g.wavelength_m)

    @pytest.mark.parametrize("m,n", [(3, 4), (4, 5), (1, 4), (2, 0)])
    def test_rejects_odd_or_tiny_counts(self, m, n):
        with pytest.raises(ValueError):
            ArrayGeometry(max(m, 1), max(n, 1)) if (m < 2 or n < 2) else ArrayGeometry(m, n)

    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError):
            ArrayGeometry(4, 4, dx=0.0)


class TestPhaseVector:
    def test_rejects_out_of_range_phase(self):
        with pytest.raises(ValueError):
            PhaseVector([np.pi], [0.0])
        with pytest.raises(ValueError):
            PhaseVector([-4.0], [0.0])

    def test_wrap_phase_lands_in_range(self):
        wrapped = wrap_phase([np.pi, -np.pi, 3 * np.pi / 2, 7.0])
        assert np.all(wrapped >= -np.pi) and np.all(wrapped < np.pi)
        assert wrapped[0] == pytest.approx(-np.pi)


class TestExpandSymmetric:
    def test_zero_halves_give_zero_matrix(self):
        g = ArrayGeometry(4, 4)
        full = expand_symmetric(PhaseVector([0.0, 0.0], [0.0, 0.0]), g)
        assert full.shape == (4, 4)
        assert np.all(full == 0.0)

    def test_two_by_two_mirrors_sign(self):
        g = ArrayGeometry(2, 2)
        full = expand_symmetric(PhaseVector([np.pi / 4], [0.0]), g)
        # columns along x ordered by ascending position: -pi/4 then +pi/4
        assert np.allclose(full[:, 0], [-np.pi / 4, np.pi / 4])
        assert np.allclose(full[:, 1], [-np.pi / 4, np.pi / 4])

    def test_hand_expansion_m4(self):
        # x_half=[0.3, 0.7] pairs with positions (0.5, 1.5)*dx; mirrors negate.
        g = ArrayGeometry(4, 2)
        full = expand_symmetric(PhaseVector([0.3, 0.7], [0.1]), g)
        assert np.allclose(full[:, 1] - 0.1, [-0.7, -0.3, 0.3, 0.7])
        assert np.allclose(g.x_positions(), [-0.75, -0.25, 0.25, 0.75])
        # planar phase is the sum of the axis phases
        assert np.allclose(full[:, 0], full[:, 1] - 0.2)

    def test_dimension_mismatch_rejected(self):
        g = ArrayGeometry(4, 4)
        with pytest.raises(ValueError):
            expand_symmetric(PhaseVector([0.1], [0.0, 0.0]), g)


class TestElementPattern:
    def test_isotropic_is_one_everywhere(self):
        g = ArrayGeometry(4, 4)
        theta = np.linspace(-90, 90, 19)
        assert np.all(element_pattern(theta, 0.0, g) == 1.0)
        assert np.all(element_pattern(theta, 37.0, g) == 1.0)

    def test_patch_broadside_is_one(self):
        g = ArrayGeometry(4, 4, element_pattern=RectangularPatch(0.00906, 0.01186))
        assert element_pattern(0.0, 0.0, g) == pytest.approx(1.0)
        assert element_pattern(0.0, 45.0, g) == pytest.approx(1.0)

    def test_patch_matches_scalar_cavity_formula(self):
        # Independent scalar evaluation of the two-slot cavity model at
        # theta=60, phi=0 for the 0.906 cm x 1.186 cm patch at 10 GHz.
        width, length, freq = 0.00906, 0.01186, 1.0e10
        lam = C0 / freq
        theta = math.radians(60.0)
        expected = abs(math.cos(math.pi * length / lam * math.sin(theta)))
        g = ArrayGeometry(4, 4, frequency_hz=freq,
                          element_pattern=RectangularPatch(width, length))
        assert element_pattern(60.0, 0.0, g) == pytest.approx(expected, abs=1e-12)
        # and on the orthogonal cut the slot sinc and cos(theta) factor bind
        phi = math.radians(90.0)
        arg = width / lam * math.sin(theta)
        expected_h = abs(math.sin(math.pi * arg) / (math.pi * arg)) * math.cos(theta)
        assert element_pattern(60.0, 90.0, g) == pytest.approx(expected_h, abs=1e-12)

    def test_patch_never_negative(self):
        g = ArrayGeometry(4, 4, element_pattern=RectangularPatch(0.02, 0.03))
        theta = np.linspace(-90, 90, 181)
        for phi in (0.0, 30.0, 90.0):
            assert np.all(element_pattern(theta, phi, g) >= 0.0)


class TestArrayFactor:
    def test_broadside_peak_at_zero_phases(self):
        g = ArrayGeometry(2, 2)
        pv = PhaseVector([0.0], [0.0])
        p = array_factor_separable(pv, g, uniform_grid())
        idx = np.argmax(p.values_db)
        assert p.angles_deg[idx] == 0.0
        assert p.values_db[idx] == 0.0

    def test_first_null_of_16_element_cut(self):
        # Uniform array null at sin(theta) = lambda / (N d) = 2/16.
        g = ArrayGeometry(16, 8)
        pv = PhaseVector(np.zeros(8), np.zeros(4))
        expected = math.degrees(math.asin(2.0 / 16.0))
        fine = AngleGrid(np.linspace(6.0, 8.0, 2001))
        p = array_factor_separable(pv, g, fine)
        null_at = fine.theta_deg[np.argmin(p.values_db)]
        assert abs(null_at - expected) < 0.01

    def test_normalization_peak_exactly_zero_db(self):
        rng = np.random.default_rng(7)
        g = ArrayGeometry(4, 4)
        for _ in range(20):
            p = array_factor_separable(random_phase_vector(rng, g), g, uniform_grid(181))
            assert p.values_db.max() == 0.0
            assert np.all(p.values_db >= -120.0)

    def test_separable_matches_bruteforce_on_random_phases(self):
        rng = np.random.default_rng(42)
        g = ArrayGeometry(4, 4)
        grid = AngleGrid(np.sort(rng.uniform(-90, 90, 100)))
        for _ in range(50):
            pv = random_phase_vector(rng, g)
            sep = array_factor_separable(pv, g, grid)
            brute = array_factor_bruteforce(expand_symmetric(pv, g), g, grid)
            a = 10.0 ** (sep.values_db / 20.0)
            b = 10.0 ** (brute.values_db / 20.0)
            assert np.max(np.abs(a - b)) <= 1e-10

    def test_bruteforce_detects_non_separable_perturbation(self):
        g = ArrayGeometry(4, 4)
        pv = PhaseVector([0.2, -0.5], [0.9, 0.1])
        grid = uniform_grid(181)
        matrix = expand_symmetric(pv, g)
        matrix[1, 2] += 0.31
        sep = array_factor_separable(pv, g, grid)
        brute = array_factor_bruteforce(matrix, g, grid)
        assert np.max(np.abs(sep.values_db - brute.values_db)) > 1e-3

    def test_phase_negation_mirrors_pattern(self):
        rng = np.random.default_rng(3)
        g = ArrayGeometry(8, 4)
        grid = uniform_grid(361)  # symmetric grid
        for _ in range(10):
            pv = random_phase_vector(rng, g)
            neg = PhaseVector(wrap_phase(-pv.x_half), wrap_phase(-pv.y_half))
            p_fwd = array_factor_separable(pv, g, grid)
            p_neg = array_factor_separable(neg, g, grid)
            a = 10.0 ** (p_fwd.values_db / 20.0)
            b = 10.0 ** (p_neg.values_db[::-1] / 20.0)
            assert np.max(np.abs(a - b)) <= 1e-10

    def test_zero_phase_pattern_symmetric(self):
        g = ArrayGeometry(16, 8)
        pv = PhaseVector(np.zeros(8), np.zeros(4))
        p = array_factor_separable(pv, g, uniform_grid(361))
        a = 10.0 ** (p.values_db / 20.0)
        assert np.max(np.abs(a - a[::-1])) <= 1e-10

    def test_patch_element_modulates_pattern(self):
        patch = RectangularPatch(0.00906, 0.01186)
        g_iso = ArrayGeometry(4, 4)
        g_patch = ArrayGeometry(4, 4, element_pattern=patch)
        pv = PhaseVector([0.3, -0.2], [0.0, 0.4])
        grid = uniform_grid(181)
        p_iso = array_factor_separable(pv, g_iso, grid)
        p_patch = array_factor_separable(pv, g_patch, grid)
        assert not np.allclose(p_iso.values_db, p_patch.values_db)

    def test_bruteforce_shape_mismatch_rejected(self):
        g = ArrayGeometry(4, 4)
        with pytest.raises(ValueError):
            array_factor_bruteforce(np.zeros((4, 2)), g, uniform_grid(19))

    def test_empty_or_unsorted_grid_rejected(self):
        with pytest.raises(ValueError):
            AngleGrid(np.array([]))
        with pytest.raises(ValueError):
            AngleGrid(np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ValueError):
            AngleGrid(np.array([-95.0, 0.0]))
