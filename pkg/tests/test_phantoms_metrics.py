import numpy as np
import pytest

import holo3d as h
from holo3d.phantoms import AMPLITUDE_PLANES, TEXT_PHASES, TEXT_PLANES, glyph_mask
from conftest import random_volume, small_setup


class TestPaperSetup:
    def test_pitch_from_extent(self):
        s = h.make_setup_paper()
        assert s.grid.pitch == pytest.approx(640.0 / 128, rel=1e-15)
        assert s.grid.extent == (640.0, 640.0)

    def test_plane_span(self):
        s = h.make_setup_paper()
        assert s.num_planes == 30
        assert s.zplanes[-1] - s.zplanes[0] == pytest.approx(725.0, rel=1e-12)

    def test_wavenumber(self):
        s = h.make_setup_paper()
        assert s.k == pytest.approx(2 * np.pi / 0.5, rel=1e-15)

    def test_detector_distance(self):
        s = h.make_setup_paper()
        assert s.z_detector - s.zplanes[-1] == pytest.approx(1060.0, rel=1e-12)

    def test_alternative_axial_spacing(self):
        s = h.make_setup_paper(dz=750.0 / 29)
        assert s.zplanes[-1] - s.zplanes[0] == pytest.approx(750.0, rel=1e-12)


class TestAmplitudePhantom:
    def spec(self, **kw):
        return h.PhantomSpec(h.PhantomKind.AMPLITUDE_REFLECTORS, **kw)

    def test_l1_is_sixteen(self):
        vol = h.amplitude_phantom(self.spec())
        assert h.l1_norm(vol) == 16.0

    def test_support_planes(self):
        vol = h.amplitude_phantom(self.spec())
        for c in range(30):
            plane_norm = np.abs(vol.values[:, :, c]).sum()
            if c + 1 in AMPLITUDE_PLANES:
                assert plane_norm == 4.0
            else:
                assert plane_norm == 0.0

    def test_real_nonnegative(self):
        vol = h.amplitude_phantom(self.spec())
        assert np.all(vol.values.imag == 0)
        assert np.all(vol.values.real >= 0)

    def test_blocks_are_2x2(self):
        vol = h.amplitude_phantom(self.spec())
        plane = vol.values[:, :, AMPLITUDE_PLANES[0] - 1].real
        xs, ys = np.nonzero(plane)
        assert len(xs) == 4
        assert xs.max() - xs.min() == 1 and ys.max() - ys.min() == 1

    def test_deterministic(self):
        a = h.amplitude_phantom(self.spec())
        b = h.amplitude_phantom(self.spec())
        assert np.array_equal(a.values, b.values)

    def test_too_small_grid_rejected(self):
        with pytest.raises(h.ParameterError):
            h.amplitude_phantom(self.spec(nx=4, ny=4, mz=30))

    def test_wrong_kind_rejected(self):
        with pytest.raises(h.ParameterError):
            h.amplitude_phantom(h.PhantomSpec(h.PhantomKind.TEXT_PHASE))

    def test_bad_planes_rejected(self):
        with pytest.raises(h.ParameterError):
            self.spec(planes=(3, 11, 20, 31))


class TestTextPhasePhantom:
    def spec(self, **kw):
        return h.PhantomSpec(h.PhantomKind.TEXT_PHASE, **kw)

    def test_plane_one_phase(self):
        vol = h.text_phase_phantom(self.spec())
        plane = vol.values[:, :, 0]
        nz = plane[plane != 0]
        assert len(nz) > 0
        assert np.allclose(nz, np.exp(1j * 2 * np.pi / 3), atol=1e-15)

    def test_unit_modulus(self):
        vol = h.text_phase_phantom(self.spec())
        nz = vol.values[vol.values != 0]
        assert np.abs(np.abs(nz) - 1.0).max() < 1e-14

    def test_all_four_phases(self):
        vol = h.text_phase_phantom(self.spec())
        for plane, phase in zip(TEXT_PLANES, TEXT_PHASES):
            nz = vol.values[:, :, plane - 1]
            nz = nz[nz != 0]
            assert np.allclose(np.angle(nz), phase, atol=1e-14)

    def test_off_planes_zero(self):
        vol = h.text_phase_phantom(self.spec())
        for c in range(30):
            if c + 1 not in TEXT_PLANES:
                assert np.all(vol.values[:, :, c] == 0)

    def test_deterministic(self):
        a = h.text_phase_phantom(self.spec())
        b = h.text_phase_phantom(self.spec())
        assert np.array_equal(a.values, b.values)

    def test_oversized_glyph_rejected(self):
        with pytest.raises(h.ParameterError):
            h.text_phase_phantom(self.spec(nx=16, ny=16, mz=30, glyph_size=32))

    def test_glyph_mask_height(self):
        m = glyph_mask("A", 32)
        assert m.shape[1] == 32
        assert m.shape[0] == 32 * 5 // 7
        assert m.any()


class TestObjectDomainError:
    def test_exact_estimate(self, rng):
        s = small_setup()
        truth = random_volume(s, rng)
        assert h.object_domain_error(truth, truth) == 0.0

    def test_zero_estimate(self, rng):
        s = small_setup()
        truth = random_volume(s, rng)
        zero = h.Volume.zeros(s.grid, s.zplanes)
        assert h.object_domain_error(truth, zero) == pytest.approx(1.0, rel=1e-12)

    def test_doubled_estimate(self, rng):
        s = small_setup()
        truth = random_volume(s, rng)
        doubled = h.Volume(s.grid, s.zplanes, 2 * truth.values)
        assert h.object_domain_error(truth, doubled) == pytest.approx(1.0, rel=1e-12)

    def test_scale_reporting(self, rng):
        s = small_setup()
        truth = random_volume(s, rng)
        est = random_volume(s, rng)
        base = h.object_domain_error(truth, est)
        c = -3.7 + 0.5j
        scaled = h.object_domain_error(
            h.Volume(s.grid, s.zplanes, c * truth.values),
            h.Volume(s.grid, s.zplanes, c * est.values))
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_zero_truth_rejected(self, rng):
        s = small_setup()
        zero = h.Volume.zeros(s.grid, s.zplanes)
        with pytest.raises(h.UndefinedMetricError):
            h.object_domain_error(zero, random_volume(s, rng))


class TestDataDomainError:
    def test_exact_reproduction(self, rng):
        s = small_setup()
        plan = h.PropagatorPlan(s)
        u = random_volume(s, rng)
        v = h.forward(u, plan)
        assert h.data_domain_error(v, u, plan) < 1e-14

    def test_zero_estimate(self, rng):
        s = small_setup()
        plan = h.PropagatorPlan(s)
        u = random_volume(s, rng)
        v = h.forward(u, plan)
        zero = h.Volume.zeros(s.grid, s.zplanes)
        assert h.data_domain_error(v, zero, plan) == pytest.approx(1.0, rel=1e-12)

    def test_zero_data_rejected(self, rng):
        s = small_setup()
        plan = h.PropagatorPlan(s)
        with pytest.raises(h.UndefinedMetricError):
            h.data_domain_error(h.ComplexField.zeros(s.grid),
                                random_volume(s, rng), plan)
