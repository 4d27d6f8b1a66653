import json

import numpy as np
import pytest

import holo3d as h
from holo3d import fileio
from conftest import random_field, random_volume, small_setup


class TestFieldVolumeFiles:
    def test_field_round_trip_bit_identical(self, rng, tmp_path):
        s = small_setup()
        f = random_field(s, rng)
        path = tmp_path / "field.bin"
        fileio.write_field(path, f, s)
        back, header = fileio.read_field(path)
        assert np.array_equal(back.values, f.values)
        assert back.grid == f.grid
        assert header["wavelength_um"] == s.wavelength

    def test_volume_round_trip_bit_identical(self, rng, tmp_path):
        s = small_setup(mz=3)
        v = random_volume(s, rng)
        path = tmp_path / "vol.bin"
        fileio.write_volume(path, v, s)
        back, header = fileio.read_volume(path)
        assert np.array_equal(back.values, v.values)
        assert back.zplanes == v.zplanes

    def test_rewrite_is_byte_identical(self, rng, tmp_path):
        s = small_setup(mz=3)
        v = random_volume(s, rng)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        fileio.write_volume(p1, v, s)
        fileio.write_volume(p2, v, s)
        assert p1.read_bytes() == p2.read_bytes()
        assert (tmp_path / "a.bin.json").read_bytes() == (tmp_path / "b.bin.json").read_bytes()

    def test_payload_layout_x_fastest(self, tmp_path):
        # x index advances fastest in the raw payload, then y, then plane
        s = small_setup(nx=2, ny=2, mz=2)
        vals = np.arange(8, dtype=float).reshape(2, 2, 2, order="F") + 0j
        fileio.write_volume(tmp_path / "v.bin", h.Volume(s.grid, s.zplanes, vals), s)
        raw = np.frombuffer((tmp_path / "v.bin").read_bytes(), dtype="<f8")
        assert np.array_equal(raw[0::2], np.arange(8.0))  # real parts
        assert np.all(raw[1::2] == 0)  # imaginary parts

    def test_payload_size_checked(self, rng, tmp_path):
        s = small_setup(mz=2)
        v = random_volume(s, rng)
        path = tmp_path / "v.bin"
        fileio.write_volume(path, v, s)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(h.ParameterError):
            fileio.read_volume(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "v.bin"
        path.write_bytes(b"\0" * 64)
        with pytest.raises(h.ParameterError):
            fileio.read_volume(path)

    def test_kind_mismatch_rejected(self, rng, tmp_path):
        s = small_setup()
        fileio.write_field(tmp_path / "f.bin", random_field(s, rng), s)
        with pytest.raises(h.ParameterError):
            fileio.read_volume(tmp_path / "f.bin")


class TestRunConfig:
    def full_doc(self):
        return {
            "optics": {"wavelength_um": 0.5, "nx": 16, "ny": 16, "pitch_um": 5.0,
                       "num_planes": 4, "dz_um": 25.0, "detector_distance_um": 500.0},
            "phantom": {"kind": "amplitude_reflectors", "planes": [1, 2, 3, 4]},
            "solver": {"alpha": 5e-4, "max_iterations": 100,
                       "regularizer": "l1_positive", "seed": 3},
        }

    def test_parse_serialize_round_trip(self):
        cfg = fileio.parse_config(self.full_doc())
        again = fileio.parse_config(fileio.serialize_config(cfg))
        assert again == cfg

    def test_save_load_round_trip(self, tmp_path):
        cfg = fileio.parse_config(self.full_doc())
        fileio.save_config(tmp_path / "c.json", cfg)
        assert fileio.load_config(tmp_path / "c.json") == cfg

    def test_unknown_section_rejected(self):
        doc = self.full_doc()
        doc["extras"] = {}
        with pytest.raises(h.ParameterError):
            fileio.parse_config(doc)

    def test_unknown_optics_key_rejected(self):
        doc = self.full_doc()
        doc["optics"]["tilt"] = 0.1
        with pytest.raises(h.ParameterError):
            fileio.parse_config(doc)

    def test_unknown_solver_key_rejected(self):
        doc = self.full_doc()
        doc["solver"]["momentum"] = 0.9
        with pytest.raises(h.ParameterError):
            fileio.parse_config(doc)

    def test_missing_alpha_rejected(self):
        doc = self.full_doc()
        del doc["solver"]["alpha"]
        with pytest.raises(h.ParameterError):
            fileio.parse_config(doc)

    def test_bad_regularizer_name_rejected(self):
        doc = self.full_doc()
        doc["solver"]["regularizer"] = "ridge"
        with pytest.raises(h.ParameterError):
            fileio.parse_config(doc)

    def test_malformed_json_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(h.ParameterError):
            fileio.load_config(p)

    def test_tv_solver_config(self):
        doc = self.full_doc()
        doc["solver"]["regularizer"] = "tv_slicewise"
        doc["solver"]["tv_inner_iterations"] = 25
        cfg = fileio.parse_config(doc)
        assert cfg.solver.regularizer.kind is h.RegKind.TV_SLICEWISE
        assert cfg.solver.regularizer.tv_inner_iterations == 25

    def test_make_plan(self):
        cfg = fileio.parse_config(self.full_doc())
        plan = cfg.optics.make_plan()
        assert plan.num_planes == 4
        assert plan.padding == 1


class TestReport:
    def test_round_trip(self, tmp_path):
        rep = h.RunReport(kappa=30.0)
        rep.cost_history.append((10, 1.0, 2.0, 1.5))
        rep.iterations = 10
        rep.wall_time = 1.25
        fileio.write_report(tmp_path / "r.json", rep, {"object_error": 0.016})
        doc = fileio.read_report(tmp_path / "r.json")
        assert doc["kappa"] == 30.0
        assert doc["cost_history"] == [[10, 1.0, 2.0, 1.5]]
        assert doc["object_error"] == 0.016


class TestPgm16:
    def test_round_trip(self, rng, tmp_path):
        img = rng.integers(0, 65536, size=(7, 5)).astype(np.uint16)
        fileio.write_pgm16(tmp_path / "i.pgm", img)
        back = fileio.read_pgm16(tmp_path / "i.pgm")
        assert np.array_equal(back, img)

    def test_header_format(self, tmp_path):
        fileio.write_pgm16(tmp_path / "i.pgm", np.zeros((4, 3), dtype=np.uint16))
        raw = (tmp_path / "i.pgm").read_bytes()
        assert raw.startswith(b"P5\n4 3\n65535\n")
        assert len(raw) == len(b"P5\n4 3\n65535\n") + 2 * 12
