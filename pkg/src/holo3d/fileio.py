"""Bit-exact file formats and the run configuration format.

Fields and volumes are stored as raw little-endian binaries of interleaved
(real, imag) float64 pairs, x-fastest, then y, then plane, with a JSON
sidecar header at "<payload>.json".  Run configurations are JSON files with
optics / phantom / solver / io sections; unknown keys are rejected.
All writes go through a temp file and an atomic rename.
"""

import json
import os
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .core import ComplexField, Grid2D, OpticalSetup, Volume
from .errors import ParameterError
from .phantoms import PhantomKind, PhantomSpec, make_setup_paper
from .propagation import ANGULAR_SPECTRUM, FRESNEL, PropagatorPlan
from .regularizers import Regularizer, RegKind
from .solver import SolverConfig

FORMAT_VERSION = 1
DTYPE_TAG = "complex128-le-interleaved"


def _atomic_write_bytes(path, payload):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_json(path, obj):
    _atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def header_path(path):
    return str(path) + ".json"


def _payload_bytes(values):
    # complex128 is stored as adjacent little-endian (real, imag) float64
    a = np.asarray(values, dtype="<c16")
    return np.ravel(a, order="F").tobytes()


def write_field(path, field, setup=None):
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "field",
        "nx": field.grid.nx,
        "ny": field.grid.ny,
        "pitch_um": field.grid.pitch,
        "dtype": DTYPE_TAG,
    }
    if setup is not None:
        header["wavelength_um"] = setup.wavelength
        header["z_detector_um"] = setup.z_detector
        header["zplanes_um"] = list(setup.zplanes)
    _atomic_write_bytes(path, _payload_bytes(field.values))
    _atomic_write_json(header_path(path), header)


def write_volume(path, volume, setup=None):
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "volume",
        "nx": volume.grid.nx,
        "ny": volume.grid.ny,
        "mz": volume.num_planes,
        "pitch_um": volume.grid.pitch,
        "zplanes_um": list(volume.zplanes),
        "dtype": DTYPE_TAG,
    }
    if setup is not None:
        header["wavelength_um"] = setup.wavelength
        header["z_detector_um"] = setup.z_detector
    _atomic_write_bytes(path, _payload_bytes(volume.values))
    _atomic_write_json(header_path(path), header)


def _read_header(path):
    hp = header_path(path)
    if not os.path.exists(hp):
        raise ParameterError(f"missing sidecar header {hp}")
    with open(hp) as f:
        header = json.load(f)
    if header.get("format_version") != FORMAT_VERSION:
        raise ParameterError(f"unsupported format version in {hp}")
    if header.get("dtype") != DTYPE_TAG:
        raise ParameterError(f"unsupported payload dtype in {hp}")
    return header


def _read_payload(path, shape):
    expected = 16 * int(np.prod(shape))
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) != expected:
        raise ParameterError(
            f"payload {path} has {len(raw)} bytes, expected {expected}"
        )
    flat = np.frombuffer(raw, dtype="<c16")
    return np.reshape(flat, shape, order="F").astype(np.complex128)


def read_field(path):
    """Returns (ComplexField, header dict)."""
    header = _read_header(path)
    if header["kind"] != "field":
        raise ParameterError(f"{path} is not a field file")
    grid = Grid2D(header["nx"], header["ny"], header["pitch_um"])
    values = _read_payload(path, (grid.nx, grid.ny))
    return ComplexField(grid, values), header


def read_volume(path):
    """Returns (Volume, header dict)."""
    header = _read_header(path)
    if header["kind"] != "volume":
        raise ParameterError(f"{path} is not a volume file")
    grid = Grid2D(header["nx"], header["ny"], header["pitch_um"])
    zplanes = tuple(header["zplanes_um"])
    values = _read_payload(path, (grid.nx, grid.ny, len(zplanes)))
    return Volume(grid, zplanes, values), header


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpticsConfig:
    wavelength_um: float = 0.5
    nx: int = 128
    ny: int = 128
    pitch_um: float = 5.0
    num_planes: int = 30
    dz_um: float = 25.0
    z_start_um: float = 0.0
    detector_distance_um: float = 1060.0
    padding: int = 1
    kernel: str = FRESNEL

    def make_setup(self):
        return make_setup_paper(
            nx=self.nx, ny=self.ny, pitch=self.pitch_um, mz=self.num_planes,
            dz=self.dz_um, wavelength=self.wavelength_um,
            detector_distance=self.detector_distance_um, z_start=self.z_start_um,
        )

    def make_plan(self):
        if self.kernel not in (FRESNEL, ANGULAR_SPECTRUM):
            raise ParameterError(f"unknown kernel {self.kernel!r}")
        return PropagatorPlan(self.make_setup(), padding=self.padding, kernel=self.kernel)


@dataclass(frozen=True)
class RunConfig:
    optics: OpticsConfig
    phantom: PhantomSpec = None
    solver: SolverConfig = None
    io: dict = None


def _take(section, name, fields):
    unknown = set(section) - set(fields)
    if unknown:
        raise ParameterError(f"unknown keys in [{name}] section: {sorted(unknown)}")
    return {k: section[k] for k in section}


def _parse_optics(section):
    kwargs = _take(section, "optics", OpticsConfig.__dataclass_fields__)
    return OpticsConfig(**kwargs)


def _parse_phantom(section, optics):
    allowed = {"kind", "planes", "glyph_size"}
    kwargs = _take(section, "phantom", allowed)
    if "kind" not in kwargs:
        raise ParameterError("phantom section requires a 'kind'")
    try:
        kind = PhantomKind(kwargs.pop("kind"))
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    if "planes" in kwargs:
        kwargs["planes"] = tuple(kwargs["planes"])
    return PhantomSpec(kind=kind, nx=optics.nx, ny=optics.ny,
                       mz=optics.num_planes, **kwargs)


def _parse_solver(section):
    allowed = {
        "alpha", "max_iterations", "regularizer", "tv_inner_iterations",
        "power_iterations", "power_tolerance", "seed", "step_override",
        "record_every", "early_stop_tol",
    }
    kwargs = _take(section, "solver", allowed)
    if "alpha" not in kwargs:
        raise ParameterError("solver section requires 'alpha'")
    if "max_iterations" not in kwargs:
        raise ParameterError("solver section requires 'max_iterations'")
    if "regularizer" not in kwargs:
        raise ParameterError("solver section requires 'regularizer'")
    try:
        kind = RegKind(kwargs.pop("regularizer"))
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    reg = Regularizer(kind=kind,
                      tv_inner_iterations=kwargs.pop("tv_inner_iterations", 50))
    return SolverConfig(regularizer=reg, **kwargs)


def parse_config(doc):
    """Build a RunConfig from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ParameterError("config root must be a JSON object")
    unknown = set(doc) - {"optics", "phantom", "solver", "io"}
    if unknown:
        raise ParameterError(f"unknown config sections: {sorted(unknown)}")
    optics = _parse_optics(doc.get("optics", {}))
    phantom = _parse_phantom(doc["phantom"], optics) if "phantom" in doc else None
    solver = _parse_solver(doc["solver"]) if "solver" in doc else None
    return RunConfig(optics=optics, phantom=phantom, solver=solver,
                     io=dict(doc.get("io", {})) or None)


def load_config(path):
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed config {path}: {exc}") from None
    return parse_config(doc)


def serialize_config(cfg):
    """Inverse of parse_config: parse_config(serialize_config(c)) == c."""
    doc = {"optics": asdict(cfg.optics)}
    if cfg.phantom is not None:
        doc["phantom"] = {
            "kind": cfg.phantom.kind.value,
            "planes": list(cfg.phantom.planes),
            "glyph_size": cfg.phantom.glyph_size,
        }
    if cfg.solver is not None:
        s = cfg.solver
        doc["solver"] = {
            "alpha": s.alpha,
            "max_iterations": s.max_iterations,
            "regularizer": s.regularizer.kind.value,
            "tv_inner_iterations": s.regularizer.tv_inner_iterations,
            "power_iterations": s.power_iterations,
            "power_tolerance": s.power_tolerance,
            "seed": s.seed,
            "step_override": s.step_override,
            "record_every": s.record_every,
            "early_stop_tol": s.early_stop_tol,
        }
    if cfg.io:
        doc["io"] = dict(cfg.io)
    return doc


def save_config(path, cfg):
    _atomic_write_json(path, serialize_config(cfg))


def write_report(path, report, extra=None):
    """Serialize a RunReport (plus optional extra metrics) as sorted JSON.

    wall_time is included but is the one field excluded from byte-identity
    guarantees between reruns.
    """
    doc = report.to_dict()
    if extra:
        doc.update(extra)
    _atomic_write_json(path, doc)


def read_report(path):
    with open(path) as f:
        return json.load(f)


# ---------------------------------------------------------------------------
# 16-bit graymap export
# ---------------------------------------------------------------------------

def write_pgm16(path, img):
    """Write a (nx, ny) uint16 array as a binary 16-bit PGM.

    Image rows are y (top row = largest y), columns are x.
    """
    a = np.asarray(img, dtype=np.uint16)
    rows = a.T[::-1, :]  # (ny, nx), y decreasing downward
    header = f"P5\n{rows.shape[1]} {rows.shape[0]}\n65535\n".encode()
    _atomic_write_bytes(path, header + rows.astype(">u2").tobytes())


def read_pgm16(path):
    with open(path, "rb") as f:
        raw = f.read()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"65535":
        raise ParameterError(f"{path} is not a 16-bit binary PGM")
    w, h = (int(t) for t in parts[1].split())
    rows = np.frombuffer(parts[3], dtype=">u2", count=w * h).reshape(h, w)
    return rows[::-1, :].T.astype(np.uint16)
