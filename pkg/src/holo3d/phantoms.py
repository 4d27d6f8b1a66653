"""Deterministic test objects: quadrant reflectors and block-letter phases."""

import enum
from dataclasses import dataclass

import numpy as np

from .core import Grid2D, OpticalSetup, Volume
from .errors import ParameterError


class PhantomKind(enum.Enum):
    AMPLITUDE_REFLECTORS = "amplitude_reflectors"
    TEXT_PHASE = "text_phase"


AMPLITUDE_PLANES = (3, 11, 20, 28)
TEXT_PLANES = (1, 10, 20, 30)
TEXT_PHASES = (2.0 * np.pi / 3.0, np.pi / 4.0, np.pi / 3.0, np.pi / 2.0)


@dataclass(frozen=True)
class PhantomSpec:
    kind: PhantomKind
    nx: int = 128
    ny: int = 128
    mz: int = 30
    planes: tuple = None  # 1-based occupied plane indices
    glyph_size: int = 32  # letter height in pixels (TEXT_PHASE only)

    def __post_init__(self):
        if self.planes is None:
            default = (
                AMPLITUDE_PLANES
                if self.kind is PhantomKind.AMPLITUDE_REFLECTORS
                else TEXT_PLANES
            )
            object.__setattr__(self, "planes", default)
        else:
            object.__setattr__(self, "planes", tuple(int(p) for p in self.planes))
        if len(self.planes) != 4:
            raise ParameterError("phantoms use exactly four occupied planes")
        if any(not 1 <= p <= self.mz for p in self.planes):
            raise ParameterError(f"occupied planes {self.planes} outside 1..{self.mz}")


def make_setup_paper(nx=128, ny=128, pitch=5.0, mz=30, dz=25.0,
                     wavelength=0.5, detector_distance=1060.0, z_start=0.0):
    """Geometry of the simulation study: 128x128x30 voxels over
    640um x 640um x 750um, 0.5um illumination, detector 1060um past the
    last plane.  Plane c sits at z_start + (c-1)*dz."""
    grid = Grid2D(nx, ny, pitch)
    zplanes = tuple(z_start + c * dz for c in range(mz))
    return OpticalSetup(
        wavelength=wavelength,
        grid=grid,
        zplanes=zplanes,
        z_detector=zplanes[-1] + detector_distance,
    )


def _setup_for(spec, setup):
    if setup is None:
        return make_setup_paper(nx=spec.nx, ny=spec.ny, mz=spec.mz)
    if (setup.grid.nx, setup.grid.ny, setup.num_planes) != (spec.nx, spec.ny, spec.mz):
        raise ParameterError("phantom dims do not match the optical setup")
    return setup


def amplitude_phantom(spec, setup=None):
    """Four 2x2 unit-amplitude reflector blocks, one per occupied plane,
    centered on the four grid quadrants."""
    if spec.kind is not PhantomKind.AMPLITUDE_REFLECTORS:
        raise ParameterError("spec.kind must be AMPLITUDE_REFLECTORS")
    if spec.nx < 8 or spec.ny < 8:
        raise ParameterError("grid too small to place 2x2 quadrant blocks")
    setup = _setup_for(spec, setup)
    vals = np.zeros((spec.nx, spec.ny, spec.mz), dtype=np.complex128)
    qx = (spec.nx // 4, 3 * spec.nx // 4)
    qy = (spec.ny // 4, 3 * spec.ny // 4)
    centers = [(qx[0], qy[0]), (qx[1], qy[0]), (qx[0], qy[1]), (qx[1], qy[1])]
    for (cx, cy), plane in zip(centers, spec.planes):
        vals[cx - 1 : cx + 1, cy - 1 : cy + 1, plane - 1] = 1.0
    return Volume(setup.grid, setup.zplanes, vals)


# 5x7 block capitals, rows top to bottom
_GLYPHS = {
    "A": (
        "01110",
        "10001",
        "10001",
        "11111",
        "10001",
        "10001",
        "10001",
    ),
    "B": (
        "11110",
        "10001",
        "10001",
        "11110",
        "10001",
        "10001",
        "11110",
    ),
    "C": (
        "01111",
        "10000",
        "10000",
        "10000",
        "10000",
        "10000",
        "01111",
    ),
    "D": (
        "11110",
        "10001",
        "10001",
        "10001",
        "10001",
        "10001",
        "11110",
    ),
}


def glyph_mask(letter, height):
    """Nearest-neighbor upscale of the embedded 5x7 bitmap to the given
    height; returns a boolean (width, height) array in (x, y) order."""
    rows = _GLYPHS[letter]
    src = np.array([[c == "1" for c in row] for row in rows])  # (7 rows, 5 cols)
    width = max(1, height * 5 // 7)
    ri = np.arange(height) * src.shape[0] // height
    ci = np.arange(width) * src.shape[1] // width
    scaled = src[np.ix_(ri, ci)]  # (height, width), row 0 = top
    # x axis = columns (left to right), y axis = rows (bottom to top)
    return scaled[::-1, :].T


def text_phase_phantom(spec, setup=None):
    """Letters A, B, C, D, unit amplitude with fixed per-letter phases,
    one letter per occupied plane at the four grid quadrant centers.

    Quadrant placement keeps the letters transversally disjoint, so their
    defocused replay fields add incoherently like the point reflectors do.
    """
    if spec.kind is not PhantomKind.TEXT_PHASE:
        raise ParameterError("spec.kind must be TEXT_PHASE")
    setup = _setup_for(spec, setup)
    vals = np.zeros((spec.nx, spec.ny, spec.mz), dtype=np.complex128)
    qx = (spec.nx // 4, 3 * spec.nx // 4)
    qy = (spec.ny // 4, 3 * spec.ny // 4)
    centers = [(qx[0], qy[0]), (qx[1], qy[0]), (qx[0], qy[1]), (qx[1], qy[1])]
    for letter, plane, phase, (cx, cy) in zip("ABCD", spec.planes, TEXT_PHASES, centers):
        mask = glyph_mask(letter, spec.glyph_size)
        w, h = mask.shape
        x0 = cx - w // 2
        y0 = cy - h // 2
        if x0 < 0 or y0 < 0 or x0 + w > spec.nx or y0 + h > spec.ny:
            raise ParameterError(f"glyph {letter} ({w}x{h}) does not fit its quadrant")
        plane_view = vals[x0 : x0 + w, y0 : y0 + h, plane - 1]
        plane_view[mask] = np.exp(1j * phase)
    return Volume(setup.grid, setup.zplanes, vals)


def make_phantom(spec, setup=None):
    """Build the phantom volume for a spec (on a paper-geometry setup by
    default)."""
    if spec.kind is PhantomKind.AMPLITUDE_REFLECTORS:
        return amplitude_phantom(spec, setup)
    return text_phase_phantom(spec, setup)
