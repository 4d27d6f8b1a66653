"""Grids, complex fields, voxel volumes, and their inner products.

Array conventions: axis 0 is x, axis 1 is y; volumes carry the plane index
on axis 2.  All lengths are in micrometers.  Inner products and norms use
unit sample weights, so the discrete adjoint relation between the forward
and replay operators holds exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ParameterError


@dataclass(frozen=True)
class Grid2D:
    """Uniform transverse sampling grid (same pitch in x and y)."""

    nx: int
    ny: int
    pitch: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ParameterError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if not self.pitch > 0:
            raise ParameterError(f"pitch must be positive, got {self.pitch}")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def extent(self):
        """Physical size (x, y) in micrometers."""
        return (self.nx * self.pitch, self.ny * self.pitch)


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ComplexField:
    """2D complex field sampled on a Grid2D (detector data or one slice)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = _freeze(self.values)
        if v.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"values shape {v.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ParameterError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))


@dataclass(frozen=True)
class Volume:
    """3D complex voxel array: shared transverse grid, explicit z planes."""

    grid: Grid2D
    zplanes: tuple
    values: np.ndarray

    def __post_init__(self):
        zp = tuple(float(z) for z in self.zplanes)
        if len(zp) < 1:
            raise ParameterError("volume needs at least one z plane")
        if any(b <= a for a, b in zip(zp, zp[1:])):
            raise ParameterError(f"zplanes must be strictly increasing, got {zp}")
        v = _freeze(self.values)
        if v.shape != (self.grid.nx, self.grid.ny, len(zp)):
            raise DimensionMismatchError(
                f"values shape {v.shape} does not match "
                f"{(self.grid.nx, self.grid.ny, len(zp))}"
            )
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ParameterError("volume contains non-finite values")
        object.__setattr__(self, "zplanes", zp)
        object.__setattr__(self, "values", v)

    @property
    def num_planes(self):
        return len(self.zplanes)

    @classmethod
    def zeros(cls, grid, zplanes):
        return cls(grid, zplanes, np.zeros((grid.nx, grid.ny, len(zplanes)), dtype=np.complex128))

    def slice_field(self, plane):
        """Extract one plane as a ComplexField (1-based plane index)."""
        if not 1 <= plane <= self.num_planes:
            raise ParameterError(f"plane {plane} out of range 1..{self.num_planes}")
        return ComplexField(self.grid, self.values[:, :, plane - 1])


@dataclass(frozen=True)
class OpticalSetup:
    """Wavelength, transverse grid, object plane positions, detector position."""

    wavelength: float
    grid: Grid2D
    zplanes: tuple
    z_detector: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ParameterError(f"wavelength must be positive, got {self.wavelength}")
        zp = tuple(float(z) for z in self.zplanes)
        if any(b <= a for a, b in zip(zp, zp[1:])):
            raise ParameterError("zplanes must be strictly increasing")
        if not self.z_detector > zp[-1]:
            raise ParameterError(
                f"detector at z={self.z_detector} must lie beyond the last plane z={zp[-1]}"
            )
        object.__setattr__(self, "zplanes", zp)

    @property
    def k(self):
        """Wavenumber 2*pi/wavelength."""
        return 2.0 * np.pi / self.wavelength

    @property
    def z_reference(self):
        """Reference plane for the illumination phase (last object plane)."""
        return self.zplanes[-1]

    @property
    def num_planes(self):
        return len(self.zplanes)


def inner_product_2d(a, b):
    """Conjugate-linear-in-first inner product sum(conj(a)*b) over samples."""
    if a.grid != b.grid:
        raise DimensionMismatchError("fields live on different grids")
    return complex(np.vdot(a.values, b.values))


def inner_product_3d(a, b):
    """sum(conj(a)*b) over all voxels."""
    if a.grid != b.grid or a.zplanes != b.zplanes:
        raise DimensionMismatchError("volumes have different grids or plane stacks")
    return complex(np.vdot(a.values, b.values))


def frobenius_norm(x):
    """sqrt of the sum of squared moduli; accepts ComplexField or Volume."""
    return float(np.linalg.norm(np.ravel(x.values)))
