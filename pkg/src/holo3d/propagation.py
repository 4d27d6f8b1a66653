"""Hologram formation operator and its Hermitian adjoint (replay).

Each object slice is propagated to the detector with a pure-phase Fresnel
transfer function applied in the spatial-frequency domain, which makes the
single-slice propagator exactly unitary and the discrete adjoint exact.
An angular-spectrum transfer function is available as a wide-angle variant.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .core import ComplexField, Grid2D, Volume
from .errors import DimensionMismatchError, ParameterError

FRESNEL = "fresnel"
ANGULAR_SPECTRUM = "angular_spectrum"


def fresnel_transfer(grid, wavelength, z):
    """Fresnel transfer function exp(ikz)*exp(-i*pi*lambda*z*(fx^2+fy^2)).

    Sampled at the DFT frequencies f = m/(n*pitch).  Pure phase for any z;
    conj(T(z)) == T(-z) exactly.
    """
    k = 2.0 * np.pi / wavelength
    fx = sfft.fftfreq(grid.nx, d=grid.pitch)
    fy = sfft.fftfreq(grid.ny, d=grid.pitch)
    f2 = fx[:, None] ** 2 + fy[None, :] ** 2
    return np.exp(1j * k * z) * np.exp(-1j * np.pi * wavelength * z * f2)


def angular_spectrum_transfer(grid, wavelength, z):
    """Wide-angle transfer function exp(i*z*sqrt(k^2 - 4*pi^2*f^2)).

    Evanescent components (k^2 < 4*pi^2*f^2) are set to zero.
    """
    k = 2.0 * np.pi / wavelength
    fx = sfft.fftfreq(grid.nx, d=grid.pitch)
    fy = sfft.fftfreq(grid.ny, d=grid.pitch)
    f2 = fx[:, None] ** 2 + fy[None, :] ** 2
    kz2 = k * k - 4.0 * np.pi ** 2 * f2
    prop = kz2 > 0
    out = np.zeros(grid.shape, dtype=np.complex128)
    out[prop] = np.exp(1j * z * np.sqrt(kz2[prop]))
    return out


_TRANSFERS = {FRESNEL: fresnel_transfer, ANGULAR_SPECTRUM: angular_spectrum_transfer}


@dataclass(frozen=True)
class PropagatorPlan:
    """Precomputed per-plane transfer functions and illumination phases.

    padding >= 2 zero-pads each slice before the FFT and crops afterwards;
    the adjoint uses the transposed pad/crop pair so the adjoint identity
    holds to machine precision for any padding factor.
    """

    setup: object
    padding: int = 1
    kernel: str = FRESNEL

    def __post_init__(self):
        if self.padding < 1:
            raise ParameterError(f"padding factor must be >= 1, got {self.padding}")
        if self.kernel not in _TRANSFERS:
            raise ParameterError(f"unknown propagation kernel {self.kernel!r}")
        s = self.setup
        work = Grid2D(s.grid.nx * self.padding, s.grid.ny * self.padding, s.grid.pitch)
        make = _TRANSFERS[self.kernel]
        transfers = np.stack(
            [make(work, s.wavelength, s.z_detector - zc) for zc in s.zplanes]
        )
        phases = np.exp(1j * s.k * (np.asarray(s.zplanes) - s.z_reference))
        transfers.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "work_grid", work)
        object.__setattr__(self, "transfers", transfers)
        object.__setattr__(self, "phases", phases)

    @property
    def num_planes(self):
        return self.setup.num_planes


def _pad(a, work_shape):
    if a.shape[-2:] == work_shape:
        return a
    out = np.zeros(a.shape[:-2] + work_shape, dtype=np.complex128)
    out[..., : a.shape[-2], : a.shape[-1]] = a
    return out


def _propagate_arr(values, grid, wavelength, z, padding=1, kernel=FRESNEL):
    work = Grid2D(grid.nx * padding, grid.ny * padding, grid.pitch)
    t = _TRANSFERS[kernel](work, wavelength, z)
    spec = sfft.fft2(_pad(values, work.shape))
    out = sfft.ifft2(t * spec)
    return out[: grid.nx, : grid.ny]


def propagate(field, z, setup, padding=1, kernel=FRESNEL):
    """Propagate a 2D field by distance z (negative z back-propagates).

    Unitary (norm preserving) when padding == 1.
    """
    if field.grid != setup.grid:
        raise DimensionMismatchError("field grid does not match setup grid")
    out = _propagate_arr(field.values, setup.grid, setup.wavelength, z, padding, kernel)
    return ComplexField(setup.grid, out)


def _forward_arr(uvals, plan):
    """uvals: (nx, ny, mz) complex -> (nx, ny) detector field."""
    grid = plan.setup.grid
    slices = np.moveaxis(uvals, 2, 0)
    spec = sfft.fft2(_pad(slices, plan.work_grid.shape), axes=(-2, -1))
    acc = np.einsum("c,cij,cij->ij", plan.phases, plan.transfers, spec, optimize=True)
    return sfft.ifft2(acc)[: grid.nx, : grid.ny]


def _adjoint_arr(vvals, plan):
    """vvals: (nx, ny) detector field -> (nx, ny, mz) volume."""
    grid = plan.setup.grid
    spec = sfft.fft2(_pad(vvals, plan.work_grid.shape))
    slices = sfft.ifft2(np.conj(plan.transfers) * spec[None, :, :], axes=(-2, -1))
    slices = slices[:, : grid.nx, : grid.ny] * np.conj(plan.phases)[:, None, None]
    return np.moveaxis(slices, 0, 2)


def forward(volume, plan):
    """Hologram formation: propagate every slice to the detector and sum."""
    s = plan.setup
    if volume.grid != s.grid or volume.zplanes != s.zplanes:
        raise DimensionMismatchError("volume does not match the plan geometry")
    return ComplexField(s.grid, _forward_arr(volume.values, plan))


def adjoint(field, plan):
    """Holographic replay: back-propagate the detector field to every plane.

    Exact Hermitian transpose of forward under the unit-weight inner products.
    """
    s = plan.setup
    if field.grid != s.grid:
        raise DimensionMismatchError("field does not match the plan geometry")
    return Volume(s.grid, s.zplanes, _adjoint_arr(field.values, plan))


def backproject(field, plan):
    """Alias of adjoint: the replay picture as a first-class operation."""
    return adjoint(field, plan)
