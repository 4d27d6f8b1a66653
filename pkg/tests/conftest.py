import numpy as np
import pytest

import holo3d as h


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_setup(nx=16, ny=16, mz=4, pitch=5.0, wavelength=0.5,
                dz=25.0, detector_distance=500.0):
    return h.make_setup_paper(nx=nx, ny=ny, pitch=pitch, mz=mz, dz=dz,
                              wavelength=wavelength,
                              detector_distance=detector_distance)


def random_volume(setup, rng):
    shape = (setup.grid.nx, setup.grid.ny, setup.num_planes)
    return h.Volume(setup.grid, setup.zplanes,
                    rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_field(setup, rng):
    shape = setup.grid.shape
    return h.ComplexField(setup.grid,
                          rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
