"""3D object reconstruction from a single 2D complex hologram-plane field.

Forward hologram formation, its Hermitian-adjoint replay, and FISTA-based
regularized inversion with l1/positivity or slice-wise TV priors.
"""

from .core import (
    ComplexField,
    Grid2D,
    OpticalSetup,
    Volume,
    frobenius_norm,
    inner_product_2d,
    inner_product_3d,
)
from .errors import (
    DimensionMismatchError,
    DivergenceError,
    Holo3DError,
    ParameterError,
    UndefinedMetricError,
)
from .metrics import data_domain_error, object_domain_error
from .phantoms import (
    PhantomKind,
    PhantomSpec,
    amplitude_phantom,
    make_phantom,
    make_setup_paper,
    text_phase_phantom,
)
from .propagation import (
    PropagatorPlan,
    adjoint,
    angular_spectrum_transfer,
    backproject,
    forward,
    fresnel_transfer,
    propagate,
)
from .regularizers import (
    Regularizer,
    RegKind,
    l1_norm,
    prox_l1_positive,
    prox_tv,
    tv_slice,
    tv_volume,
)
from .solver import RunReport, SolverConfig, cost, fista, grad_data_term, spectral_norm

__version__ = "0.1.0"
