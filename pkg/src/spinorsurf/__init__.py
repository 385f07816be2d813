"""Spinor representation of conformal surfaces in the Lie groups Nil, SL2 and Sol."""
from .errors import *  # noqa: F401,F403
from .lie import (  # noqa: F401
    NIL,
    SL2,
    SOL,
    ConnectionTable,
    CurvatureTensor,
    GroupElement,
    GroupName,
    LieGroup3,
    connection_from_structure,
    curvature_tensor,
    get_group,
    group_exp,
    group_inv,
    group_mul,
    sectional_curvature,
    tangent_plane_curvature,
)
from .grid import Grid, convergence_order, d_z, d_zbar, integrate_2form  # noqa: F401
from .spinor import (  # noqa: F401
    ImmersionField,
    PotentialField,
    SpinorField,
    ZField,
    Z_from_spinor,
    dirac_residual,
    identity_residual,
    maurer_cartan,
    minimal_equation_residual,
    potentials,
    spinor_from_Z,
)
from .geometry import GeometryReport, hopf_differential, mean_curvature  # noqa: F401
from .catalog import catalog_names, catalog_surface, default_grid, get_entry  # noqa: F401
from .reconstruct import integrate_frame, round_trip_error  # noqa: F401
from .analysis import VerifySuiteConfig, analyze, verify  # noqa: F401

__version__ = "0.1.0"
