"""Inverse design of growth fields that turn a flat-cut cylindrical shell into a target surface."""

__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateSurface, DomainError, InputError, IntegrationDiverged, NoOracle,
                     NonBijective, NotCurvatureNet, NumericalError, OrientationError, ShellGrowthError,
                     ThicknessSingularity, UmbilicEncountered, UmbilicPoint, UnknownEntry)
from .surface import (CurvatureData, FundamentalForms, ParamSurface, SurfaceJet, curvature, fundamental_forms, jet,
                      principal_curvatures)
from .net import (ClosedFormNet, CurvatureNet, IdentityNet, NumericNet, build_net_closed_form, build_net_numeric,
                  intermediate_surface, principal_angles)
from .growth import GrowthDesign, GrowthFunctions, GrowthTensor, design, growth_general, growth_special
from .verify import StressFreeReport, reconstruct_kinematics, verify
from . import catalog

__all__ = [
    "ParamSurface", "SurfaceJet", "FundamentalForms", "CurvatureData", "jet", "fundamental_forms", "curvature",
    "principal_curvatures", "CurvatureNet", "IdentityNet", "ClosedFormNet", "NumericNet", "build_net_closed_form",
    "build_net_numeric", "intermediate_surface", "principal_angles", "GrowthDesign", "GrowthFunctions",
    "GrowthTensor", "design", "growth_general", "growth_special", "StressFreeReport", "reconstruct_kinematics",
    "verify", "catalog", "ShellGrowthError", "InputError", "NumericalError", "ConfigError", "UnknownEntry",
    "NoOracle", "DegenerateSurface", "UmbilicPoint", "UmbilicEncountered", "NotCurvatureNet", "OrientationError",
    "IntegrationDiverged", "NonBijective", "DomainError", "ThicknessSingularity",
]
