"""Mixed-dimensional finite-volume benchmark suite for single-phase flow
and tracer transport in fractured porous media."""

from .bench import (CASES, RunSummary, build_case_grid, case_info,
                    case_parameters, regular_region_id, run_case)
from .flow_tpfa import (BoundaryConditionError, ConductivityField, FlowBC,
                        SingularSystemError, assemble_flow, solve_flow)
from .mdgrid import MixedDimGrid, SubdomainGrid, validate
from .mesh_io import (AxisRectangle, LatticeError, MeshFormatError,
                      NonConformingMeshError, TagError, build_mixed_grid,
                      cartesian_dfm_mesher, parse_msh, write_msh)
from .transport import NonConservativeFlowError, TracerBC, run_transport

__version__ = "0.1.0"

__all__ = [
    "AxisRectangle",
    "BoundaryConditionError",
    "CASES",
    "ConductivityField",
    "FlowBC",
    "LatticeError",
    "MeshFormatError",
    "MixedDimGrid",
    "NonConformingMeshError",
    "NonConservativeFlowError",
    "RunSummary",
    "SingularSystemError",
    "SubdomainGrid",
    "TagError",
    "TracerBC",
    "assemble_flow",
    "build_case_grid",
    "build_mixed_grid",
    "cartesian_dfm_mesher",
    "case_info",
    "case_parameters",
    "parse_msh",
    "regular_region_id",
    "run_case",
    "run_transport",
    "solve_flow",
    "validate",
    "write_msh",
]
