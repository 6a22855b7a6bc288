"""Finite flows: cell-complex presentations, colimits, tensors and PV analysis."""

from .cellspace import CellSpace, box_product, disjoint_union, pi0, sphere_disk
from .colim import FlowDiagram, canonical_diagram, colimit, pushout_glob_explicit
from .enumerated import (
    EnumeratedFlow,
    FlowMorphism,
    Pi0Flow,
    branching_space,
    from_presentation,
    hom_enumerate,
    iso_pi0,
    merging_space,
    pi0_flow,
    product,
    terminal_flow,
)
from .errors import FlowError
from .precubical import PrecubicalSet, realize_flow, validate_cubical
from .presentation import (
    FlowPresentation,
    add_state,
    attach_glob,
    concat_globs,
    directed_segment,
    enumerate_path_space,
    glob,
    merge_states,
    new_presentation,
    validate,
)
from .pv import AnalysisReport, PvProgram, analyze, parse_pv, swiss_flag, to_precubical
from .tensor import (
    DiscreteSpace,
    adjunction_check,
    cotensor,
    s_homotopic_pi0,
    square_flow,
    synchronized,
    tensor,
    weak_equiv_pi0,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CellSpace",
    "DiscreteSpace",
    "EnumeratedFlow",
    "FlowDiagram",
    "FlowError",
    "FlowMorphism",
    "FlowPresentation",
    "Pi0Flow",
    "PrecubicalSet",
    "PvProgram",
    "add_state",
    "adjunction_check",
    "analyze",
    "attach_glob",
    "box_product",
    "branching_space",
    "canonical_diagram",
    "colimit",
    "concat_globs",
    "cotensor",
    "directed_segment",
    "disjoint_union",
    "enumerate_path_space",
    "from_presentation",
    "glob",
    "hom_enumerate",
    "iso_pi0",
    "merge_states",
    "merging_space",
    "new_presentation",
    "parse_pv",
    "pi0",
    "pi0_flow",
    "product",
    "pushout_glob_explicit",
    "realize_flow",
    "s_homotopic_pi0",
    "sphere_disk",
    "square_flow",
    "swiss_flag",
    "synchronized",
    "tensor",
    "terminal_flow",
    "to_precubical",
    "validate",
    "validate_cubical",
    "weak_equiv_pi0",
]
