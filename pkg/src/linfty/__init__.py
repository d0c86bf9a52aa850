"""Exact computations with (curved) L-infinity algebras, their morphisms,
Maurer-Cartan elements, homotopy transfer and L-infinity modules."""

from .scalars import Context, qq
from .graded import GradedSpace
from .elements import element, sym_vector
from .dgla import DGLAData, from_dgla
from .structures import (
    LInftyMorphism,
    LInftyStructure,
    Report,
    check_linfty,
    check_linfty_oracle,
    check_morphism,
    check_morphism_oracle,
    compose,
    identity_morphism,
    invert,
)
from .transfer import Contraction, minimal_model, transfer
from .mc import (
    check_mc,
    gauge_act,
    integrate_homotopy,
    mc_obstruction,
    reconstruct_gauge,
    twist_morphism,
    twist_structure,
)
from .homotopy import HomotopyWitness, phi_t, twisted_morphism_homotopy, verify_homotopy
from .modules import LInftyModule, ModuleMorphism, check_module, check_module_morphism
from .fileformat import Document, FormatError, Library

__version__ = "0.1.0"

__all__ = [
    "Context", "qq", "GradedSpace", "element", "sym_vector", "DGLAData", "from_dgla",
    "LInftyStructure", "LInftyMorphism", "Report", "check_linfty", "check_linfty_oracle",
    "check_morphism", "check_morphism_oracle", "compose", "identity_morphism", "invert",
    "Contraction", "transfer", "minimal_model", "check_mc", "gauge_act", "integrate_homotopy",
    "mc_obstruction", "reconstruct_gauge", "twist_structure", "twist_morphism",
    "HomotopyWitness", "verify_homotopy", "phi_t", "twisted_morphism_homotopy",
    "LInftyModule", "ModuleMorphism", "check_module", "check_module_morphism",
    "Document", "FormatError", "Library",
]
