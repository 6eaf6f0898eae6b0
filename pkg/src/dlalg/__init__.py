"""Exact split-form double Lie algebroids, core diagrams and their equivalence."""
from __future__ import annotations

from .algebroid import (
    Algebroid,
    BundleMap,
    Chart,
    Connection,
    HomValuedForm,
    Section,
    curvature,
    koszul_d,
    validate_algebroid,
    validate_algebroid_morphism,
)
from .comma import build_comma, build_comma_morphism, check_pi_flat
from .diagram import (
    CoreDiagram,
    CrossedModule,
    DiagramMorphism,
    crossed_module_from_diagram,
    diagram_mismatch,
    validate_core_diagram,
    validate_crossed_module,
    validate_diagram_morphism,
)
from .equivalence import canonical_iso, functor_D, naturality_check, roundtrip, roundtrip_check
from .errors import InputError, RefusalError
from .exactpoly import Polynomial
from .matched import (
    DLAMorphism,
    SplitDLA,
    core_algebroid,
    extract_core_diagram,
    validate_dla_morphism,
    validate_matched_pair,
)
from .quotient import build_quotient, build_quotient_morphism, extend_connection, quotient_projection_check
from .rep2 import TwoRep, TwoRepMorphism, change_splitting, validate_two_rep, validate_two_rep_morphism
from .report import Check, Report
from .serialize import Document, parse_document, serialize_document

__version__ = "0.1.0"

__all__ = [
    "Algebroid", "BundleMap", "Chart", "Check", "Connection", "CoreDiagram", "CrossedModule", "DLAMorphism",
    "DiagramMorphism", "Document", "HomValuedForm", "InputError", "Polynomial", "RefusalError", "Report",
    "Section", "SplitDLA", "TwoRep", "TwoRepMorphism", "build_comma", "build_comma_morphism", "build_quotient",
    "build_quotient_morphism", "canonical_iso", "change_splitting", "check_pi_flat", "core_algebroid",
    "crossed_module_from_diagram", "curvature", "diagram_mismatch", "extend_connection", "extract_core_diagram",
    "functor_D", "koszul_d", "naturality_check", "parse_document", "quotient_projection_check", "roundtrip",
    "roundtrip_check", "serialize_document", "validate_algebroid", "validate_algebroid_morphism",
    "validate_core_diagram", "validate_crossed_module", "validate_diagram_morphism", "validate_dla_morphism",
    "validate_matched_pair", "validate_two_rep", "validate_two_rep_morphism",
]
