"""Decide whether two quadratic hypersurfaces intersect, with checkable certificates."""
from .certificates import CERT_SCHEMA, check_certificate, check_witness, validate_report
from .decision import (ToleranceConfig, Verdict, VerdictTag, decide, one_sided_branch, po4_value,
                       sign_programs)
from .oracle import OracleReport, descend_to_intersection, sample_min
from .quadform import Quadratic
from .separation import SeparationCertificate, mutual_separation
from .sprocedure import DependentHessiansError, Po4Certificate, assemble_M, gamma_max, po4_value_indep

__all__ = [
    "CERT_SCHEMA", "DependentHessiansError", "OracleReport", "Po4Certificate", "Quadratic",
    "SeparationCertificate", "ToleranceConfig", "Verdict", "VerdictTag", "assemble_M",
    "check_certificate", "check_witness", "decide", "descend_to_intersection", "gamma_max",
    "mutual_separation", "one_sided_branch", "po4_value", "po4_value_indep", "sample_min",
    "sign_programs", "validate_report",
]
__version__ = "0.1.0"
