"""Certified divergence schedules for generalized Schrodinger evolutions.

Constructs counterexample-style schedules (lattice points approaching
every target tangentially, paired decreasing times, rapidly growing
frequency annuli), evaluates the resulting oscillatory annulus terms,
and certifies quarter-root-log blow-up of partial sums together with
geometric tail decay and critical Sobolev membership. Quantities beyond
binary64 range are handled in log (and log-log) form throughout.
"""

from .errors import (BudgetError, ConfigError, ConstructionError,
                     DivcertError, DomainError, InputError, InternalError,
                     RegimeError, SizeError, StationaryPhaseError,
                     ValidationError)
from .evaluator import (BlowupCertificate, PartialSum, blowup_certificate,
                        blowup_table, certificates_c0, continuity_tail_bound,
                        partial_sum, read_blowup_csv, write_blowup_csv,
                        write_certificates_json)
from .oscint import (Enclosure, OscillatoryTerm, PhaseData, compute_term,
                     diagonal_term_exact, phase_at, radial_integral_direct,
                     radial_integral_ibp, term_enclosure, term_enclosure_at,
                     trace_term)
from .schedule import (ApproachProfile, Schedule, TruncatedProfile,
                       build_annulus_schedule, build_spatial_schedule,
                       build_tangential_subsequence, build_theorem2_schedule,
                       identity_profile, load_schedule, power_profile,
                       profile_from_description, save_schedule,
                       scaled_profile, validate_schedule)
from .sobolev import (SobolevReport, hs_partial_norm, hs_tail_bound,
                      sobolev_report)
from .symbol import (ConditionReport, DispersionSymbol, angular_grid,
                     exponential, homogeneous, homogeneous_sum, r_log_r,
                     sphere_measure, symbol_from_description, user_symbol,
                     verify_growth_conditions)

__version__ = "1.0.0"

__all__ = [
    "ApproachProfile", "BlowupCertificate", "BudgetError", "ConditionReport",
    "ConfigError", "ConstructionError", "DispersionSymbol", "DivcertError",
    "DomainError", "Enclosure", "InputError", "InternalError",
    "OscillatoryTerm", "PartialSum", "PhaseData", "RegimeError", "Schedule",
    "SizeError", "SobolevReport", "StationaryPhaseError", "TruncatedProfile",
    "ValidationError", "angular_grid", "blowup_certificate", "blowup_table",
    "build_annulus_schedule", "build_spatial_schedule",
    "build_tangential_subsequence", "build_theorem2_schedule",
    "certificates_c0", "compute_term", "continuity_tail_bound",
    "diagonal_term_exact", "exponential", "homogeneous", "homogeneous_sum",
    "hs_partial_norm", "hs_tail_bound", "identity_profile", "load_schedule",
    "partial_sum", "phase_at", "power_profile", "profile_from_description",
    "r_log_r", "radial_integral_direct", "radial_integral_ibp",
    "read_blowup_csv", "save_schedule", "scaled_profile", "sobolev_report",
    "sphere_measure", "symbol_from_description", "term_enclosure",
    "term_enclosure_at", "trace_term", "user_symbol", "validate_schedule",
    "verify_growth_conditions", "write_blowup_csv",
    "write_certificates_json",
]
