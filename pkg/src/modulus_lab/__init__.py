"""Fuglede p-modulus of finite measure systems, extremal metrics and
Beurling-type extremality certificates."""

from .core import (CellSpace, Measure, MeasureSystem, Metric, integrate, is_admissible,
                   p_energy, validate_system)
from .errors import (ContractError, DimensionError, InstanceTooLargeError, ModulusError,
                     SchemaError, UnsupportedInstanceError)
from .solver import (SolveOptions, SolveReport, brute_force_modulus, eval_atomic_modulus_sub1,
                     solve, solve_modulus, solve_modulus_l1, uniqueness_check)
from .certificate import (BeurlingCertificate, FamilyMember, VerificationReport, build_certificate,
                          check_condition_a, cone_membership, fit_certificate, verify_certificate)
from .geometry import (Curve, Grid, Polyline, TransboundaryDomain, gamma_phi_system,
                       rasterize_polyline, rectangle_family, transboundary_measure,
                       truncate_to_unit, unit_mass_intervals)
from .oracles import block_modulus, rectangle_modulus_exact, run_example_suite

__version__ = "0.1.0"
