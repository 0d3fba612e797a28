"""Coarse sheaf cohomology of model metric spaces at desk scale.

Windowed models of proper metric spaces, a symbolic subset algebra with
boundedness certificates, coarse-cover and cocontrolled-tuple oracles,
blocky cochains, closeness and Cech complexes, and exact linear algebra
over finite abelian coefficient groups.
"""

from .groups import FinAbGroup, invariant_factors
from .cohomology import (
    CohomologyResult,
    brute_force_cohomology,
    cohomology_with_coefficients,
)
from .snf import smith_normal_form

__version__ = "0.1.0"
