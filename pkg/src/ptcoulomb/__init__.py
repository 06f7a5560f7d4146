"""Sturmian eigencharges of the screened PT-symmetric Coulomb problem.

The quasi-exact sector of ``-psi'' + (x^2 + 2iax + if/(x - ic)) psi = E psi``
reduces to a four-band matrix Q(f) whose eigenvalues are the allowed charges.
"""

from .core import (DomainError, ModelParams, QuadridiagonalMatrix, RecurrenceCoefficients, build_Q,
                   energy, recurrence_coefficients)
from .perturb import (PerturbationSeries, build_rescaled, projectors, rs_corrections,
                      unperturbed_spectrum)
from .polynomial import GaussianRational, Polynomial
from .secular import char_poly_f, reduced_secular, table1_check
from .spectra import (EigenchargeSet, asymptotic_charges, critical_d, eigencharges, refine_charges,
                      secular_roots)
from .sturmian import (SturmianSolution, left_coefficients, ode_residual, right_coefficients, sturmian,
                       wavefunction_eval)
from .verify import (lie_decompose, ode_shoot, recurrence_operator, shift_invariance_check,
                     sl2_commutator_check)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "ModelParams", "QuadridiagonalMatrix", "RecurrenceCoefficients", "build_Q", "energy",
    "recurrence_coefficients", "PerturbationSeries", "build_rescaled", "projectors", "rs_corrections",
    "unperturbed_spectrum", "GaussianRational", "Polynomial", "char_poly_f", "reduced_secular",
    "table1_check", "EigenchargeSet", "asymptotic_charges", "critical_d", "eigencharges",
    "refine_charges", "secular_roots", "SturmianSolution", "left_coefficients", "ode_residual",
    "right_coefficients", "sturmian", "wavefunction_eval", "lie_decompose", "ode_shoot",
    "recurrence_operator", "shift_invariance_check", "sl2_commutator_check",
]
