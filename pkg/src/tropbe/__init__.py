"""Backward error measures (NBE, EBE, TBE, EMBE bound) for polynomial roots."""

from .backward_error import (
    ErrorReport,
    analyze,
    ebe,
    embe_upper_bound,
    general_witness,
    nbe,
    perturbation_estimate,
    quadratic_witness,
    reconstruct,
    tbe,
)
from .errors import ConvergenceError, DomainError, ParseError, SingularDerivativeError, WitnessError
from .poly import Polynomial, Precision, ScaledReal, derivative, elem_sym_abs, eval_poly, from_roots
from .rootfind import AberthConfig, aberth, initial_guesses
from .rootset import Provenance, RootSet
from .tropical import TropicalData, assumption_w, r_constants, tropical_roots, upper_hull, valuations
from .xprec import U, NewtonConfig, NewtonStatus, XComplex, XReal, newton_refine

__version__ = "0.1.0"
