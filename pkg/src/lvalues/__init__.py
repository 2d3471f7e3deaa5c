"""Exact L-values of Drinfeld modules over k[t] and its finite extensions."""

from .basering import BaseRing, MaxIdeal, max_ideals_up_to, residue_field, ring_make
from .drinfeld import (DrinfeldModule, TwistedPoly, euler_factor, euler_product, exp_eval,
                       exp_series, log_eval, log_series, phi_t)
from .errors import LValueError
from .exactalg import Poly, field_make
from .lattice import Lattice, class_module, lattice_index, unit_lattice, verify_main_theorem
from .nuclear import OperatorSeries, det_compact, det_finite, lvalue_trace, theta_from_drinfeld
from .series import LaurentSeries, TruncSeries

__all__ = [
    "BaseRing", "MaxIdeal", "max_ideals_up_to", "residue_field", "ring_make",
    "DrinfeldModule", "TwistedPoly", "euler_factor", "euler_product", "exp_eval", "exp_series",
    "log_eval", "log_series", "phi_t", "LValueError", "Poly", "field_make", "Lattice",
    "class_module", "lattice_index", "unit_lattice", "verify_main_theorem", "OperatorSeries",
    "det_compact", "det_finite", "lvalue_trace", "theta_from_drinfeld", "LaurentSeries",
    "TruncSeries",
]
