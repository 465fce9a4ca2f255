"""Hecke reciprocity, unramified 2-Selmer groups and 2-class group statistics of cubic fields.

Layers, from the bottom up:

- ``arith``, ``polyfp``, ``linalg``: integers, polynomials over F_p, exact matrices
- ``local_kummer``: local Hecke classification and refinement obstructions for x^m - n
- ``orders``: maximal orders, ideals, prime splitting, different and Hecke ideal
- ``classgroup``: class groups and units from factor-base relations
- ``selmer``: Sel_2^un, the reciprocity audit, the quadratic refinement, dimension formulas
- ``binary_cubic``: pairs of binary cubic forms and their invariants
- ``heuristics``: random-matrix model, predicted moments and constants
- ``survey``, ``cli``: family surveys and the command line
"""

__version__ = "0.1.0"

from .classgroup import class_group
from .orders import hecke_primes, maximal_order, resolvent_field
from .selmer import (
    dim_formula_check,
    global_refinement_q,
    reciprocity_audit,
    sel2_unramified,
)

__all__ = [
    "__version__",
    "class_group",
    "dim_formula_check",
    "global_refinement_q",
    "hecke_primes",
    "maximal_order",
    "reciprocity_audit",
    "resolvent_field",
    "sel2_unramified",
]
