"""Finite-field Fourier analysis on the plane: extension estimates for curves and distance sets."""

from .errors import FFExtError
from .finite_field import (FieldElement, FieldSpec, construct_field, field_of_order, gauss_sum,
                           gauss_sum_closed_form, odd_prime_powers)
from .plane_fourier import (PlaneFunction, convolve, dual_ft, forward_ft, indicator, inverse_ft,
                            norm_lp)
from .curves import (BivariatePoly, Variety, contains_line, intersect_count, parse_poly,
                     variety_of)
from .extension_lab import (SurfaceMeasure, estimate_rstar, extend, extension_report,
                            necessary_conditions, rstar_ratio, surface_measure)
from .distance_lab import (LevelSetFamily, PointSetPair, circle_family, counting_function,
                           distance_set, falconer_experiment)

__version__ = "0.1.0"
