"""Hazard slope functions, extreme dispersion models and their limit laws."""
from .errors import NumericalError, ValidationError, XDError
from .survival import (Interval, MonotoneClass, SurvivalModel, HazardLocationFamily, min_of,
                       rate_and_slope, sample, scale_model, semiinvariants, slope_via_varform,
                       translate, exponential_model)
from .slope import (SignClass, SlopeDiagnosis, SlopeFunction, Verdict, hazard_interval_integral,
                    reconstruct_from_slope, slope_function_of, validate_slope)
from .transforms import (add_exponential_component, censor_right, hl_member,
                         location_scale_slope, reflect_horizontal, reflect_vertical,
                         shift_transform, truncate_left)
from .xd import (FrailtyLink, XDModel, conditional_tail, frailty_generator, frailty_xd,
                 rayleigh_limit_curve, scaled_min, xd_make)
from .catalog import FamilySpec, family_names, get_family, make_gev, gev_generator, gev_slope
from .convergence import (ConvergenceReport, exp_slope_convergence_experiment,
                          exponential_slope_limit, gev_convergence_experiment,
                          power_to_exponential_slope, tightness_integral)

__version__ = "0.1.0"
