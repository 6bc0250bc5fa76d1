"""Supersonic flow onto a wedge: oblique shocks, Glimm marching, self-similar
potential flow and time-dependent weak-shock selection.

>>> import math
>>> from wedgeflow import AIR, state_from_mach, critical_angles
>>> round(math.degrees(critical_angles(state_from_mach(2.0), AIR).theta_d), 2)
22.97
"""
from .errors import (AxiallySubsonic, BetaOutOfRange, CflViolation, DetachedError,
                     InsufficientData, NoIntersection, NonConvergence, NoRoot, NotSupersonic,
                     OutOfDomain, VacuumError, ValidationError, WedgeFlowError)
from .thermo import (AIR, EulerPrimitive, FlowRegime, GasModel, Regime, classify_regime,
                     mach_number, potential_c2, potential_h, potential_p, rho_from_head,
                     sound_speed, specific_entropy, state_from_mach, total_energy,
                     total_enthalpy)
from .polar import (CriticalAngles, Detached, ObliqueShock, PotentialState, WedgeSolutionPair,
                    critical_angles, downstream_from_beta, polar_curve,
                    potential_critical_angles, potential_downstream_from_beta,
                    potential_wedge_solutions, rh_residual, wedge_solutions)
from .steady_waves import (boundary_riemann, char_speeds, prandtl_meyer, steady_riemann,
                           wave_curve)
from .glimm import (CauchyData, MarchConfig, WedgeGeometry, asymptotics_estimate,
                    make_cauchy_data, march, straight_wedge)
from .selfsim import build_skeleton, phi_star_eval, solve_normal_shock, verify_skeleton
from .unsteady import Grid2D, fit_shock, init_uniform, run_to_steady, step

__version__ = "0.1.0"
