"""modlab: a pseudo-spectral laboratory for wave-packet modulation.

The package implements, at desk scale, a full modulation pipeline on the 2D
torus: a split-step solver for the envelope Schrodinger equations, the
multiscale wave-packet construction with higher-order correctors and its
equation residual, and a penalized second-order (progenitor) wave equation
whose band-limited solutions shadow the packet, together with the harness
that measures every scaling law the construction predicts.
"""

__version__ = "0.1.0"

from .errors import (BlowupPenalty, DegenerateFit, DepthUnsupported,
                     DomainError, GridMismatch, GridTooSmall, HorizonExceeded,
                     ModlabError, NoConvergence, NonAdmissibleCarrier,
                     NonFinite, ParseError, PenaltyScaleInvalid,
                     ValidationError)
from .grid import TorusGrid, make_grid
from .field import (Field2D, carrier_wave, field_from_physical,
                    field_from_spectral, inner_product, modulate, norm,
                    norm_hs, norm_hseps, norm_l1hat, norm_l2, norm_linf,
                    pointwise_power, resample, to_physical, to_spectral)
from .multiplier import (MultiplierSpec, apply_multiplier, apply_semigroup,
                         bessel_power, mode_filter, rescaled_bessel,
                         rescaled_solid, semi_cos, semi_dsin, semi_sinc,
                         solid_power, symbol)
from .profiles import algebraic_tail, gaussian, make_profile, ring
from .nls import (NLSParams, NLSState, NLSTrajectory, SampleSpec,
                  critical_index, growth_functional, mass, rescale_u_to_A,
                  run_nls, strang_step)
from .packet import (CorrectorSet, PacketEvaluation, PacketParams, assemble,
                     build_correctors, dispersion, dump_correctors,
                     group_velocity, load_correctors, residual)
from .progenitor import (LedgerRow, PenaltyLedger, ProgenitorParams,
                         ProgenitorState, calibrate_omega, compat_w0, g_eval,
                         g_prime, g_star, hamiltonian, initial_state,
                         lambda_of, lambda_ode_terms, lambda_star_of,
                         linear_propagate, penalty_N, product_alias_safe,
                         run_window, subinterval_solve)
from .fits import FitResult, fit_loglog_order
from .io import config_hash, emit_csv, emit_manifest, read_csv
from .config import RunConfig, load_config, parse_config, serialize_config
from .harness import (SweepConfig, envelope_speed_check,
                      jump_refinement_study, modulation_identity_check,
                      norm_growth_experiment, prepare_run, remainder_sweep,
                      residual_order_study)
