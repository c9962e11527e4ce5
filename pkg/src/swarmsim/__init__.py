"""Reflected second-order swarming simulator with common environmental
noise, plus a statistical validation suite for its mean-field behaviour."""

from .errors import (ConfigError, LayerExceedsBand, MaxReflectionsExceeded,
                     MissingCommonPath, MissingIdiosyncraticPaths,
                     MissingSnapshots, QueryOutsideBand, RootNotBracketed,
                     StepTooCoarse, SwarmsimError, UnsatisfiableSupport)
from .geometry import Annulus, Ball, Custom, Domain, SurfaceHit, reflect
from .kernels import (CuckerSmale, KernelSpec, MorseGradient, Zero, evaluate,
                      kernel_from_dict, mean_field_drift, mean_field_drift_all,
                      sup_norm)
from .measure import (BLDictionary, EmpiricalSnapshot, PhaseGrid, bl_distance,
                      integrate, phase_histogram)
from .noise import NoiseConfig, NoiseStreams, fork_idiosyncratic, mix_seed
from .simulator import (FixedPoints, FixedVectors, InitialLaw,
                        IsotropicGaussian, ReflectionEvent, SimConfig,
                        SystemState, Trajectory, UniformBall,
                        advance_with_reflections, gronwall_bound,
                        increment_diagnostic, moment_monitor, sample_initial,
                        simulate, step, typical_velocity_scale)
from .testfns import TestFunction, default_family
from .validator import (BoundaryReport, CouplingReport, ResidualReport,
                        ScalingReport, coupling_experiment, event_jump_sum,
                        layer_flux, martingale_form, residual_report,
                        scaling_experiment, specular_symmetry_check,
                        trace_identity_check, weak_residual)

__version__ = "0.1.0"
