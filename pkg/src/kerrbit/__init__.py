"""kerrbit: bifurcation readout of a multi-level superconducting qubit through
a Kerr nonlinear resonator — dispersive analytics, exact-diagonalization
cross-checks, semiclassical bifurcation analysis, and full master-equation
simulation of sample-and-hold measurements."""

__version__ = "0.1.0"

from .dispersive import (DispersiveCoefficients, DriveContext, coefficients,
                         dispersive_validity, kerr_quadratic, lamb_shift_and_pull,
                         landau_zener, multilevel_pull, purcell_rates,
                         stark_linear, two_photon_coupling)
from .hilbert import (DensityMatrix, HilbertLayout, annihilation,
                      coherent_vector, expectation, phase_grid, q_function,
                      qubit_projector)
from .lindblad import (ConstantEnvelope, IntegratorOptions, SimulationConfig,
                       Trajectory, basis_density, build_hamiltonian, evolve,
                       steady_photon_number)
from .oracle import (DressedLadder, dressed_energies, extract_coefficients,
                     numeric_shifts)
from .readout import (PulseProgram, ReadoutOutcome, classification_radius,
                      classify, error_probability, measure, optimize,
                      switching_order)
from .semiclassical import (BifurcationThresholds, SteadyStateSolution,
                            response_curve, steady_amplitudes, thresholds)
from .transmon import (MHZ, QubitSpec, TransmonParams, explicit_spec,
                       explicit_spec_mhz, paper_transmon, transmon_spectrum,
                       tune_to_frequency)
