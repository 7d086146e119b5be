"""phaselab: phase-space dynamics on Wigner-compatible grids.

Distributions on (q, p), their generating wave fields, and matched
classical/quantum/thermal propagators, plus the resonance mass-width
line fit and scenario tooling.
"""

from .core import (ActionWaveState, DensityMatrixField,
                   GaussianCoherentParams, Grid1D, GridError,
                   MomentumFourierField, PhaseField, PotentialSpec,
                   ThermalParams, Units, ValidationError, WaveField,
                   construct_grid, evaluate_potential, potential_derivative)
from .transforms import (MomentSet, complete_set_sum, entropy,
                         fourier_momentum, gram_matrix,
                         inverse_fourier_momentum, moments, overlap,
                         wave_overlap, wigner, wigner_of_operator)
from .classical import (CausticError, CflError, LiouvillePropagator,
                        action_wave_step, embed_action_wave,
                        gaussian_coherent_state, gaussian_profile,
                        liouville_step)
from .quantum import (EigenPair, SplitOperatorPropagator, gaussian_packet,
                      glauber_wavefunction, spectral_hamiltonian,
                      stationary_states, tdse_step)
from .thermal import (FokkerPlanckPropagator, QfpPropagator, QuantumEqParams,
                      boltzmann_equilibrium, fokker_planck_step,
                      fp_fourier_residual, nonlinear_qfp_step, occupations,
                      qfp_step, quantum_equilibrium, relative_entropy)
from .coherence import (CoherenceReport, coherence_residual,
                        moyal_correction, superposition_check)
from .resonances import (FitResult, ResonanceRecord, bundled_baryons,
                         bundled_mesons, fit_line, fit_report,
                         lifetime_ratio, load_resonances, predict_mass)
from .checkpoint import (load_checkpoint, read_csv, save_checkpoint,
                         write_csv)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
