"""fluxreadout: desk-scale simulator of flux-pulse-assisted dispersive
readout of a fluxonium qubit."""

from .errors import (ConfigError, DivergenceProximityError, FitError,
                     FluxReadoutError, ResolutionError, SingularMatrixError,
                     TruncationError)
from .fluxonium import (FluxBias, FluxoniumParams, SpectrumResult,
                        charge_element, diagonalize, spectrum_vs_flux,
                        transition_frequency)
from .dispersive import (DispersivePoint, ResonanceFlag, chi_vs_flux,
                         dispersive_point, divergence_scan,
                         dressed_frequencies, mist_scan, qubit_pulls)
from .dynamics import (CavityTrajectory, DispersiveTable, DriveSpec,
                       FluxPulse, SnrCurve, drive_for_pulse,
                       drive_from_photons, integrate_cavity, make_flux_pulse,
                       snr_limited_error, snr_vs_time)
from .shots import (AssignmentResult, GaussianFit, NoiseModel, ShotSet,
                    assignment_error, fit_gaussians, sample_shots)
from .calibration import (CrosstalkMatrix, EfficiencyFit, PhotonConversion,
                          RamseyFit, crosstalk_compensate, efficiency,
                          fit_coherence_gaussian, fit_linewidth, fit_ramsey,
                          fit_snr_slope, photons_from_dac)
from .config import ExperimentConfig, load_config

__version__ = "0.1.0"
