"""Exact charging and self-discharge dynamics of a two-qubit quantum battery
coupled to Lorentzian reservoirs."""

__version__ = "0.1.0"

from .params import (InitialAmplitudes, RegimeReport, SystemParams, classify_regime,
                     kernel_laplace, memory_kernel, spectral_density, validate_params)
from .laplace import (AmplitudePair, PoleResidueForm, amplitude_arrays, amplitude_trajectory,
                      build_transfer, evaluate_amplitudes)
from .observables import (Trajectory, average_power, battery_energy, battery_ergotropy,
                          closed_system_probability, general_ergotropy, instantaneous_power,
                          passive_state, work_energy_ratio)
from .discharge import (SelfDischargeParams, amplitude_sd, amplitude_sd_resonant,
                        discharge_time, ergotropy_sd)
