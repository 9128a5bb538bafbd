"""Multiphoton spontaneous bremsstrahlung spectra in two collinear light waves."""

from .mpbessel import (AccuracyError, DoubleSeries, RepresentationError, Tolerance,
                       TwoWaveArgs, bessel_int, coeff_B, coeff_D, coeff_interference,
                       gen_bessel, interference_J, two_wave_I)
from .mpparams import MultiphotonParams, RegimeReport, classify_regime, multiphoton_params
from .relkin import FourVector, ScatteringKinematics, WaveConfig, mdot

__version__ = "0.1.0"
