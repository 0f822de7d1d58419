"""Quantum-logic spin detection of a single (anti)proton, simulated.

Density-matrix dynamics of a proton and a laser-cooled coolant ion in a
Penning-trap array, the detection sequence that maps the proton spin onto
the ion's fluorescence, and the Larmor-scan campaign that turns detection
statistics into a g-factor.
"""
from .dynamics import ExchangeParams, PulseParams, Sideband
from .protocol import ProtocolConfig, detection_probability, execute, make_world, spin_detection_protocol
from .readout import FluorescenceParams, Outcome, seeded_stream
from .scan import ScanConfig, fit_lineshape, g_factor, larmor_scan, run_g_measurement
from .sequence import canonical_detection_sequence, parse_sequence, validate
from .state import DOWN, UP, CompositeState, RegisterSpec
from .trap import ANTIPROTON, BERYLLIUM_ION, PROTON, TrapArrayConfig

__version__ = "0.1.0"

__all__ = [
    "ANTIPROTON", "BERYLLIUM_ION", "CompositeState", "DOWN", "ExchangeParams", "FluorescenceParams",
    "Outcome", "PROTON", "ProtocolConfig", "PulseParams", "RegisterSpec", "ScanConfig", "Sideband",
    "TrapArrayConfig", "UP", "canonical_detection_sequence", "detection_probability", "execute",
    "fit_lineshape", "g_factor", "larmor_scan", "make_world", "parse_sequence", "run_g_measurement",
    "seeded_stream", "spin_detection_protocol", "validate",
]
