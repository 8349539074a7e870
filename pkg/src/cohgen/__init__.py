"""Unitary generation of coherence from thermal states.

Static optimization over unitaries (entropy, energy-constrained, and
generalized near-diagonal targets), GRAPE control-field synthesis, and a
reproducible experiment harness with CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from .spinsys import EnergyBasis, ModelSetup, SpinSystem  # noqa: F401
from .uopt import HermitianGenerator, Objective, OptimizerOptions, OptResult  # noqa: F401
from .grape import ControlField, GrapeOptions, PropagationResult  # noqa: F401
from .harness import ProblemSpec, RunRecord, SweepRecord  # noqa: F401
