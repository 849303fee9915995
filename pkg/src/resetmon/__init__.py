"""Runtime reset monitors for omega-regular properties of sampled Markov chains."""
from .core import MarkovChain, ProductChain, RabinAutomaton, Verdict, build_product, classify_scc, p_min
from .errors import (ConfigurationError, GenerationError, ParseError, PreconditionError,
                     ProtocolError, ResetmonError)
from .monitors import Monitor, MonitorConfig, MonitorKind, Schedule, alpha0, schedule_alpha, threshold
from .tracker import IncrementalTracker

__all__ = [
    "MarkovChain", "ProductChain", "RabinAutomaton", "Verdict", "build_product", "classify_scc", "p_min",
    "ConfigurationError", "GenerationError", "ParseError", "PreconditionError", "ProtocolError",
    "ResetmonError", "Monitor", "MonitorConfig", "MonitorKind", "Schedule", "alpha0",
    "schedule_alpha", "threshold", "IncrementalTracker",
]
__version__ = "0.1.0"
