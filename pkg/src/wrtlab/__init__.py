"""Simulation and limit theory for the maximum degree of weighted recursive trees."""
from .weights import PRESETS, AtomMix, Beta, Constant, GammaFraction, parse_law
from .simulate import Wrt, generate
from .asymptotics import centering_for

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "AtomMix",
    "Beta",
    "Constant",
    "GammaFraction",
    "parse_law",
    "Wrt",
    "generate",
    "centering_for",
]
