"""Angular momentum algebra and channel bases for the 1S0 + 3P1 pair."""

from .halfint import HalfInt
from .wigner import clebsch_gordan, wigner3j, wigner6j, wigner9j

__all__ = ["HalfInt", "clebsch_gordan", "wigner3j", "wigner6j", "wigner9j"]
