"""Optical Feshbach resonances of 171Yb near the 1S0 - 3P1 intercombination line.

Subpackages: ``angular`` (channel bases and frame transforms) and
``boundstates`` (coupled-channel DVR). Modules: ``potentials``,
``scattering``, ``ofr`` and ``cli``.
"""

from .potentials import ModelParams

__version__ = "0.1.0"
__all__ = ["ModelParams", "__version__"]
