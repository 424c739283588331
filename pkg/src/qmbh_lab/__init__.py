"""qmbh-lab: oracle-checked numerical experiments around the Compton scale."""

from .constants import (BUILTIN_PARTICLES, CGS, Constants, ParticleSpec,
                        RatioCheck)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_PARTICLES",
    "CGS",
    "Constants",
    "ParticleSpec",
    "RatioCheck",
    "__version__",
]
