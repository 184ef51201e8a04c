"""Deterministic procedural-terrain curriculum engine.

Evolves MAP-Elites archives of heightmaps from several generator
representations, characterizes terrains with windowed descriptors, and
traverses the archive as a learning curriculum via a Gaussian process.
"""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
