"""Semi-simplicial resolutions, spectral sequences and stability ranges."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
