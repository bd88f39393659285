"""Spherical analysis, wave kernels and semilinear waves on Damek–Ricci spaces."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .space import SpaceParams, new_space

__all__ = ["SpaceParams", "new_space", "__version__"]
