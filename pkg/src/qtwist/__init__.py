"""Exact verification workbench for twisted quantum-affine R-matrices and deformed spin chains."""

__version__ = "0.1.0"
