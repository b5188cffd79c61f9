"""Local models of Higgs fields and their spectral data, in exact arithmetic."""

__version__ = "0.1.0"
