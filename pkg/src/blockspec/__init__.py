"""Spectra of block-disordered chains of subwavelength resonators.

Capacitance-matrix assembly, transfer/propagation cocycles, certified
band-gap classification, edge-mode detection, and finite-section spectra,
with a CSV/JSON command-line driver (``blockspec``).
"""

from blockspec.kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
