"""Backend selection for the hot kernels.

Prefers the compiled Cython extension; falls back to the NumPy
implementation when the extension was not built. ``KERNEL_BACKEND`` records
which one is active.
"""

from __future__ import annotations

try:
    from blockspec._kernels import (  # type: ignore[attr-defined]
        BACKEND as KERNEL_BACKEND,
        bisect_eigenvalues,
        product_renorm,
        sturm_count,
    )
except ImportError:  # pragma: no cover - depends on build environment
    from blockspec._kernels_py import (
        BACKEND as KERNEL_BACKEND,
        bisect_eigenvalues,
        product_renorm,
        sturm_count,
    )

__all__ = ["KERNEL_BACKEND", "sturm_count", "bisect_eigenvalues", "product_renorm"]
