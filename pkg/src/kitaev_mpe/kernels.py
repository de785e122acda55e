"""Hot-kernel dispatch.

The compiled Cython extension is used when it imports; otherwise the numpy
fallback in :mod:`kitaev_mpe._pykernels` is used. Set the environment
variable ``KITAEV_MPE_KERNELS=python`` to force the fallback.

``BACKEND`` names the active implementation (``"cython"`` or ``"python"``).
"""
import os

from kitaev_mpe import _pykernels

python_backend = _pykernels
compiled_backend = None

try:
    from kitaev_mpe import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("KITAEV_MPE_KERNELS", "").lower() != "python":
    _impl = compiled_backend
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "python"

toeplitz_minor_ratios = _impl.toeplitz_minor_ratios
sine_series = _impl.sine_series

__all__ = ["BACKEND", "toeplitz_minor_ratios", "sine_series", "python_backend", "compiled_backend"]
