"""Kernel implementation selector.

Imports the compiled Cython kernels when the extension was built, otherwise
falls back to the numpy implementation.  Both expose the same functions; the
active one is re-exported here and named in IMPLEMENTATION.
"""

from . import _kernels_py

try:
    from . import _kernels as _impl  # compiled extension

    IMPLEMENTATION = "cython"
except ImportError:
    _impl = _kernels_py
    IMPLEMENTATION = "python"

iwasawa_batch = _impl.iwasawa_batch
bump3_batch = _impl.bump3_batch
group_bump_batch = _impl.group_bump_batch
kf_batch = _impl.kf_batch
mobius_inverse_batch = _impl.mobius_inverse_batch
plane_bump_batch = _impl.plane_bump_batch
atlas_weight_batch = _impl.atlas_weight_batch
char_weight_batch = _impl.char_weight_batch
kernel_row_batch = _impl.kernel_row_batch
