"""Backend selection for the hot tree-walk kernel.

The compiled extension is used when it imports; otherwise the pure-Python
walker is used.  Both consume identical uniforms and return identical leaves.
"""
import numpy as np

from . import _walk_py

try:
    from . import _walk as _walk_ext
except ImportError:  # extension not built
    _walk_ext = None

BACKENDS = ("compiled", "python")
DEFAULT_BACKEND = "compiled" if _walk_ext is not None else "python"


def available_backends():
    return tuple(b for b in BACKENDS if b == "python" or _walk_ext is not None)


def get_walk(backend=None):
    """Return ``walk_tree(cond, first_child, uniforms) -> leaf indices``."""
    backend = backend or DEFAULT_BACKEND
    if backend == "python":
        impl = _walk_py.walk_tree
    elif backend == "compiled":
        if _walk_ext is None:
            raise ImportError("compiled walk kernel is not built; reinstall with Cython available")
        impl = _walk_ext.walk_tree
    else:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")

    def walk(cond, first_child, uniforms):
        return impl(
            np.ascontiguousarray(cond, dtype=np.float64),
            np.ascontiguousarray(first_child, dtype=np.int64),
            np.ascontiguousarray(uniforms, dtype=np.float64),
        )

    return walk
