"""Hot term kernels, compiled when available.

Set ``HOMKIR_PURE=1`` to force the pure-Python implementation.
"""

import os

from . import _pykernels as pure

BACKEND = "python"
compiled = None

if not os.environ.get("HOMKIR_PURE"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

if compiled is not None:
    mul_terms = compiled.mul_terms
    partial_terms = compiled.partial_terms
    add_terms = compiled.add_terms
    BACKEND = "cython"
else:
    mul_terms = pure.mul_terms
    partial_terms = pure.partial_terms
    add_terms = pure.add_terms


def use_backend(name: str) -> str:
    """Switch the active kernels (``"python"`` or ``"cython"``); returns the previous name."""
    global mul_terms, partial_terms, add_terms, BACKEND
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        impl = compiled
    elif name == "python":
        impl = pure
    else:
        raise ValueError(f"unknown backend {name!r}")
    previous = BACKEND
    mul_terms, partial_terms, add_terms = impl.mul_terms, impl.partial_terms, impl.add_terms
    BACKEND = name
    return previous


__all__ = ["BACKEND", "compiled", "pure", "mul_terms", "partial_terms", "add_terms",
           "use_backend"]
