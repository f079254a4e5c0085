"""Backend selection for the hot kernels.

The compiled Cython extension and the pure-Python module implement the
same two functions with the same accumulation order; which one runs is
chosen once at import time. Set ``LAYERSTEER_KERNELS=python`` or
``=compiled`` to force a backend; the default prefers the extension and
quietly falls back when it is not built.
"""

from __future__ import annotations

import os

ENV_VAR = "LAYERSTEER_KERNELS"

_ALIASES = {
    "auto": "auto",
    "c": "compiled",
    "cython": "compiled",
    "compiled": "compiled",
    "py": "python",
    "pure": "python",
    "python": "python",
}


def _normalize(raw: str) -> str:
    try:
        return _ALIASES[raw.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {raw!r}; use 'compiled' or 'python'"
        ) from None


def _load(choice: str):
    if choice == "python":
        from . import _kernels_py as impl

        return impl, "python"
    try:
        from . import _kernels as impl  # type: ignore[attr-defined]

        return impl, "compiled"
    except ImportError:
        if choice == "compiled":
            raise RuntimeError(
                f"the compiled kernels were requested via {ENV_VAR} but the "
                "extension is not built; reinstall with a C compiler or use "
                f"{ENV_VAR}=python"
            ) from None
        from . import _kernels_py as impl

        return impl, "python"


_impl, _name = _load(_normalize(os.environ.get(ENV_VAR, "auto") or "auto"))


def backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return _name


def use(name: str) -> str:
    """Swap the backend in place and return the previous one.

    Meant for tests and benchmarks; not for concurrent use.
    """
    global _impl, _name
    previous = _name
    _impl, _name = _load(_normalize(name))
    return previous


def matvec(a, x):
    return _impl.matvec(a, x)


def matvec_relu(a, x):
    return _impl.matvec_relu(a, x)
