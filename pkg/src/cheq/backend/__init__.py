"""Numeric kernel backend selection.

The compiled Cython extension is preferred; the pure numpy module is the
fallback. ``CHEQ_BACKEND=py`` or ``CHEQ_BACKEND=c`` forces a choice (the
latter raises if the extension is unavailable). Both expose the same
functions; ``cheq.backend.NAME`` reports which one is active.
"""

import os

from . import pure

_forced = os.environ.get("CHEQ_BACKEND", "").lower()

if _forced in ("py", "pure", "python"):
    impl = pure
elif _forced in ("c", "compiled", "ext"):
    from . import _core as impl
else:
    try:
        from . import _core as impl
    except ImportError:
        impl = pure

NAME = impl.NAME
ACT_RELU = pure.ACT_RELU
ACT_TANH = pure.ACT_TANH

param_count = impl.param_count
layer_views = impl.layer_views
forward_batch = impl.forward_batch
backward_batch = impl.backward_batch
backward_input = impl.backward_input
adam_update = impl.adam_update
polyak_update = impl.polyak_update


def available_backends():
    names = ["pure"]
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Fetch a backend module by name, for tests and benchmarks."""
    if name in ("pure", "py"):
        return pure
    if name in ("compiled", "c"):
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
