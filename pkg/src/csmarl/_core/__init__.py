"""Hot-kernel backend: compiled extension when available, numpy otherwise.

Set CSMARL_FORCE_FALLBACK=1 to ignore the extension (used by the benchmark
and the equivalence tests).
"""

import os

from . import _fallback

if os.environ.get("CSMARL_FORCE_FALLBACK"):
    _backend = _fallback
else:
    try:
        from . import _kernels as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _fallback

IMPL = _backend.IMPL
mlp_forward = _backend.mlp_forward
mlp_backward = _backend.mlp_backward
solve_games_batch = _backend.solve_games_batch

fallback = _fallback
