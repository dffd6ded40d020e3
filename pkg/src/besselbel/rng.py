"""Counter-based random streams: one independent generator per ``(seed, stream, path)``.

Each path draws from its own Philox stream keyed by its index, so results do
not depend on how paths are split across workers or chunks.
"""

from __future__ import annotations

import numpy as np

__all__ = ["path_rng"]


def path_rng(seed: int, stream_id: int, path_index: int, substream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id), int(substream), int(path_index)))
    return np.random.Generator(np.random.Philox(ss))
