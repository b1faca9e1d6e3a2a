"""Counter-based random number streams.

Every sampler in the package draws from an RngStream, a thin wrapper around
numpy's Philox generator keyed by (seed, stream_id). Distinct key pairs give
statistically independent streams, and reconstructing a stream with the same
pair replays the identical sequence, which is what makes parallel Monte Carlo
runs reproducible batch by batch.
"""

from __future__ import annotations

import numpy as np

_MIX = 0x9E3779B97F4A7C15  # 64-bit golden-ratio multiplier, used to spread substream ids


class RngStream:
    """A seeded, named random stream.

    Parameters
    ----------
    seed : int
        Base seed, shared by every stream of one experiment.
    stream_id : int
        Distinguishes parallel streams under the same seed.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, k: int) -> "RngStream":
        """Derive an independent child stream; deterministic in (self, k)."""
        child = (self.stream_id * _MIX + k + 1) & 0xFFFFFFFFFFFFFFFF
        return RngStream(self.seed, child)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"
