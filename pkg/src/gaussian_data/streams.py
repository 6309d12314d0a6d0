"""
Counter-based random streams. A stream is keyed by (seed, stream_id) and backed
by numpy's Philox generator, so draws are reproducible bit for bit on every
platform and distinct stream ids give independent sequences.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core_tools.errors import ParameterRangeError

_MASK64 = (1 << 64) - 1


class SeededStream(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, le=_MASK64)
    stream_id: int = Field(default=0, ge=0, le=_MASK64)

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "SeededStream":
        """Independent sub-stream for the index-th member of an ensemble.

        The child id is the SeedSequence hash of (stream_id, index).
        """
        if index < 0:
            raise ParameterRangeError(f"child index must be >= 0, got {index}")
        state = np.random.SeedSequence(entropy=self.stream_id, spawn_key=(index,)).generate_state(1, dtype=np.uint64)
        return SeededStream(seed=self.seed, stream_id=int(state[0]))
