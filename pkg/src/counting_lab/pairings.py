"""
Pairings of index positions: anti-reflexive, symmetric, univalent relations on
{1, ..., J}, the partitions they respect and the frequency tuples they admit.
"""

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core_tools.errors import ParameterRangeError

Partition = Tuple[Tuple[int, ...], ...]

SEPTIC_PARTITION: Partition = ((1, 2, 3), (4,), (5, 6, 7))


@dataclass(frozen=True)
class Pairing:
    size: int
    relation: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        relation = frozenset((int(i), int(j)) for i, j in self.relation)
        object.__setattr__(self, "relation", relation)
        for i, j in relation:
            if not (1 <= i <= self.size and 1 <= j <= self.size):
                raise ParameterRangeError(f"pair ({i}, {j}) outside 1..{self.size}")
            if i == j:
                raise ParameterRangeError(f"pairing is not anti-reflexive: ({i}, {i})")
            if (j, i) not in relation:
                raise ParameterRangeError(f"pairing is not symmetric: ({i}, {j}) without ({j}, {i})")
        firsts = [i for i, _ in relation]
        if len(firsts) != len(set(firsts)):
            raise ParameterRangeError("pairing is not univalent")

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterable[Tuple[int, int]]) -> "Pairing":
        """Pairing holding each given pair in both orders."""
        relation = set()
        for i, j in pairs:
            relation.add((i, j))
            relation.add((j, i))
        return cls(size, frozenset(relation))

    @classmethod
    def empty(cls, size: int) -> "Pairing":
        return cls(size, frozenset())

    def partner(self, j: int) -> Optional[int]:
        for a, b in self.relation:
            if a == j:
                return b
        return None

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return sorted((i, j) for i, j in self.relation if i < j)

    @property
    def paired(self) -> Tuple[int, ...]:
        return tuple(sorted(i for i, _ in self.relation))

    @property
    def unpaired(self) -> Tuple[int, ...]:
        return tuple(j for j in range(1, self.size + 1) if self.partner(j) is None)

    def respects(self, partition: Partition) -> bool:
        """True when no pair joins two indices of the same block."""
        _check_partition(partition, self.size)
        block_of = {j: b for b, block in enumerate(partition) for j in block}
        return all(block_of[i] != block_of[j] for i, j in self.relation)

    def is_admissible(self, vectors: Sequence[Sequence[int]]) -> bool:
        """n_i = -n_j for every pair (i, j)."""
        vecs = np.asarray(vectors)
        if len(vecs) != self.size:
            raise ParameterRangeError(f"expected {self.size} frequencies, got {len(vecs)}")
        return all(np.array_equal(vecs[i - 1], -vecs[j - 1]) for i, j in self.pairs)

    def non_resonant_frequency(self, vectors: Sequence[Sequence[int]]) -> np.ndarray:
        vecs = np.asarray(vectors)
        out = np.zeros(vecs.shape[1:], dtype=vecs.dtype)
        for j in self.unpaired:
            out = out + vecs[j - 1]
        return out


def _check_partition(partition: Partition, size: int):
    flat = sorted(j for block in partition for j in block)
    if flat != list(range(1, size + 1)):
        raise ParameterRangeError(f"{partition} is not a partition of 1..{size}")


def pairings_respecting(size: int, partition: Partition) -> List[Pairing]:
    """Every pairing of 1..size (the empty one included) that respects the partition."""
    _check_partition(partition, size)
    block_of = {j: b for b, block in enumerate(partition) for j in block}
    candidates = [(i, j) for i, j in itertools.combinations(range(1, size + 1), 2) if block_of[i] != block_of[j]]
    out = []
    for r in range(size // 2 + 1):
        for chosen in itertools.combinations(candidates, r):
            used = [k for pair in chosen for k in pair]
            if len(used) == len(set(used)):
                out.append(Pairing.from_pairs(size, chosen))
    return out


MIRROR_PAIRING = Pairing.from_pairs(7, [(1, 5), (2, 6), (3, 7)])
