"""
Exact enumeration of counting queries.

Tuples are visited in chunks of the cartesian product of the variable domains.
Each chunk reduces to a weighted histogram over the window integers, so a
single pass yields the count (or weighted sum) for every m at once and the sup
over m is exact over all integers. Chunk partials are merged with math.fsum.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core_tools.errors import BudgetExceededError
from src.core_tools.settings import get_settings
from src.core_tools.workers import map_ordered
from src.counting_lab.phases import window_candidates, window_hits
from src.counting_lab.queries import Assignment, CountingQuery

CHUNK = 1 << 20

MKey = Tuple[int, ...]


@dataclass(frozen=True)
class WindowProfile:
    """Weighted tuple counts keyed by the window integers (one per phase window)."""

    values: Dict[MKey, float]

    def at(self, m: Union[int, Sequence[int], None] = None) -> float:
        if m is None:
            key: MKey = ()
        elif isinstance(m, (int, np.integer)):
            key = (int(m),)
        else:
            key = tuple(int(x) for x in m)
        return self.values.get(key, 0.0)

    @property
    def sup(self) -> float:
        return max(self.values.values(), default=0.0)

    @property
    def argmax(self) -> Optional[MKey]:
        if not self.values:
            return None
        return max(self.values, key=lambda k: (self.values[k], tuple(-abs(x) for x in k)))

    @property
    def total(self) -> float:
        return math.fsum(self.values.values())


def check_budget(q: CountingQuery, budget: Optional[int] = None) -> int:
    """Raises BudgetExceededError when the unpruned product of domains exceeds the budget."""
    budget = get_settings().enumeration_budget if budget is None else int(budget)
    if q.size > budget:
        raise BudgetExceededError(q.size, budget, f"query {q.lemma_id}")
    return budget


def _assignment(q: CountingQuery, start: int, stop: int) -> Optional[Assignment]:
    sizes = [v.size for v in q.variables]
    idx = np.unravel_index(np.arange(start, stop, dtype=np.int64), sizes)
    values = {v.name: v.points[i] for v, i in zip(q.variables, idx)}
    keep = np.ones(stop - start, dtype=bool)
    for annulus in q.annuli:
        keep &= annulus.holds(values)
    if not keep.any():
        return None
    if keep.all():
        return values
    return {name: arr[keep] for name, arr in values.items()}


def iter_assignments(q: CountingQuery, chunk: int = CHUNK, budget: Optional[int] = None) -> Iterator[Assignment]:
    """Chunks of tuples satisfying every annulus constraint, in lexicographic order of the domains."""
    check_budget(q, budget)
    total = q.size
    for start in range(0, total, chunk):
        values = _assignment(q, start, min(start + chunk, total))
        if values is not None:
            yield values


def _offset(q: CountingQuery) -> int:
    radii = q.radii()
    bound = max((p.bound(radii) for w in q.windows for p in w.phases), default=0.0)
    return int(math.ceil(bound)) + 3


def _chunk_histogram(q: CountingQuery, values: Assignment, offset: int) -> Tuple[np.ndarray, np.ndarray]:
    size = len(next(iter(values.values())))
    weights = np.ones(size) if q.weight is None else np.broadcast_to(np.asarray(q.weight(values), dtype=float), (size,))
    if not q.windows:
        return np.zeros(1, dtype=np.int64), np.array([float(np.sum(weights))])

    base = 2 * offset + 1
    per_window = []
    for w in q.windows:
        options = []
        for phase in w.phases:
            phi = phase.evaluate(values)
            low, count = window_candidates(phi, w.half_open)
            for j in range(count):
                m = low + j
                options.append((m, window_hits(phi, m, w.half_open)))
        per_window.append(options)

    codes, sums = [], []
    for combo in itertools.product(*per_window):
        mask = np.ones(size, dtype=bool)
        code = np.zeros(size, dtype=np.int64)
        scale = 1
        for m, hit in combo:
            mask &= hit
            code += (m + offset) * scale
            scale *= base
        if not mask.any():
            continue
        codes.append(code[mask])
        sums.append(weights[mask])
    if not codes:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    codes = np.concatenate(codes)
    sums = np.concatenate(sums)
    unique, inverse = np.unique(codes, return_inverse=True)
    return unique, np.bincount(inverse, weights=sums, minlength=len(unique))


def _decode(code: int, windows: int, offset: int) -> MKey:
    base = 2 * offset + 1
    key = []
    for _ in range(windows):
        key.append(code % base - offset)
        code //= base
    return tuple(int(k) for k in key)


def _merge(partials: List[Tuple[np.ndarray, np.ndarray]], windows: int, offset: int) -> Dict[MKey, float]:
    codes = np.concatenate([p[0] for p in partials]) if partials else np.zeros(0, dtype=np.int64)
    sums = np.concatenate([p[1] for p in partials]) if partials else np.zeros(0)
    if codes.size == 0:
        return {}
    order = np.argsort(codes, kind="stable")
    codes, sums = codes[order], sums[order]
    splits = np.flatnonzero(np.diff(codes)) + 1
    out: Dict[MKey, float] = {}
    for group_codes, group_sums in zip(np.split(codes, splits), np.split(sums, splits)):
        value = math.fsum(group_sums.tolist())
        if value != 0.0:
            out[_decode(int(group_codes[0]), windows, offset)] = value
    return out


def window_profile(
    q: CountingQuery,
    budget: Optional[int] = None,
    workers: int = 1,
    chunk: int = CHUNK,
) -> WindowProfile:
    """Weighted counts of the query for every window integer tuple m.

    Raises:
        BudgetExceededError: if the product of the domain sizes exceeds the budget
    """
    check_budget(q, budget)
    offset = _offset(q)
    total = q.size

    def partial(start: int):
        values = _assignment(q, start, min(start + chunk, total))
        if values is None:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        return _chunk_histogram(q, values, offset)

    partials = map_ordered(partial, range(0, total, chunk), workers)
    return WindowProfile(_merge(partials, len(q.windows), offset))


def lattice_count(q: CountingQuery, m: Union[int, Sequence[int], None] = None, budget: Optional[int] = None,
                  workers: int = 1) -> int:
    """Exact number of tuples meeting every constraint with window integers m."""
    profile = window_profile(q.with_weight(None), budget, workers)
    return int(round(profile.total if not q.windows else profile.at(m)))


def weighted_lattice_sum(q: CountingQuery, m: Union[int, Sequence[int], None] = None, budget: Optional[int] = None,
                         workers: int = 1) -> float:
    profile = window_profile(q, budget, workers)
    return profile.total if not q.windows else profile.at(m)


def sup_over_windows(q: CountingQuery, budget: Optional[int] = None, workers: int = 1) -> float:
    """sup over all integer m of the weighted count (the plain total when the query has no window)."""
    profile = window_profile(q, budget, workers)
    return profile.total if not q.windows else profile.sup


def reference_count(q: CountingQuery, m: Union[int, Sequence[int], None] = None) -> int:
    """Tuple-by-tuple count with nested loops, for cross-checking the vectorized path on small queries."""
    ms = () if m is None else ((int(m),) if isinstance(m, (int, np.integer)) else tuple(m))
    count = 0
    for combo in itertools.product(*(range(v.size) for v in q.variables)):
        values = {v.name: v.points[i][None, :] for v, i in zip(q.variables, combo)}
        if not all(bool(a.holds(values)[0]) for a in q.annuli):
            continue
        hits = 1
        for w, mw in zip(q.windows, ms):
            hits *= sum(int(window_hits(p.evaluate(values), mw, w.half_open)[0]) for p in w.phases)
        count += hits
    return count
