"""
Tensors over lattice variables and their partition norms.

A tensor has named axes, each with its own finite index set of frequencies,
and stores its nonzero entries in coordinate form. The norm for a partition
(A, B) of the axes is the largest singular value of the flattening with rows
indexed by B and columns by A.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from src.core_tools.errors import ParameterRangeError

NORM_TOL = 1e-8
RESTARTS = 3
MAX_ITER = 20_000

AxisSet = Tuple[str, ...]
Partition = Tuple[AxisSet, AxisSet]


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """
    Attributes:
        axes: Axis names, unique, at most four
        points: Index set of each axis as an (K, 3) integer array
        index: (nnz, len(axes)) positions into the index sets
        values: Complex value of each stored entry
    """

    axes: AxisSet
    points: Tuple[np.ndarray, ...]
    index: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(set(self.axes)) != len(self.axes):
            raise ParameterRangeError(f"axis names must be unique, got {self.axes}")
        if len(self.axes) > 4:
            raise ParameterRangeError(f"at most four axes, got {len(self.axes)}")
        if len(self.points) != len(self.axes):
            raise ParameterRangeError("need one index set per axis")
        index = np.asarray(self.index, dtype=np.int64).reshape(-1, len(self.axes))
        values = np.asarray(self.values, dtype=complex).ravel()
        if len(index) != len(values):
            raise ParameterRangeError("index and values disagree in length")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "points", tuple(np.asarray(p, dtype=np.int64).reshape(-1, 3) for p in self.points))

    @classmethod
    def from_vectors(cls, axes: Sequence[str], vectors: Sequence[np.ndarray], values: np.ndarray) -> "DenseTensor":
        """Tensor whose entry e sits at frequencies (vectors[0][e], vectors[1][e], ...)."""
        points, columns = [], []
        for v in vectors:
            v = np.asarray(v, dtype=np.int64).reshape(-1, 3)
            uniq, inverse = np.unique(v, axis=0, return_inverse=True)
            points.append(uniq)
            columns.append(inverse.ravel())
        index = np.stack(columns, axis=1) if columns else np.zeros((len(values), 0), dtype=np.int64)
        return cls(tuple(axes), tuple(points), index, values)

    @classmethod
    def from_array(cls, axes: Sequence[str], array: np.ndarray, points: Optional[Sequence[np.ndarray]] = None) -> "DenseTensor":
        """Tensor from a full array; index sets default to (i, 0, 0) labels."""
        array = np.asarray(array, dtype=complex)
        if array.ndim != len(axes):
            raise ParameterRangeError(f"array has {array.ndim} dimensions for {len(axes)} axes")
        if points is None:
            points = [np.stack([np.arange(k), np.zeros(k, int), np.zeros(k, int)], axis=1) for k in array.shape]
        nz = np.nonzero(array)
        return cls(tuple(axes), tuple(points), np.stack(nz, axis=1), array[nz])

    @classmethod
    def zero(cls, axes: Sequence[str]) -> "DenseTensor":
        return cls(tuple(axes), tuple(np.zeros((0, 3), dtype=np.int64) for _ in axes),
                   np.zeros((0, len(axes)), dtype=np.int64), np.zeros(0, dtype=complex))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(p) for p in self.points)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.values))

    def vectors(self, axis: str) -> np.ndarray:
        """Frequency on the given axis for every stored entry."""
        a = self.axes.index(axis)
        return self.points[a][self.index[:, a]]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        np.add.at(out, tuple(self.index.T), self.values)
        return out

    def adjoint(self) -> "DenseTensor":
        return DenseTensor(self.axes, self.points, self.index, np.conj(self.values))

    def scaled(self, factor: complex) -> "DenseTensor":
        return DenseTensor(self.axes, self.points, self.index, factor * self.values)

    def masked(self, keep: np.ndarray) -> "DenseTensor":
        return DenseTensor(self.axes, self.points, self.index[keep], self.values[keep])

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if other.axes != self.axes or any(
            a.shape != b.shape or not np.array_equal(a, b) for a, b in zip(self.points, other.points)
        ):
            raise ParameterRangeError("tensors must share axes and index sets")
        return DenseTensor(self.axes, self.points, np.concatenate([self.index, other.index]),
                           np.concatenate([self.values, other.values]))

    def max_frequency_norm(self) -> float:
        """Largest |(n_j)_j| over the support."""
        if not len(self.values):
            return 0.0
        total = np.zeros(len(self.values))
        for axis in self.axes:
            v = self.vectors(axis)
            total += np.sum(v * v, axis=1)
        return float(np.sqrt(total.max()))

    def flatten(self, A: Sequence[str], B: Sequence[str]) -> sparse.csr_matrix:
        """Sparse matrix with rows indexed by the B axes and columns by the A axes (duplicates summed)."""
        A, B = check_partition(self.axes, A, B)
        rows = self._combined(B)
        cols = self._combined(A)
        n_rows = int(np.prod([len(self.points[self.axes.index(b)]) for b in B], dtype=np.int64)) if B else 1
        n_cols = int(np.prod([len(self.points[self.axes.index(a)]) for a in A], dtype=np.int64)) if A else 1
        return sparse.coo_matrix((self.values, (rows, cols)), shape=(max(n_rows, 1), max(n_cols, 1))).tocsr()

    def _combined(self, names: AxisSet) -> np.ndarray:
        if not names:
            return np.zeros(len(self.values), dtype=np.int64)
        positions = [self.axes.index(a) for a in names]
        dims = [max(len(self.points[p]), 1) for p in positions]
        return np.ravel_multi_index(tuple(self.index[:, p] for p in positions), dims)


def check_partition(axes: Sequence[str], A: Sequence[str], B: Sequence[str]) -> Tuple[AxisSet, AxisSet]:
    A, B = tuple(A), tuple(B)
    if set(A) & set(B) or set(A) | set(B) != set(axes) or len(A) + len(B) != len(axes):
        raise ParameterRangeError(f"({A}, {B}) is not a partition of {tuple(axes)}")
    return A, B


def all_partitions(axes: Sequence[str]) -> List[Partition]:
    out = []
    for r in range(len(axes) + 1):
        for A in itertools.combinations(axes, r):
            out.append((A, tuple(a for a in axes if a not in A)))
    return out


def merged_partitions(axes: Sequence[str], A: Sequence[str], B: Sequence[str]) -> List[Partition]:
    """Partitions (X, Y) of all axes with A inside X and B inside Y."""
    rest = [a for a in axes if a not in A and a not in B]
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            X = tuple(a for a in axes if a in A or a in extra)
            out.append((X, tuple(a for a in axes if a not in X)))
    return out


def _power_iteration(M: sparse.csr_matrix, rng: np.random.Generator, tol: float, max_iter: int) -> float:
    MH = M.conj().T.tocsr()
    x = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    x /= np.linalg.norm(x)
    prev = 0.0
    for _ in range(max_iter):
        y = MH @ (M @ x)
        lam = float(np.real(np.vdot(x, y)))
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0
        x = y / norm_y
        if abs(lam - prev) <= tol * max(lam, 1e-300):
            return np.sqrt(max(lam, 0.0))
        prev = lam
    return np.sqrt(max(prev, 0.0))


def tensor_norm(
    h: DenseTensor,
    A: Sequence[str],
    B: Sequence[str],
    tol: float = NORM_TOL,
    restarts: int = RESTARTS,
    seed: int = 0,
) -> float:
    """||h||_{A -> B} by power iteration on the Gram matrix, max over random restarts."""
    M = h.flatten(A, B)
    if M.nnz == 0 or not np.any(M.data):
        return 0.0
    if min(M.shape) == 1:
        return float(np.linalg.norm(M.data))
    rng = np.random.default_rng(seed)
    return max(_power_iteration(M, rng, tol, MAX_ITER) for _ in range(restarts))


def dense_reference_norm(h: DenseTensor, A: Sequence[str], B: Sequence[str]) -> float:
    """Largest singular value from a full decomposition of the flattening (small tensors only)."""
    M = h.flatten(A, B)
    if M.nnz == 0:
        return 0.0
    return float(linalg.svdvals(M.toarray())[0])


def partition_norms(h: DenseTensor, partitions: Sequence[Partition], **kwargs) -> Dict[str, float]:
    return {partition_label(A, B): tensor_norm(h, A, B, **kwargs) for A, B in partitions}


def partition_label(A: Sequence[str], B: Sequence[str]) -> str:
    return f"{''.join(A) or '-'}->{''.join(B) or '-'}"
