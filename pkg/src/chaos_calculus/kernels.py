"""
Sparse kernels of multiple stochastic integrals.

A kernel of order k maps k-tuples of frequencies to complex coefficients. Each
slot j carries a sign s_j in {+1, -1} and a family label naming the Gaussian
family it integrates against. Sign -1 on frequency n refers to the conjugate
mode conj(G_n) = G_{-n}, so `canonical()` folds signs into the frequencies.
"""

import itertools
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core_tools.errors import ParameterRangeError

Vec = Tuple[int, int, int]
Key = Tuple[Vec, ...]

DEFAULT_FAMILY = "a"


def _vec(n) -> Vec:
    return (int(n[0]), int(n[1]), int(n[2]))


def _neg(n: Vec) -> Vec:
    return (-n[0], -n[1], -n[2])


@dataclass(frozen=True, eq=False)
class ChaosKernel:
    order: int
    entries: Mapping[Key, complex]
    signs: Tuple[int, ...] = ()
    families: Tuple[str, ...] = ()
    symmetric: bool = False

    def __post_init__(self):
        k = int(self.order)
        if k < 0:
            raise ParameterRangeError(f"kernel order must be >= 0, got {k}")
        signs = tuple(self.signs) if self.signs else (1,) * k
        families = tuple(self.families) if self.families else (DEFAULT_FAMILY,) * k
        if len(signs) != k or len(families) != k or any(s not in (1, -1) for s in signs):
            raise ParameterRangeError("signs and families need one entry in {+1,-1} per slot")
        entries: Dict[Key, complex] = {}
        for key, value in self.entries.items():
            key = tuple(_vec(n) for n in key)
            if len(key) != k:
                raise ParameterRangeError(f"entry {key} does not have {k} frequencies")
            if value != 0:
                entries[key] = entries.get(key, 0.0) + complex(value)
        object.__setattr__(self, "order", k)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "families", families)
        object.__setattr__(self, "entries", entries)

    # construction

    @classmethod
    def scalar(cls, value: complex) -> "ChaosKernel":
        return cls(0, {(): value}, symmetric=True)

    @classmethod
    def delta(cls, *ns, coeff: complex = 1.0, signs: Sequence[int] = (), family: str = DEFAULT_FAMILY) -> "ChaosKernel":
        k = len(ns)
        return cls(k, {tuple(_vec(n) for n in ns): coeff}, tuple(signs), (family,) * k)

    @classmethod
    def from_items(cls, order: int, items: Iterable[Tuple[Sequence[Vec], complex]], **kwargs) -> "ChaosKernel":
        return cls(order, {tuple(_vec(n) for n in ns): v for ns, v in items}, **kwargs)

    # views

    @property
    def support(self) -> List[Key]:
        return list(self.entries.keys())

    def __len__(self) -> int:
        return len(self.entries)

    def value(self, *ns) -> complex:
        return self.entries.get(tuple(_vec(n) for n in ns), 0.0)

    def max_frequency(self) -> int:
        return max((abs(c) for key in self.entries for n in key for c in n), default=0)

    def scaled(self, factor: complex) -> "ChaosKernel":
        return ChaosKernel(self.order, {k: factor * v for k, v in self.entries.items()},
                           self.signs, self.families, self.symmetric)

    def canonical(self) -> "ChaosKernel":
        """Equivalent kernel with every sign +1 (frequency n_j replaced by s_j n_j)."""
        if all(s == 1 for s in self.signs):
            return self
        entries = {
            tuple(n if s == 1 else _neg(n) for n, s in zip(key, self.signs)): v
            for key, v in self.entries.items()
        }
        return ChaosKernel(self.order, entries, (1,) * self.order, self.families, self.symmetric)

    def permute(self, perm: Sequence[int]) -> "ChaosKernel":
        """Kernel whose slot j is slot perm[j] of this one."""
        entries = {tuple(key[p] for p in perm): v for key, v in self.entries.items()}
        return ChaosKernel(self.order, entries, tuple(self.signs[p] for p in perm),
                           tuple(self.families[p] for p in perm))

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        if len(set(self.families)) > 1 or len(set(self.signs)) > 1:
            return False
        for key, v in self.entries.items():
            for perm in itertools.permutations(range(self.order)):
                if abs(self.entries.get(tuple(key[p] for p in perm), 0.0) - v) > atol:
                    return False
        return True

    # serialization

    def to_record(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "signs": list(self.signs),
            "families": list(self.families),
            "entries": [
                {"ns": [list(n) for n in key], "re": float(np.real(v)), "im": float(np.imag(v))}
                for key, v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "ChaosKernel":
        return cls(
            int(record["order"]),
            {tuple(tuple(n) for n in e["ns"]): complex(e["re"], e["im"]) for e in record["entries"]},
            tuple(record.get("signs", ())),
            tuple(record.get("families", ())),
        )


def symmetrize(f: ChaosKernel) -> ChaosKernel:
    """Average over all k! slot permutations (signs folded into frequencies first)."""
    if f.symmetric or f.order <= 1:
        return ChaosKernel(f.order, f.canonical().entries, (), f.families, True)
    if len(set(f.families)) > 1:
        raise ParameterRangeError("symmetrization needs a single Gaussian family")
    g = f.canonical()
    perms = list(itertools.permutations(range(g.order)))
    acc: Dict[Key, complex] = {}
    for key, v in g.entries.items():
        share = v / len(perms)
        for perm in perms:
            pk = tuple(key[p] for p in perm)
            acc[pk] = acc.get(pk, 0.0) + share
    return ChaosKernel(g.order, acc, (), g.families, True)


def tensor_product(f: ChaosKernel, g: ChaosKernel) -> ChaosKernel:
    f, g = f.canonical(), g.canonical()
    entries = {kf + kg: vf * vg for kf, vf in f.entries.items() for kg, vg in g.entries.items()}
    return ChaosKernel(f.order + g.order, entries, (), f.families + g.families)


def add_kernels(kernels: Sequence[ChaosKernel], weights: Optional[Sequence[complex]] = None) -> ChaosKernel:
    """Weighted sum of kernels of one order with matching family labels."""
    weights = [1.0] * len(kernels) if weights is None else list(weights)
    first = kernels[0].canonical()
    acc: Dict[Key, complex] = {}
    for kernel, w in zip(kernels, weights):
        kernel = kernel.canonical()
        if kernel.order != first.order or kernel.families != first.families:
            raise ParameterRangeError("kernels must share order and families to be added")
        for key, v in kernel.entries.items():
            acc[key] = acc.get(key, 0.0) + w * v
    return ChaosKernel(first.order, acc, (), first.families)


def random_sparse_kernel(rng: np.random.Generator, order: int, R: int, size: int = 4) -> ChaosKernel:
    """Kernel with `size` random frequencies in the window and complex Gaussian coefficients."""
    entries: Dict[Key, complex] = {}
    for _ in range(size):
        key = tuple(tuple(int(c) for c in rng.integers(-R, R + 1, size=3)) for _ in range(order))
        entries[key] = complex(rng.standard_normal(), rng.standard_normal())
    return ChaosKernel(order, entries)
