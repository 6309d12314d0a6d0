"""
Contractions and product formulas for multiple stochastic integrals.
"""

from math import comb, factorial
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.chaos_calculus.kernels import ChaosKernel, Key, symmetrize, tensor_product
from src.chaos_calculus.wick import Correlation, family_factor
from src.core_tools.errors import AsymmetricKernelError, ParameterRangeError
from src.lattice_spectral.lattice import bracket


def contract(f: ChaosKernel, g: ChaosKernel, r: int, correlation: Optional[Correlation] = None) -> ChaosKernel:
    """Contract the last r slots of f against the last r slots of g.

    (f x_r g)(n, m) = sum_p f(n, p) g(m, -p) prod_j <p_j>^{-2} c_j(p_j), where c_j is
    the correlation between the families of the paired slots.
    """
    k, l = f.order, g.order
    if not 0 <= r <= min(k, l):
        raise ParameterRangeError(f"contraction order {r} outside [0, {min(k, l)}]")
    if r == 0:
        return tensor_product(f, g)
    F, G = f.canonical(), g.canonical()

    by_tail: Dict[Key, List[Tuple[Key, complex]]] = {}
    for key, v in G.entries.items():
        by_tail.setdefault(key[l - r:], []).append((key[:l - r], v))

    acc: Dict[Key, complex] = {}
    for key, fv in F.entries.items():
        head, tail = key[:k - r], key[k - r:]
        matches = by_tail.get(tuple((-p[0], -p[1], -p[2]) for p in tail))
        if not matches:
            continue
        weight = 1.0
        for j, p in enumerate(tail):
            weight *= float(bracket(p)) ** (-2.0)
            weight *= float(family_factor(F.families[k - r + j], G.families[l - r + j], np.array(p), correlation))
        if weight == 0.0:
            continue
        for ghead, gv in matches:
            out = head + ghead
            acc[out] = acc.get(out, 0.0) + fv * gv * weight
    return ChaosKernel(k + l - 2 * r, acc, (), F.families[:k - r] + G.families[:l - r])


def product_weight(k: int, l: int, r: int) -> int:
    return factorial(r) * comb(k, r) * comb(l, r)


def product_expand(f: ChaosKernel, g: ChaosKernel, correlation: Optional[Correlation] = None) -> List[ChaosKernel]:
    """Terms r = 0..min(k, l) of I_k[f] I_l[g] = sum_r r! C(k,r) C(l,r) I_{k+l-2r}[f~ x_r g~], weights included."""
    fs, gs = symmetrize(f), symmetrize(g)
    return [
        contract(fs, gs, r, correlation).scaled(product_weight(fs.order, gs.order, r))
        for r in range(min(fs.order, gs.order) + 1)
    ]


def quadratic_cubic_product(
    f: ChaosKernel,
    g: ChaosKernel,
    C: Correlation,
    families: Tuple[str, str] = ("a", "b"),
) -> List[ChaosKernel]:
    """The four terms of I_2[f] I_3[g] for f on family a and symmetric g on family b.

    Weights 1, 3, 3, 6: no contraction, slot 1 of f contracted, slot 2 of f
    contracted, both slots contracted; every pairing carries C(n) <n>^{-2}.

    Raises:
        AsymmetricKernelError: if g is not symmetric
    """
    if f.order != 2 or g.order != 3:
        raise ParameterRangeError(f"expected orders (2, 3), got ({f.order}, {g.order})")
    gc = g.canonical()
    if not gc.is_symmetric():
        raise AsymmetricKernelError("the cubic kernel must be symmetric")
    fa = ChaosKernel(2, f.canonical().entries, (), (families[0],) * 2)
    gb = ChaosKernel(3, gc.entries, (), (families[1],) * 3)
    return [
        contract(fa, gb, 0),
        contract(fa.permute((1, 0)), gb, 1, C).scaled(3),
        contract(fa, gb, 1, C).scaled(3),
        contract(fa, gb, 2, C).scaled(6),
    ]
