"""
Chaos verification suite: Wick centering, Ito isometry, pathwise product
formulas, hypercontractivity and the stochastic-time cross-check.
"""

import time
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd

from src.chaos_calculus.hypercontractivity import chaos_samples, hypercontractivity_ratio, tail_consistency
from src.chaos_calculus.kernels import ChaosKernel, add_kernels, random_sparse_kernel, symmetrize
from src.chaos_calculus.products import product_expand, quadratic_cubic_product
from src.chaos_calculus.wick import correlated_family, eval_chaos, ito_isometry
from src.core_tools.artifact_store import ArtifactStore
from src.core_tools.logger import LabLogger
from src.core_tools.stats import mean_and_se, z_score
from src.gaussian_data.process import offdiagonal_double_integral, offdiagonal_second_moment, sample_process_path
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream

logger = LabLogger("ChaosCalculus")

Z_LIMIT = 5.0
PATHWISE_TOL = 1e-10
HYPER_LIMIT = 2.0
TERM_Z_LIMIT = 4.0


def _row(check: str, value: float, target: float, z: float, passed: bool) -> Dict:
    return {"check": check, "value": value, "target": target, "z": z, "passed": bool(passed)}


def check_wick_centering(samples: int, stream: SeededStream, workers: int) -> Dict:
    f = ChaosKernel.delta((1, 0, 0), (-1, 0, 0))
    values = chaos_samples(f, samples, stream, workers=workers).real
    mean, se = mean_and_se(values)
    z = z_score(mean, 0.0, se)
    return _row("wick_centering_k2", mean, 0.0, z, abs(z) <= Z_LIMIT)


def check_isometry(order: int, samples: int, stream: SeededStream, workers: int) -> Dict:
    rng = stream.child(10_000 + order).generator()
    f = random_sparse_kernel(rng, order, 2, size=3)
    g = random_sparse_kernel(rng, order, 2, size=3)
    exact = ito_isometry(f, g)
    R = max(f.max_frequency(), g.max_frequency(), 1)
    products = np.array([
        eval_chaos(f, d) * np.conj(eval_chaos(g, d))
        for d in (sample_gff(stream.child(i), R) for i in range(samples))
    ])
    zr = z_score(*_mean_se_pair(products.real, exact.real))
    zi = z_score(*_mean_se_pair(products.imag, exact.imag))
    z = max(abs(zr), abs(zi))
    return _row(f"ito_isometry_k{order}", float(np.mean(products.real)), exact.real, z, z <= Z_LIMIT)


def _mean_se_pair(values: np.ndarray, target: float):
    mean, se = mean_and_se(values)
    return mean, target, se


def check_product_pathwise(samples: int, stream: SeededStream) -> Dict:
    rng = stream.child(20_000).generator()
    worst = 0.0
    for k, l in ((1, 1), (1, 2), (2, 2)):
        f = random_sparse_kernel(rng, k, 1, size=3)
        g = random_sparse_kernel(rng, l, 1, size=3)
        terms = product_expand(f, g)
        for i in range(samples):
            d = sample_gff(stream.child(30_000 + i), 1)
            lhs = eval_chaos(f, d) * eval_chaos(g, d)
            rhs = sum(eval_chaos(t, d) for t in terms)
            worst = max(worst, abs(lhs - rhs))
    return _row("product_formula_pathwise", worst, 0.0, 0.0, worst <= PATHWISE_TOL)


def check_quadratic_cubic(samples: int, stream: SeededStream) -> List[Dict]:
    """Chaos components of I_2[f] I_3[g] on correlated families, order by order.

    The order-5 term is beyond pathwise evaluation, so each lower term is
    checked through its projection E[X conj(I[t])] = <t, t>.
    """
    rng = stream.child(40_000).generator()
    f = random_sparse_kernel(rng, 2, 1, size=3)
    g = symmetrize(random_sparse_kernel(rng, 3, 1, size=2))

    def C(n):
        n = np.asarray(n, dtype=float)
        return 0.5 * np.exp(-np.sum(n * n, axis=-1) / 4.0)

    terms = quadratic_cubic_product(f, g, C)
    cubic, linear = add_kernels(terms[1:3]), terms[3]
    fa = ChaosKernel(2, f.entries, (), ("a", "a"))
    gb = ChaosKernel(3, g.entries, (), ("b", "b", "b"))
    plain, first, third = [], [], []
    for i in range(samples):
        fam = correlated_family(sample_gff(stream.child(50_000 + i), 1), C, stream.child(60_000 + i))
        value = eval_chaos(fa, fam) * eval_chaos(gb, fam)
        plain.append(value)
        first.append(value * np.conj(eval_chaos(linear, fam)))
        third.append(value * np.conj(eval_chaos(cubic, fam)))

    rows = []
    for name, values, target in (
        ("quadratic_cubic_order0", plain, 0j),
        ("quadratic_cubic_order1", first, ito_isometry(linear, linear, correlation=C)),
        ("quadratic_cubic_order3", third, ito_isometry(cubic, cubic, correlation=C)),
    ):
        values = np.asarray(values)
        z = max(abs(z_score(*_mean_se_pair(values.real, target.real))),
                abs(z_score(*_mean_se_pair(values.imag, target.imag))))
        rows.append(_row(name, float(np.mean(values.real)), float(target.real), z, z <= TERM_Z_LIMIT))
    return rows


def check_hypercontractivity(samples: int, stream: SeededStream, workers: int) -> List[Dict]:
    rows = []
    single = hypercontractivity_ratio(ChaosKernel.delta((0, 0, 0)), 4, samples, stream.child(70_000), workers)
    target = 3 ** 0.25 / 2.0
    rows.append(_row("hypercontractivity_k1_p4", single, target, 0.0, abs(single - target) <= 0.05))
    rng = stream.child(70_001).generator()
    for trial in range(3):
        f = random_sparse_kernel(rng, 2, 2, size=4)
        for p in (4, 6, 8):
            ratio = hypercontractivity_ratio(f, p, samples, stream.child(71_000 + 10 * trial + p), workers)
            rows.append(_row(f"hypercontractivity_k2_p{p}_trial{trial}", ratio, HYPER_LIMIT, 0.0, ratio <= HYPER_LIMIT))
    values = chaos_samples(ChaosKernel.delta((1, 0, 0), (-1, 0, 0)), samples, stream.child(72_000), workers=workers)
    tail = tail_consistency(values, 2)
    rows.append(_row("tail_consistency_k2", tail.empirical_tail, tail.moment_bound, 0.0, tail.consistent))
    return rows


def check_process_path(samples: int, stream: SeededStream) -> List[Dict]:
    n, R = (1, 1, 0), 2
    values, exact = [], None
    for i in range(samples):
        path = sample_process_path(stream.child(80_000 + i), R)
        values.append(offdiagonal_double_integral(path, n, (-n[0], -n[1], -n[2])))
        exact = offdiagonal_second_moment(path, n)
    values = np.array(values)
    mean, se = mean_and_se(values.real)
    z_mean = z_score(mean, 0.0, se)
    second, se2 = mean_and_se(np.abs(values) ** 2)
    z_second = z_score(second, exact, se2)
    return [
        _row("process_path_k2_mean", mean, 0.0, z_mean, abs(z_mean) <= Z_LIMIT),
        _row("process_path_k2_second_moment", second, exact, z_second, abs(z_second) <= Z_LIMIT),
    ]


def run_verify_chaos(run_id: str, samples: int, seed: int, out_dir: Path, workers: int = 1):
    """
    Runs the chaos verification suite.

    Args:
        run_id: Identifier of this run.
        samples: Monte Carlo sample count per check.
        seed: Seed of the root random stream.
        out_dir: Output directory for artifacts.
        workers: Worker threads for sample evaluation.

    Returns:
        A dictionary with per-check rows and the overall verdict.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("CHAOS VERIFICATION")
    logger.info("Starting chaos checks", data={"samples": samples, "seed": seed, "workers": workers})
    stream = SeededStream(seed=seed, stream_id=3)
    store = ArtifactStore(out_dir, run_id)

    rows: List[Dict] = []
    steps = [
        ("wick_centering", lambda: [check_wick_centering(samples, stream.child(1), workers)]),
        ("ito_isometry", lambda: [check_isometry(k, samples, stream.child(2 + k), workers) for k in (1, 2, 3)]),
        ("product_formula", lambda: [check_product_pathwise(min(samples, 1000), stream.child(6))]),
        ("quadratic_cubic", lambda: check_quadratic_cubic(min(samples, 5000), stream.child(7))),
        ("hypercontractivity", lambda: check_hypercontractivity(samples, stream.child(8), workers)),
        ("process_path", lambda: check_process_path(min(samples, 2000), stream.child(9))),
    ]
    for name, step in steps:
        logger.step_start(name)
        step_start = time.time()
        try:
            new_rows = step()
        except Exception as e:
            logger.step_failed(name, e)
            raise
        rows.extend(new_rows)
        logger.step_complete(name, duration_ms=int((time.time() - step_start) * 1000),
                             data={"passed": all(r["passed"] for r in new_rows)})

    path = store.write_csv("chaos_checks.csv", pd.DataFrame(rows))
    passed = all(r["passed"] for r in rows)
    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    if passed:
        logger.success("Chaos checks passed", data={"checks": len(rows), "duration_ms": duration_ms})
    else:
        failed = [r["check"] for r in rows if not r["passed"]]
        logger.warning("Chaos checks failed", data={"failed": ",".join(failed), "duration_ms": duration_ms})
    return {"run_id": run_id, "passed": passed, "rows": rows, "artifacts": [str(path)], "store": store}
