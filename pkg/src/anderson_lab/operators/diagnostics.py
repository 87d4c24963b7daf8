"""Sampled diagnostics of the shifted operators: functional inequalities, ladders, invariants."""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from ..models.operator import InequalityReport, LadderRow, LadderTable
from ..spectral.lattice import FourierField, inner, l2_norm, linf_norm
from ..spectral.norms import lp_norm
from ..spectral.sampling import rough_field
from .bundle import OperatorBundle, energy_norm, h_norm
from .matrix import resolvent_matrix

logger = logging.getLogger(__name__)

LP_EXPONENTS = (4, 6)


def agmon_ratio(bundle: OperatorBundle, u: FourierField) -> Optional[float]:
    """||u||_inf / (||H u||^{1/2} ||sqrt(-H) u||^{1/2}); None for a zero denominator."""
    denominator = math.sqrt(l2_norm(bundle.apply_H(u)) * energy_norm(bundle, u))
    if denominator == 0.0:
        return None
    return linf_norm(u) / denominator


def functional_ineq_report(
    bundle: OperatorBundle, samples: Sequence[FourierField], agmon: bool = False
) -> InequalityReport:
    """Maxima over the samples of the Brezis-Gallouet, L^p and L^inf ratios.

    Zero samples are skipped.
    """
    bg = linf_domain = 0.0
    lp = {p: 0.0 for p in LP_EXPONENTS}
    agmon_max: Optional[float] = 0.0 if agmon else None
    used = 0
    for u in samples:
        if l2_norm(u) == 0.0:
            continue
        used += 1
        energy = energy_norm(bundle, u)
        h_u = l2_norm(bundle.apply_H(u))
        sup = linf_norm(u)
        bg = max(bg, sup / (energy * math.sqrt(1.0 + math.log(1.0 + h_u))))
        linf_domain = max(linf_domain, sup / h_u)
        for p in LP_EXPONENTS:
            lp[p] = max(lp[p], lp_norm(u, p) / energy)
        if agmon_max is not None:
            agmon_max = max(agmon_max, agmon_ratio(bundle, u) or 0.0)
    return InequalityReport(
        samples=used, brezis_gallouet=bg, lp_ratios=lp, linf_domain=linf_domain, agmon=agmon_max
    )


def count_inversions(values: Sequence[float]) -> int:
    """Number of consecutive increases in a sequence that should decrease."""
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


def ladder_table(
    fields: Sequence[FourierField],
    eps_list: Sequence[float],
    exponent: float,
    norm_name: str,
    proxies: Optional[Sequence[float]] = None,
    allowed_inversions: int = 1,
) -> LadderTable:
    """Consecutive-rung differences ||f_i - f_{i+1}||_{H^exponent}."""
    rows = []
    for i in range(len(fields) - 1):
        rows.append(
            LadderRow(
                eps_coarse=eps_list[i],
                eps_fine=eps_list[i + 1],
                difference=h_norm(fields[i] - fields[i + 1], exponent),
                operator_proxy=None if proxies is None else proxies[i],
            )
        )
    differences = [row.difference for row in rows]
    inversions = count_inversions(differences)
    if proxies is not None:
        inversions = max(inversions, count_inversions(list(proxies)))
    table = LadderTable(
        norm=norm_name,
        rows=rows,
        inversions=inversions,
        decreasing=inversions <= allowed_inversions,
    )
    if not table.decreasing:
        logger.warning(f"{norm_name} ladder has {inversions} inversions: {differences}")
    return table


def common_shift(bundles: Sequence[OperatorBundle]) -> float:
    """One shift valid for every rung: max K_Xi."""
    return max(b.K_Xi for b in bundles)


def resolvent_ladder(
    bundles: Sequence[OperatorBundle],
    eps_list: Sequence[float],
    f: FourierField,
    exponent: float,
    proxy_samples: int = 0,
    seed: int = 0,
) -> LadderTable:
    """||(-H_{eps_i})^{-1} f - (-H_{eps_{i+1}})^{-1} f||_{H^exponent} along the ladder.

    All rungs are shifted by the common constant max K_Xi. With proxy_samples > 0 each row
    also carries the maximum difference over that many random unit f.
    """
    shift = common_shift(bundles)
    solutions = [resolvent_matrix(b.matrix_eps, shift, f) for b in bundles]
    proxies: Optional[list[float]] = None
    if proxy_samples > 0:
        spec = f.spec
        probes = []
        for i in range(proxy_samples):
            g = rough_field(spec, 0.0, np.random.default_rng([seed, 11, i]))
            probes.append(g / l2_norm(g))
        rung_solutions = [
            [resolvent_matrix(b.matrix_eps, shift, g) for g in probes] for b in bundles
        ]
        proxies = [
            max(
                h_norm(a - b, exponent)
                for a, b in zip(rung_solutions[i], rung_solutions[i + 1])
            )
            for i in range(len(bundles) - 1)
        ]
    return ladder_table(solutions, eps_list, exponent, f"resolvent H^{exponent:g}", proxies)


def symmetry_defect(
    u: FourierField, Au: FourierField, v: FourierField, Av: FourierField, scale: float
) -> float:
    """|<A u, v> - <u, A v>| / scale."""
    gap = abs(inner(Au, v) - inner(u, Av))
    return gap / scale if scale > 0 else gap


def bound_constant(lhs: Sequence[float], main: Sequence[float], base: Sequence[float]) -> float:
    """Smallest C with lhs <= main + C base on every sample (base > 0)."""
    values = [(a - m) / b for a, m, b in zip(lhs, main, base) if b > 0]
    return max(values) if values else 0.0


def ratio_range(numerators: Sequence[float], denominators: Sequence[float]) -> tuple[float, float]:
    """(min, max) of numerator / denominator over samples with a positive denominator."""
    ratios = [n / d for n, d in zip(numerators, denominators) if d > 0]
    if not ratios:
        return 0.0, 0.0
    return min(ratios), max(ratios)


def gamma_consistency(
    u: FourierField,
    inverse_maps: Sequence[Callable[[FourierField], FourierField]],
    reference_gamma: Callable[[FourierField], FourierField],
    exponent: float,
) -> list[float]:
    """||u - Gamma Gamma_eps^{-1} u||_{H^exponent} for each rung's inverse map."""
    return [h_norm(u - reference_gamma(inverse(u)), exponent) for inverse in inverse_maps]
