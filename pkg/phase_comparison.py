"""
Cascade Motif Toolkit - Phase Comparison
Welch two-sample t-tests of per-pattern network coverage between the steep
and inhibition windows of a cascade corpus.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import betainc

from motif_engine import MotifPattern
from motif_percolation import CoverageResult

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.01
PHASES = ("steep", "inhib")

TEST_COLUMNS = [
    "catalog_index", "n_steep", "n_inhib", "mean_steep", "mean_inhib",
    "t", "dof", "p", "significant", "p_bonferroni"
]


class InsufficientSampleError(ValueError):
    """A sample has fewer than two observations"""


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    variance: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "SampleSummary":
        arr = np.asarray(values, dtype=float)
        if len(arr) < 2:
            raise InsufficientSampleError(f"Need at least 2 observations, got {len(arr)}")
        return cls(n=len(arr), mean=float(arr.mean()), variance=float(arr.var(ddof=1)))


@dataclass(frozen=True)
class TTestResult:
    pattern: Optional[MotifPattern]
    t: Optional[float]
    dof: Optional[float]
    p: Optional[float]
    significant: bool
    means: Tuple[float, float]
    n: Tuple[int, int] = (0, 0)
    skipped: bool = False
    p_bonferroni: Optional[float] = None

    @property
    def catalog_index(self) -> Optional[int]:
        return self.pattern.catalog_index if self.pattern is not None else None

    def to_row(self) -> Dict:
        return {
            "catalog_index": self.catalog_index,
            "n_steep": self.n[0],
            "n_inhib": self.n[1],
            "mean_steep": self.means[0],
            "mean_inhib": self.means[1],
            "t": self.t,
            "dof": self.dof,
            "p": self.p,
            "significant": self.significant,
            "p_bonferroni": self.p_bonferroni
        }


def student_t_two_sided(t: float, dof: float) -> float:
    """P(|T| >= |t|) for Student-t with `dof` degrees of freedom"""
    if math.isinf(t):
        return 0.0
    if t == 0:
        return 1.0
    x = dof / (dof + t * t)
    return float(min(1.0, max(0.0, betainc(dof / 2.0, 0.5, x))))


def welch_t_test(a: Sequence[float], b: Sequence[float], alpha: float = DEFAULT_ALPHA,
                 pattern: Optional[MotifPattern] = None) -> TTestResult:
    """
    Unequal-variance two-sample t-test, two-sided

    Args:
        a: First sample (steep-window NC values)
        b: Second sample (inhibition-window NC values)
        alpha: Significance level; significant means p < alpha

    Returns:
        TTestResult with t, Welch-Satterthwaite dof and p
    """
    if not 0 < alpha < 1:
        raise ValueError(f"Significance level must be in (0, 1), got {alpha}")
    sa = SampleSummary.of(a)
    sb = SampleSummary.of(b)

    va = sa.variance / sa.n
    vb = sb.variance / sb.n
    se2 = va + vb
    diff = sa.mean - sb.mean

    if se2 == 0:
        dof = float(sa.n + sb.n - 2)
        if diff == 0:
            t, p = 0.0, 1.0
        else:
            t, p = math.copysign(math.inf, diff), 0.0
    else:
        t = diff / math.sqrt(se2)
        denom = 0.0
        if va:
            denom += va * va / (sa.n - 1)
        if vb:
            denom += vb * vb / (sb.n - 1)
        dof = se2 * se2 / denom
        p = student_t_two_sided(t, dof)

    return TTestResult(
        pattern=pattern,
        t=float(t),
        dof=float(dof),
        p=p,
        significant=p < alpha,
        means=(sa.mean, sb.mean),
        n=(sa.n, sb.n)
    )


def _nc(value) -> float:
    return value.nc if isinstance(value, CoverageResult) else float(value)


def phase_samples(
    corpus: Sequence[Tuple[Mapping, Mapping]],
    absent_as_zero: bool = True
) -> Dict[MotifPattern, Tuple[List[float], List[float]]]:
    """
    Per-pattern (steep, inhibition) NC samples

    A cascade whose phase table lacks a pattern contributes 0 to that
    phase, or nothing when `absent_as_zero` is off.
    """
    patterns = set()
    for steep, inhib in corpus:
        patterns.update(steep)
        patterns.update(inhib)

    samples = {}
    for pattern in sorted(patterns, key=lambda p: p.catalog_index):
        a, b = [], []
        for steep, inhib in corpus:
            for table, sample in ((steep, a), (inhib, b)):
                if pattern in table:
                    sample.append(_nc(table[pattern]))
                elif absent_as_zero:
                    sample.append(0.0)
        samples[pattern] = (a, b)
    return samples


def compare_phases(
    corpus: Sequence[Tuple[Mapping, Mapping]],
    alpha: float = DEFAULT_ALPHA,
    absent_as_zero: bool = True
) -> List[TTestResult]:
    """
    One test per pattern present in any cascade, ordered by catalog index

    Args:
        corpus: Per cascade, (steep table, inhibition table); each maps
            MotifPattern to a CoverageResult or a plain NC value
        alpha: Significance level
        absent_as_zero: Missing patterns count as NC = 0

    Returns:
        Test results; patterns with a phase sample under 2 are marked skipped
    """
    results = []
    for pattern, (a, b) in phase_samples(corpus, absent_as_zero).items():
        if len(a) < 2 or len(b) < 2:
            logger.warning(
                f"Pattern {pattern.catalog_index}: samples of {len(a)} and {len(b)}, test skipped"
            )
            results.append(TTestResult(
                pattern=pattern,
                t=None,
                dof=None,
                p=None,
                significant=False,
                means=(float(np.mean(a)) if a else 0.0, float(np.mean(b)) if b else 0.0),
                n=(len(a), len(b)),
                skipped=True
            ))
            continue
        results.append(welch_t_test(a, b, alpha, pattern=pattern))

    tested = sum(1 for r in results if not r.skipped)
    adjusted = []
    for r in results:
        if r.skipped:
            adjusted.append(r)
        else:
            adjusted.append(replace(r, p_bonferroni=min(1.0, r.p * tested)))
    return adjusted


def phase_means_table(results: Sequence[TTestResult]) -> List[Dict]:
    """Long-format (phase, catalog_index, n, mean_nc) rows for bar charts"""
    rows = []
    for phase_pos, phase in enumerate(PHASES):
        for r in results:
            rows.append({
                "phase": phase,
                "catalog_index": r.catalog_index,
                "n": r.n[phase_pos],
                "mean_nc": r.means[phase_pos]
            })
    return rows
