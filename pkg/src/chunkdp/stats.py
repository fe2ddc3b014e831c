"""Statistical analysis of experiment results: per-group normalization,
balanced-design ANOVA with one two-factor interaction, partial eta squared,
and Tukey's HSD post-hoc comparisons.

Only balanced full-factorial designs are supported; the experiment grid is
perfectly balanced, and sums of squares for such designs are unambiguous.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as scistats

ALPHA = 0.05

# Documented accuracy of the studentized-range CDF evaluation below
# (scipy integrates the distribution numerically).
STUDENTIZED_RANGE_TOL = 1e-8


class DesignError(ValueError):
    pass


@dataclass
class FactorResult:
    sum_sq: float
    df: int
    f_value: float
    p_value: float
    partial_eta_sq: float


@dataclass
class AnovaResult:
    factors: dict[str, FactorResult] = field(default_factory=dict)
    residual_sum_sq: float = 0.0
    residual_df: int = 0

    @classmethod
    def from_sums_of_squares(
        cls,
        factor_sums: Mapping[str, tuple[float, int]],
        residual_sum_sq: float,
        residual_df: int,
    ) -> "AnovaResult":
        """Reconstruct F, p and partial eta squared from published sums of
        squares and degrees of freedom."""
        ms_resid = residual_sum_sq / residual_df
        result = cls(residual_sum_sq=residual_sum_sq, residual_df=residual_df)
        for name, (ss, df) in factor_sums.items():
            f_value = (ss / df) / ms_resid
            result.factors[name] = FactorResult(
                sum_sq=ss,
                df=df,
                f_value=f_value,
                p_value=float(scistats.f.sf(f_value, df, residual_df)),
                partial_eta_sq=ss / (ss + residual_sum_sq),
            )
        return result


def group_normalize(
    rows: Sequence[Mapping],
    by: Sequence[str],
    value_key: str,
) -> list[dict]:
    """Divide each value by the mean of its group (group = the `by` columns)."""
    groups: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        groups[tuple(row[k] for k in by)].append(float(row[value_key]))
    means = {}
    for key, vals in groups.items():
        mean = float(np.mean(vals))
        if mean == 0:
            raise DesignError(f"zero mean in group {dict(zip(by, key))}")
        means[key] = mean
    out = []
    for row in rows:
        new = dict(row)
        new[value_key] = float(row[value_key]) / means[tuple(row[k] for k in by)]
        out.append(new)
    return out


def _check_balanced(rows: Sequence[Mapping], factors: Sequence[str]) -> int:
    cells = defaultdict(int)
    for row in rows:
        cells[tuple(row[k] for k in factors)] += 1
    levels = [sorted({row[k] for row in rows}) for k in factors]
    expected_cells = 1
    for lv in levels:
        expected_cells *= len(lv)
    counts = set(cells.values())
    if len(cells) != expected_cells or len(counts) != 1:
        raise DesignError(
            "unbalanced design: this analysis only supports balanced "
            "full-factorial data; use external tooling for unbalanced models"
        )
    return counts.pop()


def anova(
    rows: Sequence[Mapping],
    factors: Sequence[str],
    value_key: str,
    interaction: tuple[str, str] | None = None,
) -> AnovaResult:
    """Balanced-design ANOVA over categorical factors plus one optional
    two-factor interaction; residual soaks up everything else."""
    if not rows:
        raise DesignError("no data")
    _check_balanced(rows, factors)
    y = np.array([float(r[value_key]) for r in rows])
    n = len(y)
    grand = y.mean()
    ss_total = float(((y - grand) ** 2).sum())

    def level_means(keys: Sequence[str]) -> dict[tuple, float]:
        acc: dict[tuple, list[float]] = defaultdict(list)
        for r in rows:
            acc[tuple(r[k] for k in keys)].append(float(r[value_key]))
        return {k: float(np.mean(v)) for k, v in acc.items()}

    factor_sums: dict[str, tuple[float, int]] = {}
    means_by_factor: dict[str, dict[tuple, float]] = {}
    for name in factors:
        means = level_means([name])
        means_by_factor[name] = means
        per_level = n // len(means)
        ss = sum(per_level * (m - grand) ** 2 for m in means.values())
        factor_sums[name] = (ss, len(means) - 1)

    if interaction is not None:
        a, b = interaction
        cell_means = level_means([a, b])
        per_cell = n // len(cell_means)
        ss_int = 0.0
        for (la, lb), m in cell_means.items():
            ss_int += per_cell * (
                m - means_by_factor[a][(la,)] - means_by_factor[b][(lb,)] + grand
            ) ** 2
        df_int = factor_sums[a][1] * factor_sums[b][1]
        factor_sums[f"{a}:{b}"] = (ss_int, df_int)

    explained_ss = sum(ss for ss, _ in factor_sums.values())
    explained_df = sum(df for _, df in factor_sums.values())
    residual_ss = ss_total - explained_ss
    residual_df = n - 1 - explained_df
    if residual_df <= 0:
        raise DesignError("no residual degrees of freedom")
    return AnovaResult.from_sums_of_squares(factor_sums, residual_ss, residual_df)


@dataclass
class TukeyPairResult:
    group_a: str
    group_b: str
    mean_diff: float
    q_statistic: float
    p_adjusted: float
    significant: bool


def tukey_hsd(
    groups: Mapping[str, Sequence[float]], alpha: float = ALPHA
) -> list[TukeyPairResult]:
    """All pairwise comparisons with studentized-range adjusted p-values.

    q = |mean_a - mean_b| / sqrt(MS_within/2 * (1/n_a + 1/n_b)), with the
    p-value from the studentized range distribution over k groups and
    N - k error degrees of freedom.
    """
    if len(groups) < 2:
        raise DesignError("need at least 2 groups")
    for label, vals in groups.items():
        if len(vals) < 2:
            raise DesignError(f"group {label!r} has fewer than 2 values")
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in groups.items()}
    k = len(arrays)
    n_total = sum(len(v) for v in arrays.values())
    df_error = n_total - k
    ss_within = sum(float(((v - v.mean()) ** 2).sum()) for v in arrays.values())
    ms_within = ss_within / df_error
    if ms_within <= 0:
        raise DesignError("zero within-group variance")

    results = []
    for a, b in itertools.combinations(sorted(arrays), 2):
        va, vb = arrays[a], arrays[b]
        diff = float(va.mean() - vb.mean())
        se = np.sqrt(ms_within / 2.0 * (1.0 / len(va) + 1.0 / len(vb)))
        q = abs(diff) / se
        p = float(scistats.studentized_range.sf(q, k, df_error))
        p = min(max(p, 0.0), 1.0)
        results.append(
            TukeyPairResult(
                group_a=a,
                group_b=b,
                mean_diff=diff,
                q_statistic=q,
                p_adjusted=p,
                significant=p < alpha,
            )
        )
    return results
