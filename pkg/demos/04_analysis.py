"""Statistical analysis of a results grid.

Simulates a balanced experiment grid (dataset x level x decomposition x
distribution), normalizes relative gain within dataset/level groups, and
runs the balanced-design ANOVA plus Tukey HSD pairwise comparisons.

Run: python3 demos/04_analysis.py
"""

import itertools

import numpy as np

from chunkdp import anova, group_normalize, tukey_hsd

DECOMPOSITIONS = ("pmi", "llr", "tscore", "pos", "lexicon")
DISTRIBUTIONS = ("uniform", "ic_table", "corpus_ic")
EFFECT = {"pmi": 0.05, "llr": 0.04, "tscore": 0.03, "pos": 0.0, "lexicon": 0.01}


def simulate():
    rng = np.random.default_rng(31)
    rows = []
    for ds, level, dec, dist in itertools.product(
        ("trustpilot", "yelp"), ("high", "medium", "low"),
        DECOMPOSITIONS, DISTRIBUTIONS,
    ):
        base = {"high": 0.30, "medium": 0.20, "low": 0.10}[level]
        rows.append(
            {
                "dataset": ds,
                "level": level,
                "decomposition": dec,
                "distribution": dist,
                "relative_gain": base + EFFECT[dec] + rng.normal(0, 0.015),
            }
        )
    return rows


def main():
    rows = simulate()
    rows = group_normalize(rows, by=("dataset", "level"), value_key="relative_gain")

    result = anova(
        rows,
        factors=("decomposition", "distribution", "dataset", "level"),
        value_key="relative_gain",
        interaction=("decomposition", "distribution"),
    )
    print(f"{'factor':30s} {'sum_sq':>8s} {'df':>3s} {'F':>8s} {'p':>10s} {'eta_p2':>7s}")
    for name, fr in result.factors.items():
        print(
            f"{name:30s} {fr.sum_sq:8.4f} {fr.df:3d} {fr.f_value:8.2f} "
            f"{fr.p_value:10.3g} {fr.partial_eta_sq:7.3f}"
        )
    print(f"{'residual':30s} {result.residual_sum_sq:8.4f} {result.residual_df:3d}\n")

    groups = {}
    for r in rows:
        groups.setdefault(r["decomposition"], []).append(r["relative_gain"])
    print("Tukey HSD over decomposition methods:")
    for pair in tukey_hsd(groups):
        flag = "*" if pair.significant else " "
        print(
            f"  {pair.group_a:8s} vs {pair.group_b:8s} "
            f"diff={pair.mean_diff:+.4f} q={pair.q_statistic:6.2f} "
            f"p={pair.p_adjusted:.4f} {flag}"
        )


if __name__ == "__main__":
    main()
