"""
Reward and reasoning-pattern ablation
=====================================

Trains every combination of accuracy reward (BCR, ESWR) and reasoning
pattern (IR, EUR, ESR) on five seeds and compares the median held-out UA.
In this environment the three patterns differ only in the text they emit,
so their learning dynamics coincide exactly.
"""
from emolab.experiments import AblationGrid, ordering_summary, run_ablation

result = run_ablation(AblationGrid(), workers=4)
print(result.format_table())

summary = ordering_summary(result)
print(f"\nESWR >= BCR in {len(summary['eswr_ge_bcr_seeds'])}/5 seeds")
print(f"ESR >= EUR >= IR in {len(summary['pattern_order_seeds'])}/5 seeds, "
      f"strictly in {len(summary['pattern_order_strict_seeds'])}/5")
for seed in result.grid.seeds:
    print(f"seed {seed}: BCR {result.ua('bcr_esr', seed):.4f}  ESWR {result.ua('eswr_esr', seed):.4f}")
