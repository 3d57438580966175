"""
Training a policy
=================

A full run with the default configuration: similarity-weighted accuracy,
structured reasoning, groups of six and 300 steps on the ambiguous
environment.  The learning curve reports the trailing 100-step UA.
"""
import tempfile
from pathlib import Path

from emolab import RunConfig
from emolab.experiments import evaluate_policy, run_training, write_run_artifacts
from emolab.metrics import report

config = RunConfig().with_seed(0)
run, env = run_training(config)
print(f"{len(run.curve)} steps in {run.wall_time:.2f}s")

print(f"\n{'step':>5}{'reward':>9}{'format':>9}{'UA':>8}{'KL':>8}{'alpha':>8}")
for row in run.curve[::30] + [run.curve[-1]]:
    print(f"{row['step']:>5}{row['mean_reward']:>9.3f}{row['format_rate']:>9.3f}"
          f"{row['ua']:>8.3f}{row['kl']:>8.3f}{row['alpha']:>8.3f}")

print(f"\nfinal 100-step UA {run.final_ua(100):.4f} against a uniform baseline of {1 / 7:.4f}")

held_out = report(evaluate_policy(run.policy, env, config.pattern, n=2000))
print("\ngreedy policy on 2000 held-out episodes:")
print(held_out.pretty())

with tempfile.TemporaryDirectory() as tmp:
    write_run_artifacts(run, config, tmp)
    print("\nartifacts:", sorted(p.name for p in Path(tmp).iterdir()))
