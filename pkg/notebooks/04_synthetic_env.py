"""
The synthetic speech-emotion environment
========================================

Utterances are noisy copies of per-emotion prototype vectors.  A fraction of
them sit halfway between two wheel neighbours, which makes those two labels
indistinguishable from the features.  The policy answers by choosing a
response template: a format variant crossed with a label.
"""
import numpy as np

from emolab import EnvConfig, SpeechEmotionEnv, parse_response

env = SpeechEmotionEnv(EnvConfig(ambiguity_rate=0.3, noise_sigma=0.2, seed=0))
print("state dim:", env.state_dim, " actions:", env.action_count)
print("prototype Gram matrix is the identity:", np.allclose(env.prototypes @ env.prototypes.T, np.eye(7)))

eps = env.episodes(2000)
print("ambiguous fraction:", np.mean([e.ambiguous for e in eps]))
ep = next(e for e in eps if e.ambiguous)
print(f"episode {ep.index}: gold={ep.gold.name} neighbour={ep.neighbor.name}")

# cosine similarity of the features to each prototype
sims = env.prototypes @ ep.features / np.linalg.norm(ep.features)
for name, s in sorted(zip(env.label_set.names, sims), key=lambda x: -x[1])[:3]:
    print(f"  {name:>9}: {s:.3f}")

# every template rendered under the structured pattern, then parsed back
print()
for a in range(0, env.action_count, len(env.label_set)):
    text = env.render(a, "esr", ep)
    p = parse_response(text, "esr", env.label_set)
    print(f"{str(env.action(a)):<24} valid={p.format_valid!s:<5} answer={p.answer.name if p.answer else None}")
    print("   ", text[:110] + ("..." if len(text) > 110 else ""))
