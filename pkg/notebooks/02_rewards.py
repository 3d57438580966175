"""
Verifiable rewards
==================

A response earns one point for matching its reasoning-pattern grammar and up
to one more for the answer.  Exact-match scoring (BCR) gives nothing for a
near miss; similarity-weighted scoring (ESWR) pays alpha * S when S clears
the threshold gamma.
"""
from emolab import (AlphaSchedule, RewardConfig, build_transition_matrix, default_label_sets, parse_response,
                    total_reward)
from emolab.rewards import alpha_at, bcr_reward, eswr_reward

meld7 = default_label_sets()["meld7"]
S = build_transition_matrix(meld7)

responses = {
    "ir": "<answer>disgust</answer>",
    "eur": "<think>Clipped words and a sharp tone.</think><answer>disgust</answer>",
    "esr": ("<think><transcript>get that away from me</transcript><keywords>away</keywords>"
            "<acoustic>low pitch, tense</acoustic><integration>rejection in words and voice</integration>"
            "</think><answer>disgust</answer>"),
}

# each response only satisfies its own grammar
for text_pattern, text in responses.items():
    row = [f"{p}:{int(parse_response(text, p, meld7).format_valid)}" for p in responses]
    print(f"{text_pattern:>3} response validity ->", " ".join(row))

print("\nstructured sections:", dict(parse_response(responses["esr"], "esr", meld7).sections))

# near-miss credit for disgust when the gold label is anger
print("\nBCR(disgust | anger) =", bcr_reward("disgust", "anger"))
for alpha in (1.0, 0.5, 0.0):
    print(f"ESWR(disgust | anger, alpha={alpha}) = {eswr_reward('disgust', 'anger', S, alpha):.4f}")
print("ESWR(neutral | anger, alpha=1) =", eswr_reward("neutral", "anger", S, 1.0), "(0.5 is below gamma)")

# the default alpha schedule decays linearly over training
sched = AlphaSchedule.linear_decay()
print("\nalpha over a 300-step run:", [round(alpha_at(sched, t, 300), 2) for t in (0, 75, 150, 225, 300)])

cfg = RewardConfig()
for step in (0, 150, 299):
    b = total_reward(responses["esr"], "anger", "esr", cfg, S, step=step, total_steps=300)
    print(f"step {step:>3}: format={b.format} accuracy={b.accuracy:.4f} total={b.total:.4f}")

# a correct answer in a broken wrapper keeps its accuracy point unless gated
broken = "<answer>anger</answer>"
print("\nungated:", total_reward(broken, "anger", "eur", cfg, S, 0, 300).to_json())
gated = RewardConfig(gate_accuracy_on_format=True)
print("gated:  ", total_reward(broken, "anger", "eur", gated, S, 0, 300).to_json())
