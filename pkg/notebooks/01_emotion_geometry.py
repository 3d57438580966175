"""
Emotion geometry on the wheel
=============================

Eight primary emotions sit 45 degrees apart on a wheel.  The similarity of
two emotions is the cosine of their angular gap mapped into [0, 1], with a
flat 0.5 for anything paired with neutral.
"""
import numpy as np

from emolab import build_transition_matrix, default_label_sets, plutchik_angle
from emolab.geometry import adjacent_labels, load_label_set

meld7 = default_label_sets()["meld7"]
print("labels:", meld7.names)

# angles are minor arcs, so anger (270) and joy (0) are 90 apart
for a, b in [("anger", "disgust"), ("anger", "joy"), ("joy", "sadness")]:
    print(f"angle({a}, {b}) = {plutchik_angle(a, b, meld7):.0f}")

S = build_transition_matrix(meld7)
np.set_printoptions(precision=3, suppress=True)
print("\nsimilarity matrix:")
print(S.to_csv(3))

# every emotion has at most two wheel neighbours inside meld7
for lab in meld7:
    if not lab.is_neutral:
        print(f"{lab.name:>9} neighbours:", [n.name for n in adjacent_labels(lab, meld7)])

# iemocap4 uses synonyms that map onto the same wheel
iemo = default_label_sets()["iemocap4"]
print("\niemocap4:")
print(build_transition_matrix(iemo).to_csv(3))

# a custom set can place its own labels anywhere on the wheel
custom = load_label_set({"labels": ["calm", "joy", "sadness", "neutral"], "angles": {"calm": 30}})
print("custom S(calm, joy) =", round(build_transition_matrix(custom)("calm", "joy"), 4))
