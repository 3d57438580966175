"""
GRPO update mechanics
=====================

Group-relative advantages, the KL estimator and the clipped surrogate, plus a
check that the closed-form gradient agrees with finite differences.
"""
import numpy as np

from emolab import PolicyParams, SampledGroup, compute_advantages, kl_penalty, policy_gradient, surrogate_loss

# one correct answer in a group of six
print("advantages:", np.round(compute_advantages([1, 0, 0, 0, 0, 0]), 4))
print("constant group:", compute_advantages([2.0] * 4))

# the estimator exp(d) - d - 1 with d = log pi_ref - log pi is never negative
d = np.linspace(-3, 3, 7)
print("\nKL per sample:", np.round(np.expm1(d) - d, 4))
print("KL at d = ln 2:", round(kl_penalty(np.array([-np.log(2)]), np.array([0.0])), 6))

# a small random instance
rng = np.random.default_rng(0)
A, D = 5, 3
policy = PolicyParams(rng.normal(0, 0.3, (D, A)))
old = PolicyParams(policy.weights + rng.normal(0, 0.1, (D, A)))
reference = PolicyParams.zeros(D, A)
state = rng.normal(size=D)
actions = rng.integers(0, A, 6)
rewards = np.array([2, 1, 1, 0, 2, 1.85])
group = SampledGroup.build(policy, reference, state, actions, old.log_probs(state)[actions], rewards)

beta, eps = 0.04, 0.2
print("\nratios:", np.round(np.exp(group.logp_current - group.logp_old), 3))
print("loss:", round(surrogate_loss(group, beta, eps), 6))

grad = policy_gradient(policy, group, beta, eps)
h = 1e-5
fd = np.zeros_like(grad)
for idx in np.ndindex(*grad.shape):
    plus, minus = policy.weights.copy(), policy.weights.copy()
    plus[idx] += h
    minus[idx] -= h
    lp = surrogate_loss(SampledGroup.build(policy.with_weights(plus), reference, state, actions,
                                           group.logp_old, rewards), beta, eps)
    lm = surrogate_loss(SampledGroup.build(policy.with_weights(minus), reference, state, actions,
                                           group.logp_old, rewards), beta, eps)
    fd[idx] = (lp - lm) / (2 * h)
print("relative gradient error:", np.linalg.norm(grad - fd) / np.linalg.norm(fd))
