"""A local hidden state model for the half-visibility Werner state.

Bob holds a uniformly random pure state; Alice, who knows its direction,
flips her measurement directions and answers through the conditional table;
Bob measures his own state.  The resulting joint distribution equals the
quantum prediction for arbitrary POVMs on the Werner state of visibility
1/2, which is why that state admits no steering demonstration.
"""

import numpy as np

from povmsim import (
    bob_conditional_state,
    chi_squared_test,
    lhs_model,
    projective_povm,
    random_povm,
    sic_povm,
    werner_joint_quantum,
)

alice, bob = sic_povm(), projective_povm([1, 0, 0])
model = lhs_model(alice, bob)

quantum = werner_joint_quantum(alice, bob, 0.5)
exact = model.joint_exact()
print("quantum table:")
print(np.array2string(quantum.table, precision=5))
print("hidden-state model table:")
print(np.array2string(exact.table, precision=5))
print(f"max deviation: {np.max(np.abs(quantum.table - exact.table)):.3e}\n")

# Bob's conditional states match the true post-measurement states.
for i in range(alice.n_outcomes):
    state = bob_conditional_state(model.table, i)
    p, a = alice.weights[i], alice.directions[i]
    dev = max(abs(state.t - p / 4), np.max(np.abs(state.w + p * a / 8)))
    print(f"Bob's state after outcome {i}: deviation {dev:.2e}")

# The identity holds for arbitrary POVM pairs.
worst = 0.0
for seed in range(50):
    a_povm = random_povm(2 + seed % 7, seed)
    b_povm = random_povm(2 + (seed + 4) % 7, 100 + seed)
    m = lhs_model(a_povm, b_povm)
    dev = np.max(np.abs(m.joint_exact().table - werner_joint_quantum(a_povm, b_povm, 0.5).table))
    worst = max(worst, float(dev))
print(f"\nworst deviation over 50 random POVM pairs: {worst:.3e}")

# Sampling the protocol reproduces the same table.
counts = model.sample_counts(1_000_000, rng_seed=1)
chi = chi_squared_test(counts, exact.table)
print(f"sampled table chi-squared p-value at N=1e6: {chi.pvalue:.3f}")
