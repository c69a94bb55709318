"""CHSH values for the Werner state as a function of visibility.

With projective measurements the correlator is -eta * a.b, so the CHSH
value scales linearly in the visibility: 2 sqrt(2) at eta = 1, the
classical bound 2 exactly at eta = 1/sqrt(2), and sqrt(2) at eta = 1/2.
The hidden-state model of the previous demo covers every eta <= 1/2, so no
Bell inequality can be violated there.
"""

import numpy as np

from povmsim import chsh_optimal_settings, chsh_value

settings = chsh_optimal_settings()
a, a_prime, b, b_prime = settings
print("optimal settings:")
for name, v in [("a", a), ("a'", a_prime), ("b", b), ("b'", b_prime)]:
    print(f"  {name:2s} = ({v[0]:+.4f}, {v[1]:+.4f}, {v[2]:+.4f})")

print("\n  eta     CHSH value   violates")
for eta in [0.0, 0.25, 0.5, 1 / np.sqrt(2), 0.75, 0.9, 1.0]:
    value = chsh_value(*settings, eta)
    print(f"  {eta:.4f}   {value:.6f}   {'yes' if value > 2 else 'no'}")

print(f"\nlinearity check: chsh(0.37) / chsh(1.0) = {chsh_value(*settings, 0.37) / chsh_value(*settings, 1.0):.6f}")
