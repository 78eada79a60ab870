"""Homotopy invariants and the two independent routes to the Hopf number.

Winding numbers and mapping degrees are pure quadrature; the Hopf
invariant runs the full wedge/antiderivative pipeline and is
cross-checked by tracing preimage circles and evaluating the Gauss
linking integral.
"""

import numpy as np

from quanthom import (build_sphere_mesh, gauss_linking_oracle, hopf_invariant,
                      mapping_degree, winding_number, winding_number_oracle)
from quanthom.maps import (make_circle_power, make_hopf, make_map_composition,
                           make_oscillation_perturbation,
                           make_sphere_suspension)

print("== winding numbers (S^1 -> S^1) ==")
m1 = build_sphere_mesh(1, 6)
for d in (1, -3, 5):
    r = winding_number(make_circle_power(d), m1)
    print(f"  circle-power d={d:+d}: value {r.value:+.12f}")
f = make_oscillation_perturbation(make_circle_power(2), 0.1, 7)
print(f"  perturbed d=2: value {winding_number(f, m1).value:+.10f}, "
      f"branch-tracking oracle {winding_number_oracle(f)}")

print("\n== mapping degrees (S^2 -> S^2) ==")
m2 = build_sphere_mesh(2, 4)
for d in (1, 2, 3):
    r = mapping_degree(make_sphere_suspension(d), m2)
    print(f"  suspension d={d}: value {r.value:+.8f}")

print("\n== Hopf invariant (S^3 -> S^2) ==")
hopf = make_hopf()
for level in (1, 2):
    m3 = build_sphere_mesh(3, level)
    r = hopf_invariant(hopf, m3)
    print(f"  level {level}: value {r.value:+.6f} "
          f"(distance to integer {r.int_distance:.4f})")

p = np.array([0.3, 0.4, np.sqrt(1 - 0.25)])
q = -p
link = gauss_linking_oracle(hopf, p, q)
print(f"  Gauss linking oracle: {link.value:+.6f} "
      f"({link.n_components[0]} x {link.n_components[1]} fiber components)")

comp = make_map_composition(make_sphere_suspension(2), hopf)
link2 = gauss_linking_oracle(comp, p, q)
print(f"  suspension(2) o hopf linking: {link2.value:+.5f} "
      f"(components {link2.n_components}, pairwise "
      f"{np.round(link2.pair_values, 3)})")
