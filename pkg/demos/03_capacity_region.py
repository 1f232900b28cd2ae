"""Capacity-region constraints, feasibility, and a path for any face point.

Run: python demos/03_capacity_region.py
"""
import itertools

import numpy as np

from msefield import (
    MacChannel,
    OffFaceError,
    enumerate_constraints,
    is_feasible,
    make_sic_path,
    rates_gaussian,
    synthesize_path_for_tuple,
)

ch = MacChannel.from_gains([3.0, 1.0, 0.5], noise_var=1.0)
print("constraints (nats):")
for c in enumerate_constraints(ch):
    print(f"  users {c.subset}: sum R <= {c.bound:.6f}")

corners = np.array([rates_gaussian(ch, make_sic_path(o)).per_user for o in itertools.permutations(range(3))])
target = corners.mean(axis=0)
print(f"\ncentroid of the SIC corners: {target.round(6).tolist()}")
print("binding constraints:", [c.subset for c in is_feasible(ch, target).binding])

path = synthesize_path_for_tuple(ch, target)
print(f"synthesized path ({path.kind.value}, {path.num_segments} segments):")
print(np.array2string(path.vertices, precision=4, suppress_small=True))
print("re-integrated rates:", rates_gaussian(ch, path).per_user.round(9).tolist())

try:
    synthesize_path_for_tuple(ch, 0.9 * target)
except OffFaceError as exc:
    print(f"\n0.9 x target: {exc}")
