"""Sum rate is the same along every decoding path; the split between users is not.

Run: python demos/01_path_independence.py
"""
import numpy as np

from msefield import (
    MacChannel,
    make_sic_path,
    make_straight_line,
    random_monotone_path,
    rates_gaussian,
    sum_rate_closed_form,
)

ch = MacChannel.from_gains([2.0, 1.0, 0.5], noise_var=1.0)
rng = np.random.default_rng(7)

paths = {
    "straight": make_straight_line(3),
    "sic 0,1,2": make_sic_path([0, 1, 2]),
    "sic 2,1,0": make_sic_path([2, 1, 0]),
}
for i in range(4):
    paths[f"random #{i}"] = random_monotone_path(3, 3, rng)

print(f"sum capacity log(1 + sum g / s2) = {sum_rate_closed_form(ch):.10f} nats\n")
print(f"{'path':<12} {'R_0':>10} {'R_1':>10} {'R_2':>10} {'sum':>14}")
for name, p in paths.items():
    r = rates_gaussian(ch, p)
    print(f"{name:<12} " + " ".join(f"{x:10.6f}" for x in r.per_user) + f" {r.sum:14.10f}")

# the integrand is the gradient of log(s2 + g.v), so only the endpoints matter
