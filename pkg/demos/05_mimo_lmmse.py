"""LMMSE front end for multi-antenna users.

Per-user SNR comes from the interference-plus-noise covariance; its
integrand is the gradient of log det R(v), so the sum rate is again path
independent and equals the log-det capacity.

Run: python demos/05_mimo_lmmse.py
"""
import numpy as np

from msefield import (
    MimoMacChannel,
    SingularSnrError,
    jacobi_gradient_check,
    lmmse_snr,
    log_det_gradient,
    make_sic_path,
    make_straight_line,
    mimo_rates_along_path,
    mimo_sum_rate,
    random_monotone_path,
)

rng = np.random.default_rng(3)


def cn(shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


ch = MimoMacChannel((cn((4, 2)), cn((4, 1)), cn((4, 2))), powers=[1.0, 2.0, 0.5], noise_var=0.5)
print(f"receive antennas {ch.num_rx}, transmit antennas per user {ch.num_tx}")
print(f"log-det sum capacity: {mimo_sum_rate(ch):.10f} nats")
print(f"log-det gradient S at v=1: {log_det_gradient(ch, np.ones(3)).round(4).tolist()}")
print(f"LMMSE SNR at v=0: {lmmse_snr(ch, np.zeros(3)).round(4).tolist()}")
# with several streams per user, v_k S_k can pass 1 and the SNR formula breaks down
try:
    lmmse_snr(ch, np.ones(3))
except SingularSnrError as exc:
    print(f"LMMSE SNR at v=1: {exc}")

for name, p in {
    "straight": make_straight_line(3),
    "sic 1,0,2": make_sic_path([1, 0, 2]),
    "random": random_monotone_path(3, 4, rng),
}.items():
    r = mimo_rates_along_path(ch, p)
    print(f"  {name:<10} per-user {r.per_user.round(5).tolist()}  sum {r.sum:.10f}")

print(f"\ntrace formula vs finite differences: {jacobi_gradient_check(ch, [0.3, 0.6, 0.8]):.2e}")
