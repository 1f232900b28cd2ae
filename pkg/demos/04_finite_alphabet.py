"""QPSK against Gaussian signalling along the same decoding paths.

The finite-alphabet rate is accumulated over SNR with the QPSK MMSE curve;
with the Gaussian curve the same routine reproduces the closed-form rates.

Run: python demos/04_finite_alphabet.py
"""
import numpy as np

from msefield import GAUSSIAN, QPSK, MacChannel, make_sic_path, make_straight_line, mmse, rate_general_alphabet

print("MMSE curves:")
for rho in (0.1, 1.0, 3.0, 10.0):
    print(f"  rho={rho:5.1f}  gaussian={mmse(GAUSSIAN, rho):.6f}  qpsk={mmse(QPSK, rho):.6f}")

for gains in ([1.0, 1.0], [4.0, 4.0]):
    ch = MacChannel.from_gains(gains)
    print(f"\ng = {gains}")
    for name, p in {"straight": make_straight_line(2), "sic 0,1": make_sic_path([0, 1])}.items():
        g = rate_general_alphabet(ch, p, GAUSSIAN, units="bits")
        q = rate_general_alphabet(ch, p, QPSK, units="bits")
        print(f"  {name:<9} gaussian sum {g.sum:.4f} bits   qpsk sum {q.sum:.4f} bits")

single = MacChannel.from_gains([100.0])
print("\nsingle user at 20 dB, QPSK:", rate_general_alphabet(single, make_straight_line(1), QPSK, units="bits"))
