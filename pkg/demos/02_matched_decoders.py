"""Decoder curves matched to a path, and what slack does to the iteration.

A matched DEC curve traces the path exactly, so the receiver has no margin:
with zero slack it never leaves v = 1. A small slack opens a tunnel and the
iteration walks down to v = 0; a decoder that needs a bit more SNR than the
matched one gets stuck partway.

Run: python demos/02_matched_decoders.py [output_dir]
"""
import sys
from pathlib import Path

from msefield import MacChannel, evolve, make_straight_line, make_waypoint_path, matched_decs

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else None
ch = MacChannel.from_gains([1.0, 1.0])

for name, path in {
    "straight": make_straight_line(2),
    "bent": make_waypoint_path([[0.9, 0.4], [0.2, 0.1]]),
}.items():
    decs = matched_decs(ch, path)
    print(f"{name}: user 0 curve {decs[0]!r}")
    for slack in (0.0, 1e-3, 1e-2):
        traj = evolve(ch, decs, slack=slack)
        print(f"  slack={slack:<6g} converged={traj.converged!s:<5} iterations={traj.iterations_used:<5} "
              f"final v={traj.v[-1].round(6).tolist()}")
    degraded = [d.shifted(0.02) for d in decs]
    traj = evolve(ch, degraded, slack=1e-3)
    print(f"  shifted by 0.02: converged={traj.converged}, stuck at v={traj.v[-1].round(4).tolist()}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"dec_{name}_user0.csv").write_text(decs[0].to_csv())
        (out_dir / f"trajectory_{name}.csv").write_text(evolve(ch, decs, slack=1e-2).to_csv())
