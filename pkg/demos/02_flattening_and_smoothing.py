"""The information-removing modifications: flattening and spline smoothing.

Applies voiced-flat, all-flat and the smoothing spline to one synthetic
contour, shows what happens to each speaker-identifying statistic, and
renders an overlay plot. Flattening wipes the variance/skew/rise statistics
entirely; smoothing only attenuates them.

Run from the repository root:  python demos/02_flattening_and_smoothing.py
"""

from pathlib import Path

import numpy as np

from f0priv import ModifierSpec, apply, stats
from f0priv.plotting import trajectory_svg
from f0priv.synth import random_trajectory

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

traj = random_trajectory(
    np.random.default_rng(7), n_frames=350, f0_low=110.0, f0_high=220.0, recording_id="demo"
)

kinds = ("voiced-flat", "all-flat", "smoothing-spline")
modified = {kind: apply(ModifierSpec(kind=kind), traj) for kind in kinds}

header = f"{'statistic':16s} {'original':>10s} " + " ".join(f"{k:>16s}" for k in kinds)
print(header)
original_stats = stats(traj).to_dict()
per_kind = {kind: stats(m).to_dict() for kind, m in modified.items()}
for name, value in original_stats.items():
    row = f"{name:16s} {value:10.4f} "
    row += " ".join(f"{per_kind[k][name]:16.4f}" for k in kinds)
    print(row)

svg = trajectory_svg([("original", traj)] + [(k, modified[k]) for k in kinds])
path = OUT / "flattening_and_smoothing.svg"
path.write_text(svg)
print(f"\nwrote {path}")
