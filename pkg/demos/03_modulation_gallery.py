"""The information-adding modifications: sinusoid and random-walk modulation.

Overlays the quadrature-sinusoid modulations (two fixed prime carrier
pairs) and both random-walk strengths on one contour. The sinusoids impose
a deterministic vibrato-like pattern; the walks wander smoothly and are
unique per recording, which is what makes them hard to undo.

Run from the repository root:  python demos/03_modulation_gallery.py
"""

from pathlib import Path

import numpy as np

from f0priv import ModifierSpec, apply
from f0priv.plotting import trajectory_svg
from f0priv.synth import random_trajectory

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

traj = random_trajectory(
    np.random.default_rng(21), n_frames=300, f0_low=130.0, f0_high=200.0, recording_id="demo"
)

sinusoid = [
    ("original", traj),
    ("modulated-same-1 (5, 11 Hz)", apply(ModifierSpec(kind="modulated-same-1"), traj)),
    ("modulated-same-2 (3, 7 Hz)", apply(ModifierSpec(kind="modulated-same-2"), traj)),
]
(OUT / "sinusoid_modulation.svg").write_text(trajectory_svg(sinusoid))

walks = [
    ("original", traj),
    ("random-walk-weak", apply(ModifierSpec(kind="random-walk-weak", seed=99), traj)),
    ("random-walk-strong", apply(ModifierSpec(kind="random-walk-strong", seed=99), traj)),
]
(OUT / "random_walk_modulation.svg").write_text(trajectory_svg(walks))

for label, mod in sinusoid[1:] + walks[1:]:
    mask = traj.voiced_mask & mod.voiced_mask
    ratio = mod.values[mask] / traj.values[mask]
    print(f"{label:32s} multiplier range [{ratio.min():.3f}, {ratio.max():.3f}]")

print(f"\nwrote {OUT / 'sinusoid_modulation.svg'} and {OUT / 'random_walk_modulation.svg'}")
