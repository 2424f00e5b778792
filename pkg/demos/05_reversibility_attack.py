"""Why shift-and-scale is a weak anonymizer: it inverts exactly.

An attacker who knows (or estimates) a speaker's original F0 statistics can
map a shifted-and-scaled contour straight back. The same attack against
random-walk modulation, even given the best possible affine undo fit by
least squares on the true original, leaves errors of tens of Hz.

Run from the repository root:  python demos/05_reversibility_attack.py
"""

import numpy as np

from f0priv import ModifierSpec, apply
from f0priv.modifiers import invert_shift_and_scale, shift_and_scale
from f0priv.synth import random_trajectory

rng = np.random.default_rng(11)

print(f"{'recording':>10s} {'shift-scale undo RMSE':>24s} {'best walk undo RMSE':>22s}")
for i in range(8):
    traj = random_trajectory(rng, n_frames=200, f0_low=110.0, f0_high=260.0, recording_id=f"utt{i}")
    voiced = traj.values[traj.voiced_mask]
    src_mean, src_std = float(np.mean(voiced)), float(np.std(voiced))

    mapped = shift_and_scale(traj, 200.0, 18.0)
    undone = invert_shift_and_scale(mapped, src_mean, src_std)
    rmse_affine = np.sqrt(np.mean((undone.values - traj.values) ** 2))

    walked = apply(ModifierSpec(kind="random-walk-strong", seed=2024), traj)
    both = traj.voiced_mask & walked.voiced_mask
    x, y = walked.values[both], traj.values[both]
    slope, intercept = np.polyfit(x, y, 1)
    rmse_walk = np.sqrt(np.mean((y - (intercept + slope * x)) ** 2))

    print(f"{traj.recording_id:>10s} {rmse_affine:24.2e} {rmse_walk:20.2f} Hz")

print("\nThe affine map is recovered to float precision; the walk is not.")
