"""Extract a pitch contour from synthesized audio and plot it.

Builds a speech-like test signal (a tone with slow vibrato, a silent gap,
then a second tone), runs the autocorrelation tracker, prints the
speaker-identifying statistics and renders the contour to SVG.

Run from the repository root:  python demos/01_extract_pitch_from_audio.py
"""

from pathlib import Path

import numpy as np

from f0priv import AudioBuffer, extract_f0, stats, write_f0_csv
from f0priv.plotting import trajectory_svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

sr = 16000


def vibrato_tone(center_hz, vibrato_hz, depth_hz, duration):
    t = np.arange(int(sr * duration)) / sr
    freq = center_hz + depth_hz * np.sin(2 * np.pi * vibrato_hz * t)
    phase = 2 * np.pi * np.cumsum(freq) / sr
    return 0.4 * np.sin(phase)


signal = np.concatenate(
    [
        vibrato_tone(160.0, 3.0, 20.0, 1.2),
        np.zeros(int(0.4 * sr)),
        vibrato_tone(220.0, 2.0, 12.0, 0.8),
    ]
)
audio = AudioBuffer(sr, signal)

traj = extract_f0(audio, recording_id="demo_utterance")
print(f"extracted {traj.n_frames} frames at {traj.frame_hop * 1000:.0f} ms hop")

st = stats(traj)
print("speaker-identifying statistics:")
for name, value in st.to_dict().items():
    print(f"  {name:16s} {value:.4f}" if value is not None else f"  {name:16s} undefined")

csv_path = OUT / "demo_utterance.csv"
write_f0_csv(traj, csv_path)
svg_path = OUT / "extracted_contour.svg"
svg_path.write_text(trajectory_svg([("extracted F0", traj)]))
print(f"wrote {csv_path} and {svg_path}")
