"""F0 trajectory data model, statistics, alignment and CSV I/O.

A trajectory is a uniformly sampled pitch contour in Hz. The in-band value
0.0 marks unvoiced frames; voiced frames carry values of at least 40 Hz
(anything produced below that is treated as an impossible pitch and mapped
back to unvoiced by the modifier post-rules).
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Pitch values below this are not plausible F0 and are forced to unvoiced.
VOICED_MIN_HZ = 40.0

CSV_HEADER = "time_s,f0_hz"


class NoVoicedFramesError(ValueError):
    """Raised when an operation needs voiced frames and there are none."""


class AlignmentError(ValueError):
    """Raised when two contours share no voiced frames at any admissible lag."""


class CsvFormatError(ValueError):
    """Raised on malformed trajectory CSV input. Carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class F0Trajectory:
    """Uniformly sampled pitch contour; 0.0 encodes unvoiced frames.

    The constructor does not enforce value-level invariants so that broken
    data can still be loaded and inspected; use :func:`validate` to get a
    report of violations.
    """

    frame_hop: float
    values: np.ndarray
    recording_id: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_frames(self) -> int:
        return len(self.values)

    @property
    def voiced_mask(self) -> np.ndarray:
        return self.values > 0.0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_frames) * self.frame_hop

    def with_values(self, values: np.ndarray) -> "F0Trajectory":
        """Same frame grid and id, new pitch values."""
        return F0Trajectory(self.frame_hop, values, self.recording_id)


@dataclass(frozen=True)
class F0Stats:
    """Speaker-identifying statistics of one recording.

    All fields except ``voiced_fraction`` are ``None`` when the recording
    has fewer than 3 voiced frames (too few for a defined skewness).
    Conventions, fixed: ``log_f0_var`` is the unbiased sample variance and
    ``log_f0_skew`` the bias-corrected sample skewness of ln(F0) over voiced
    frames; both are 0 for a constant voiced contour.
    """

    voiced_mean_hz: float | None
    log_f0_mean: float | None
    log_f0_var: float | None
    log_f0_skew: float | None
    rise_rate_hz_s: float | None
    voiced_fraction: float

    FIELD_ORDER = (
        "voiced_mean_hz",
        "log_f0_mean",
        "log_f0_var",
        "log_f0_skew",
        "rise_rate_hz_s",
        "voiced_fraction",
    )

    @property
    def complete(self) -> bool:
        return all(getattr(self, name) is not None for name in self.FIELD_ORDER)

    def as_vector(self) -> np.ndarray:
        """The six statistics as a fixed-order vector; absent fields raise."""
        if not self.complete:
            raise ValueError("statistics vector undefined: absent fields present")
        return np.array([getattr(self, name) for name in self.FIELD_ORDER])

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELD_ORDER}


@dataclass(frozen=True)
class AlignmentResult:
    """Delay-compensated comparison of two contours."""

    lag_frames: int
    rmse_voiced_hz: float
    voicing_agreement: float


def validate(traj: F0Trajectory) -> list[str]:
    """Check trajectory invariants; returns a list of violations (empty = valid).

    Reports, never raises: non-positive frame hop, empty contour, non-finite
    values, negative values and voiced values below 40 Hz, each with the
    offending frame index.
    """
    problems: list[str] = []
    if not (traj.frame_hop > 0):
        problems.append(f"frame_hop must be positive, got {traj.frame_hop}")
    if traj.n_frames == 0:
        problems.append("empty trajectory")
        return problems
    values = traj.values
    for i in np.flatnonzero(~np.isfinite(values)):
        problems.append(f"non-finite at frame {i}")
    bad = np.isfinite(values) & ((values < 0.0) | ((values > 0.0) & (values < VOICED_MIN_HZ)))
    for i in np.flatnonzero(bad):
        v = values[i]
        if v < 0.0:
            problems.append(f"negative value {v:g} at frame {i}")
        else:
            problems.append(f"voiced value < {VOICED_MIN_HZ:g} Hz at frame {i}: {v:g}")
    return problems


def voiced_mean(traj: F0Trajectory) -> float:
    """Arithmetic mean of the voiced (> 0) frames in Hz."""
    voiced = traj.values[traj.voiced_mask]
    if voiced.size == 0:
        raise NoVoicedFramesError(f"no voiced frames in {traj.recording_id!r}")
    return float(np.mean(voiced))


def _sample_skewness(x: np.ndarray) -> float:
    # Bias-corrected (adjusted Fisher-Pearson) skewness; 0 for zero spread.
    # The explicit constant check matters: float dust in the mean would
    # otherwise turn identical samples into skewness +-1.
    if np.ptp(x) == 0.0:
        return 0.0
    n = x.size
    d = x - np.mean(x)
    m2 = np.mean(d**2)
    if m2 == 0.0:
        return 0.0
    g1 = np.mean(d**3) / m2**1.5
    return float(g1 * np.sqrt(n * (n - 1)) / (n - 2))


def _rise_rate(values: np.ndarray, frame_hop: float) -> float:
    # Mean of strictly positive F0 deltas between consecutive voiced frames,
    # in Hz per second; 0 when the contour never rises.
    voiced = values > 0.0
    both = voiced[:-1] & voiced[1:]
    deltas = np.diff(values)[both]
    rising = deltas[deltas > 0.0]
    if rising.size == 0:
        return 0.0
    return float(np.mean(rising) / frame_hop)


def stats(traj: F0Trajectory) -> F0Stats:
    """Compute the six speaker-identifying statistics of a trajectory.

    Recordings with fewer than 3 voiced frames get ``None`` for every field
    except ``voiced_fraction`` rather than a misleading 0.
    """
    mask = traj.voiced_mask
    voiced = traj.values[mask]
    fraction = float(voiced.size / traj.n_frames) if traj.n_frames else 0.0
    if voiced.size < 3:
        return F0Stats(None, None, None, None, None, fraction)
    log_f0 = np.log(voiced)
    constant = np.ptp(log_f0) == 0.0
    return F0Stats(
        voiced_mean_hz=float(np.mean(voiced)),
        log_f0_mean=float(np.mean(log_f0)),
        log_f0_var=0.0 if constant else float(np.var(log_f0, ddof=1)),
        log_f0_skew=_sample_skewness(log_f0),
        rise_rate_hz_s=_rise_rate(traj.values, traj.frame_hop),
        voiced_fraction=fraction,
    )


def _masked_centered(traj: F0Trajectory) -> np.ndarray:
    # Voiced frames centered on the voiced mean, unvoiced contributing 0.
    out = np.zeros(traj.n_frames)
    mask = traj.voiced_mask
    if mask.any():
        out[mask] = traj.values[mask] - np.mean(traj.values[mask])
    return out


def align(a: F0Trajectory, b: F0Trajectory, max_lag: int) -> AlignmentResult:
    """Find the delay of ``b`` relative to ``a`` and compare the aligned contours.

    The lag maximizing the cross-correlation of the mean-subtracted,
    voiced-masked contours is searched within ±``max_lag`` frames;
    correlation ties break toward the smaller |lag|. RMSE is computed over
    frames voiced in both contours after alignment, voicing agreement over
    the whole overlap.
    """
    if a.n_frames == 0 or b.n_frames == 0:
        raise ValueError("cannot align empty trajectories")
    if not np.isclose(a.frame_hop, b.frame_hop, rtol=1e-9, atol=0.0):
        raise ValueError(f"frame hops differ: {a.frame_hop} vs {b.frame_hop}")
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")

    xa = _masked_centered(a)
    xb = _masked_centered(b)
    va = a.voiced_mask
    vb = b.voiced_mask

    candidates = []
    for lag in range(-max_lag, max_lag + 1):
        # b[i] ~ a[i - lag]: compare a[i] against b[i + lag].
        a_lo, a_hi = max(0, -lag), min(a.n_frames, b.n_frames - lag)
        if a_hi <= a_lo:
            continue
        sa = slice(a_lo, a_hi)
        sb = slice(a_lo + lag, a_hi + lag)
        overlap_voiced = va[sa] & vb[sb]
        if not overlap_voiced.any():
            continue
        corr = float(np.dot(xa[sa], xb[sb]))
        candidates.append((corr, abs(lag), lag, sa, sb, overlap_voiced))
    if not candidates:
        raise AlignmentError("no overlapping voiced frames at any lag")

    # Max correlation; among ties the smallest |lag| (tuple order does it).
    corr, _, lag, sa, sb, overlap_voiced = max(
        candidates, key=lambda c: (c[0], -c[1])
    )
    diff = a.values[sa][overlap_voiced] - b.values[sb][overlap_voiced]
    rmse = float(np.sqrt(np.mean(diff**2)))
    agreement = float(np.mean(va[sa] == vb[sb]))
    return AlignmentResult(lag_frames=lag, rmse_voiced_hz=rmse, voicing_agreement=agreement)


def write_f0_csv(traj: F0Trajectory, path) -> None:
    """Write ``time_s,f0_hz`` rows, 6 decimals, LF endings, UTF-8."""
    path = Path(path)
    lines = [CSV_HEADER]
    hop = traj.frame_hop
    lines.extend(f"{i * hop:.6f},{v:.6f}" for i, v in enumerate(traj.values))
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def read_f0_csv(path, recording_id: str | None = None, frame_hop: float | None = None) -> F0Trajectory:
    """Read a trajectory CSV written by :func:`write_f0_csv`.

    The frame hop is inferred from the time column, which needs at least two
    rows; pass ``frame_hop`` explicitly to read single-row files. The
    recording id defaults to the file stem.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise CsvFormatError("missing header", line=1)
    if lines[0].strip() != CSV_HEADER:
        raise CsvFormatError(f"expected header {CSV_HEADER!r}, got {lines[0]!r}", line=1)

    times: list[float] = []
    values: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise CsvFormatError(f"expected 2 columns, got {len(fields)}", line=lineno)
        try:
            t = float(fields[0])
            v = float(fields[1])
        except ValueError as exc:
            raise CsvFormatError(str(exc), line=lineno) from None
        times.append(t)
        values.append(v)

    if not values:
        raise CsvFormatError("empty trajectory: no data rows", line=len(lines))
    if frame_hop is None:
        if len(times) < 2:
            raise CsvFormatError(
                "cannot infer frame hop from a single row; pass frame_hop", line=2
            )
        frame_hop = times[1] - times[0]
        if frame_hop <= 0:
            raise CsvFormatError(f"non-increasing time column (hop {frame_hop:g})", line=3)
        steps = np.diff(times)
        off = np.abs(steps - frame_hop)
        if np.any(off > 2e-6):
            bad = int(np.argmax(off > 2e-6))
            raise CsvFormatError("non-uniform time steps", line=bad + 3)

    if recording_id is None:
        recording_id = path.stem
    return F0Trajectory(frame_hop=frame_hop, values=np.array(values), recording_id=recording_id)
