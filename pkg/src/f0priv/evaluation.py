"""Speaker-linkability scoring of F0 statistics and the metric suite.

A deterministic verification backend: each speaker is enrolled as the mean
statistics vector of their enrollment recordings, trials are scored by
negative Euclidean distance in a z-normalized statistics space, and score
sets are summarized by EER (percent), Cllr and Cllr-min (bits) under the
three attack scenarios:

    OO  original enrollment vs original trials (reference linkability)
    OA  original enrollment vs anonymized trials
    AA  separately anonymized enrollment and trials

Higher EER means less linkability between enrollment and trial sides.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .modifiers import ModifierSpec, apply
from .trajectory import F0Stats, F0Trajectory, stats

SCENARIOS = ("OO", "OA", "AA")

LN2 = float(np.log(2.0))

# Statistic dimensions whose spread across the enrollment population falls
# below this (relative) floor are left unscaled: they carry no speaker
# information, and dividing by float dust would amplify noise.
_STD_FLOOR = 1e-9

_REPORT_NOTES = (
    "pooled EER over all enrollment/trial speaker pairs; "
    "scores are negative Euclidean distances of z-normalized F0 statistics; "
    "cllr computed after affine logistic calibration fit on these scores; "
    "cllr_min via pool-adjacent-violators monotone recalibration"
)


class ScoringError(ValueError):
    """Raised when a corpus or score set cannot support the evaluation."""


@dataclass(frozen=True)
class Recording:
    speaker_id: str
    recording_id: str
    split: str  # enrollment | trial
    trajectory: F0Trajectory


@dataclass(frozen=True)
class SpeakerCorpus:
    recordings: tuple

    def __post_init__(self):
        object.__setattr__(self, "recordings", tuple(self.recordings))

    def violations(self) -> list[str]:
        problems = []
        seen = set()
        per_speaker: dict[str, set] = {}
        for rec in self.recordings:
            if rec.recording_id in seen:
                problems.append(f"duplicate recording_id {rec.recording_id!r}")
            seen.add(rec.recording_id)
            if rec.split not in ("enrollment", "trial"):
                problems.append(f"{rec.recording_id!r}: bad split {rec.split!r}")
                continue
            per_speaker.setdefault(rec.speaker_id, set()).add(rec.split)
        for speaker, splits in sorted(per_speaker.items()):
            missing = {"enrollment", "trial"} - splits
            for split in sorted(missing):
                problems.append(f"speaker {speaker!r} has no {split} recording")
        if not per_speaker:
            problems.append("empty corpus")
        return problems

    def split(self, which: str) -> list[Recording]:
        return [rec for rec in self.recordings if rec.split == which]


@dataclass(frozen=True)
class ScoreSet:
    """Labeled verification scores, higher = more likely same speaker."""

    target_scores: np.ndarray
    nontarget_scores: np.ndarray

    def __post_init__(self):
        for name in ("target_scores", "nontarget_scores"):
            arr = np.array(getattr(self, name), dtype=np.float64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def require_valid(self):
        if self.target_scores.size == 0 or self.nontarget_scores.size == 0:
            raise ScoringError("score set needs both target and nontarget scores")
        if not (
            np.all(np.isfinite(self.target_scores))
            and np.all(np.isfinite(self.nontarget_scores))
        ):
            raise ScoringError("scores must be finite")


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    eer_percent: float
    cllr_bits: float
    cllr_min_bits: float
    n_target: int
    n_nontarget: int
    notes: str = _REPORT_NOTES

    def to_json(self) -> str:
        return json.dumps(
            {
                "scenario": self.scenario,
                "eer_percent": self.eer_percent,
                "cllr_bits": self.cllr_bits,
                "cllr_min_bits": self.cllr_min_bits,
                "n_target": self.n_target,
                "n_nontarget": self.n_nontarget,
                "notes": self.notes,
            },
            indent=2,
        )


@dataclass(frozen=True)
class ZNorm:
    """Per-dimension normalization fit on the enrollment population."""

    mean: np.ndarray
    std: np.ndarray

    def __call__(self, vector: np.ndarray) -> np.ndarray:
        return (vector - self.mean) / self.std


def speaker_aggregate(stats_list: list[F0Stats]) -> F0Stats:
    """Per-speaker enrollment model: the field-wise mean of recording stats."""
    if not stats_list:
        raise ScoringError("empty enrollment for speaker aggregate")
    vectors = np.array([s.as_vector() for s in stats_list])
    mean = vectors.mean(axis=0)
    return F0Stats(*[float(v) for v in mean])


def fit_znorm(aggregates: list[F0Stats]) -> ZNorm:
    if not aggregates:
        raise ScoringError("empty enrollment population")
    vectors = np.array([a.as_vector() for a in aggregates])
    mean = vectors.mean(axis=0)
    std = vectors.std(axis=0)
    floor = _STD_FLOOR * np.maximum(1.0, np.abs(mean))
    std = np.where(std <= floor, 1.0, std)
    return ZNorm(mean=mean, std=std)


def score(enroll: F0Stats, trial: F0Stats, znorm: ZNorm) -> float:
    """Negative Euclidean distance between z-normalized statistics vectors."""
    if not enroll.complete or not trial.complete:
        raise ScoringError("cannot score recordings with absent statistics")
    return float(-np.linalg.norm(znorm(enroll.as_vector()) - znorm(trial.as_vector())))


def _roc_points(scores: ScoreSet) -> tuple[np.ndarray, np.ndarray]:
    # Operating points of the rule "accept if score >= threshold" for every
    # observed threshold, plus the all-reject endpoint.
    tar = np.sort(scores.target_scores)
    non = np.sort(scores.nontarget_scores)
    thresholds = np.unique(np.concatenate([tar, non]))
    far = (non.size - np.searchsorted(non, thresholds, side="left")) / non.size
    frr = np.searchsorted(tar, thresholds, side="left") / tar.size
    far = np.append(far, 0.0)
    frr = np.append(frr, 1.0)
    return far, frr


def eer(scores: ScoreSet) -> float:
    """Equal error rate in percent, folded to [0, 50] by symmetry.

    The false-accept and false-reject curves are swept over all observed
    scores; when they do not meet exactly, the crossing is linearly
    interpolated between the two adjacent operating points.
    """
    scores.require_valid()
    far, frr = _roc_points(scores)
    diff = far - frr  # non-increasing, starts at +1
    i = int(np.argmax(diff <= 0.0))
    if diff[i] == 0.0:
        rate = far[i]
    else:
        t = diff[i - 1] / (diff[i - 1] - diff[i])
        rate = far[i - 1] + t * (far[i] - far[i - 1])
    rate *= 100.0
    return float(min(rate, 100.0 - rate))


def _cllr_formula(target_llrs: np.ndarray, nontarget_llrs: np.ndarray) -> float:
    tar_cost = np.mean(np.logaddexp(0.0, -target_llrs)) / LN2
    non_cost = np.mean(np.logaddexp(0.0, nontarget_llrs)) / LN2
    return float(0.5 * (tar_cost + non_cost))


def cllr(scores: ScoreSet) -> float:
    """Log-likelihood-ratio cost in bits; scores are natural-log LLRs."""
    scores.require_valid()
    return _cllr_formula(scores.target_scores, scores.nontarget_scores)


def _pav_posteriors(values: np.ndarray, tar_weight: np.ndarray, counts: np.ndarray) -> np.ndarray:
    # Weighted pool-adjacent-violators fit of target fraction over groups
    # already sorted by score; equal scores must share a group so the result
    # is a function of the score.
    sums: list[float] = []
    totals: list[float] = []
    sizes: list[int] = []
    for t, c in zip(tar_weight, counts):
        sums.append(float(t))
        totals.append(float(c))
        sizes.append(1)
        while len(sums) >= 2 and sums[-2] * totals[-1] >= sums[-1] * totals[-2]:
            sums[-2] += sums[-1]
            totals[-2] += totals[-1]
            sizes[-2] += sizes[-1]
            sums.pop()
            totals.pop()
            sizes.pop()
    out = np.empty(len(values))
    start = 0
    for s_, t_, n_ in zip(sums, totals, sizes):
        out[start : start + n_] = s_ / t_
        start += n_
    return out


def pav_llrs(scores: ScoreSet) -> ScoreSet:
    """Optimal monotone recalibration of the pooled scores to LLRs.

    Pool-adjacent-violators yields the monotone maximum-likelihood posterior
    per score; subtracting the empirical prior log-odds converts it to an
    LLR. Degenerate blocks map to +/- infinity, which is safe inside
    :func:`cllr` because a block containing a target can never be all
    nontargets and vice versa.
    """
    scores.require_valid()
    tar, non = scores.target_scores, scores.nontarget_scores
    pooled = np.concatenate([tar, non])
    labels = np.concatenate([np.ones(tar.size), np.zeros(non.size)])
    uniq, inverse = np.unique(pooled, return_inverse=True)
    tar_per_group = np.bincount(inverse, weights=labels, minlength=uniq.size)
    count_per_group = np.bincount(inverse, minlength=uniq.size).astype(float)

    posterior = _pav_posteriors(uniq, tar_per_group, count_per_group)
    prior_log_odds = np.log(tar.size / non.size)
    with np.errstate(divide="ignore"):
        llr_per_group = np.log(posterior) - np.log1p(-posterior) - prior_log_odds
    llrs = llr_per_group[inverse]
    return ScoreSet(llrs[: tar.size], llrs[tar.size :])


def cllr_min(scores: ScoreSet) -> float:
    """Cllr after optimal monotone recalibration (discrimination loss only).

    The recalibrated LLRs may be infinite for perfectly separated score
    regions; the cost formula absorbs them exactly (a +inf target LLR costs
    nothing, and no block mixes an infinity with the wrong class).
    """
    recalibrated = pav_llrs(scores)
    return _cllr_formula(recalibrated.target_scores, recalibrated.nontarget_scores)


def affine_calibrate(scores: ScoreSet) -> ScoreSet:
    """Affine logistic calibration a*s + b minimizing Cllr, fit on the scores.

    The slope is constrained nonnegative so the calibrated cost can never
    undercut the monotone-recalibration optimum.
    """
    scores.require_valid()
    tar, non = scores.target_scores, scores.nontarget_scores
    pooled = np.concatenate([tar, non])
    center = float(np.mean(pooled))
    spread = float(np.std(pooled))
    if spread == 0.0:
        return ScoreSet(np.zeros(tar.size), np.zeros(non.size))
    st = (tar - center) / spread
    sn = (non - center) / spread

    def cost_grad(params):
        a, b = params
        ut = a * st + b
        un = a * sn + b
        value = 0.5 * (
            np.mean(np.logaddexp(0.0, -ut)) + np.mean(np.logaddexp(0.0, un))
        )
        gt = -expit(-ut)
        gn = expit(un)
        da = 0.5 * (np.mean(gt * st) + np.mean(gn * sn))
        db = 0.5 * (np.mean(gt) + np.mean(gn))
        return value, np.array([da, db])

    result = minimize(
        cost_grad,
        x0=np.array([1.0, 0.0]),
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, None), (None, None)],
    )
    a, b = result.x
    return ScoreSet(a * st + b, a * sn + b)


def score_corpus(
    enroll: list[tuple[str, F0Stats]], trials: list[tuple[str, F0Stats]]
) -> ScoreSet:
    """Score every (enrolled speaker, trial recording) pair.

    ``enroll`` holds per-recording enrollment stats; each speaker is modeled
    as their aggregate, and the z-normalization is fit over all enrollment
    recordings so within-speaker spread enters the per-dimension scale.
    """
    by_speaker: dict[str, list[F0Stats]] = {}
    for speaker, st in enroll:
        by_speaker.setdefault(speaker, []).append(st)
    speakers = sorted(by_speaker)
    if len(speakers) < 2:
        raise ScoringError("need at least 2 enrolled speakers for nontarget pairs")
    aggregates = {spk: speaker_aggregate(by_speaker[spk]) for spk in speakers}
    znorm = fit_znorm([st for _, st in enroll])

    target, nontarget = [], []
    for trial_speaker, trial_stats in trials:
        for spk in speakers:
            s = score(aggregates[spk], trial_stats, znorm)
            (target if spk == trial_speaker else nontarget).append(s)
    return ScoreSet(np.array(target), np.array(nontarget))


def _modified(recordings: list[Recording], spec: ModifierSpec, role: str) -> list[Recording]:
    role_spec = spec.for_role(role)
    return [
        Recording(r.speaker_id, r.recording_id, r.split, apply(role_spec, r.trajectory))
        for r in recordings
    ]


def run_scenario(
    corpus: SpeakerCorpus, spec: ModifierSpec | None, scenario: str
) -> ScenarioReport:
    """Evaluate one attack scenario on a corpus.

    OO ignores the modifier entirely; OA modifies the trial side with
    role=trial; AA additionally modifies the enrollment side with
    role=enrollment (so 'modulated-different' uses its two carrier pairs).
    """
    if scenario not in SCENARIOS:
        raise ScoringError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    problems = corpus.violations()
    if problems:
        raise ScoringError("corpus invariant violations: " + "; ".join(problems))
    if scenario != "OO" and spec is None:
        raise ScoringError(f"scenario {scenario} requires a modifier spec")

    enroll_recs = corpus.split("enrollment")
    trial_recs = corpus.split("trial")
    if scenario in ("OA", "AA"):
        trial_recs = _modified(trial_recs, spec, role="trial")
    if scenario == "AA":
        enroll_recs = _modified(enroll_recs, spec, role="enrollment")

    enroll_stats = [(r.speaker_id, stats(r.trajectory)) for r in enroll_recs]
    trial_stats = [(r.speaker_id, stats(r.trajectory)) for r in trial_recs]
    for speaker, st in enroll_stats + trial_stats:
        if not st.complete:
            raise ScoringError(
                f"recording of speaker {speaker!r} has absent statistics "
                "(fewer than 3 voiced frames)"
            )

    scores = score_corpus(enroll_stats, trial_stats)
    return ScenarioReport(
        scenario=scenario,
        eer_percent=eer(scores),
        cllr_bits=cllr(affine_calibrate(scores)),
        cllr_min_bits=cllr_min(scores),
        n_target=int(scores.target_scores.size),
        n_nontarget=int(scores.nontarget_scores.size),
    )
