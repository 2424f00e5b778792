"""Command-line pipeline: extract, modify, stats, eval, plot.

Exit codes are a stable contract for scripting: 0 success, 1 internal
failure, 2 usage or validation error. All machine-readable output is JSON;
plots are SVG. Commands never mutate their inputs and write outputs
atomically, so reruns with the same flags and seed are byte-identical.
"""

import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import __version__
from .evaluation import SCENARIOS, Recording, SpeakerCorpus, run_scenario
from .modifiers import (
    KINDS,
    MODULATION_BAND_HZ,
    ROLES,
    ModifierSpec,
    SpecError,
    apply,
)
from .pitch import PitchConfig, extract_f0, read_wav
from .plotting import trajectory_svg
from .trajectory import read_f0_csv, stats, validate

RUN_CONFIG_KEYS = {"modifier", "seed", "input_dir", "output_dir", "pitch"}
PITCH_KEYS = {f.name for f in dataclasses.fields(PitchConfig)}


def _load_run_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config {path}: invalid JSON ({exc})")
    if not isinstance(data, dict):
        raise click.UsageError(f"config {path}: expected a JSON object")
    unknown = set(data) - RUN_CONFIG_KEYS
    if unknown:
        raise click.UsageError(f"config {path}: unknown keys {sorted(unknown)}")
    pitch = data.get("pitch") or {}
    bad = set(pitch) - PITCH_KEYS
    if bad:
        raise click.UsageError(f"config {path}: unknown pitch keys {sorted(bad)}")
    return data


def _pitch_config(config: dict, frame_len, frame_hop, f_min, f_max, voicing_threshold) -> PitchConfig:
    merged = dict(config.get("pitch") or {})
    overrides = {
        "frame_len": frame_len,
        "frame_hop": frame_hop,
        "f_min": f_min,
        "f_max": f_max,
        "voicing_threshold": voicing_threshold,
    }
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PitchConfig(**merged)
    except TypeError as exc:
        raise click.UsageError(str(exc))


def _modifier_spec(
    config: dict, kind, role, seed, strength, f1, f2, target_mean, target_std,
    per_side_roles: bool = False,
):
    base = dict(config.get("modifier") or {})
    if kind is not None:
        base["kind"] = kind
    if role is not None:
        base["role"] = role
    if seed is not None:
        base["seed"] = seed
    elif "seed" not in base and config.get("seed") is not None:
        base["seed"] = config["seed"]
    if strength is not None:
        base["strength"] = strength
    if f1 is not None:
        base["f1_hz"] = f1
    if f2 is not None:
        base["f2_hz"] = f2
    if target_mean is not None:
        base["target_mean_hz"] = target_mean
    if target_std is not None:
        base["target_std_hz"] = target_std
    if base.get("kind") is None:
        return None
    try:
        if per_side_roles and base.get("role") is None:
            # Scenario evaluation assigns enrollment/trial roles per corpus
            # side; validate with a placeholder but keep the spec roleless.
            ModifierSpec.from_dict({**base, "role": "trial"})
            spec = ModifierSpec(**base)
        else:
            spec = ModifierSpec.from_dict(base)
    except SpecError as exc:
        raise click.UsageError(str(exc))
    _warn_band(spec)
    return spec


def _warn_band(spec: ModifierSpec) -> None:
    if spec.f1_hz is None:
        return
    lo, hi = MODULATION_BAND_HZ
    f1, f2 = spec.f1_hz, spec.f2_hz
    checks = {"f1": f1, "f2": f2, "f1+f2": f1 + f2, "|f1-f2|": abs(f1 - f2)}
    for name, value in checks.items():
        if not lo <= value <= hi:
            click.echo(
                f"warning: {name} = {value:g} Hz is outside the {lo:g}-{hi:g} Hz band "
                "most tied to speaker identity",
                err=True,
            )


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".tmp-{path.name}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _csv_bytes(traj) -> bytes:
    hop = traj.frame_hop
    lines = ["time_s,f0_hz"]
    lines.extend(f"{i * hop:.6f},{v:.6f}" for i, v in enumerate(traj.values))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _guard_not_input(out_path: Path, in_path: Path) -> None:
    if out_path.resolve() == in_path.resolve():
        raise ValueError(f"refusing to overwrite input {in_path}")


def _resolve_inputs(inputs, config: dict) -> list[Path]:
    root = config.get("input_dir")
    paths = []
    for item in inputs:
        p = Path(item)
        if root and not p.is_absolute():
            p = Path(root) / p
        paths.append(p)
    return paths


def _out_dir(out, config: dict) -> Path:
    if out is None:
        out = config.get("output_dir", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_manifest(path) -> list[dict]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"manifest {path}: invalid JSON ({exc})")
    if not isinstance(data, dict) or "entries" not in data:
        raise click.UsageError(f"manifest {path}: expected an object with an 'entries' list")
    entries = data["entries"]
    problems = []
    seen_ids = set()
    root = Path(path).parent
    required = {"speaker_id", "recording_id", "split", "path"}
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or set(entry) != required:
            problems.append(f"entry {i}: must have exactly the keys {sorted(required)}")
            continue
        if entry["split"] not in ("enrollment", "trial"):
            problems.append(f"entry {i}: bad split {entry['split']!r}")
        if entry["recording_id"] in seen_ids:
            problems.append(f"entry {i}: duplicate recording_id {entry['recording_id']!r}")
        seen_ids.add(entry["recording_id"])
        file_path = Path(entry["path"])
        if not file_path.is_absolute():
            file_path = root / file_path
        if not file_path.exists():
            problems.append(f"entry {i}: path does not exist: {file_path}")
        entry = dict(entry)
        entry["path"] = file_path
        entries[i] = entry
    if problems:
        for p in problems:
            click.echo(f"manifest error: {p}", err=True)
        sys.exit(2)
    return entries


def _load_trajectory(path: Path, pitch_cfg: PitchConfig, recording_id: str):
    if path.suffix.lower() == ".wav":
        return extract_f0(read_wav(path), pitch_cfg, recording_id=recording_id)
    return read_f0_csv(path, recording_id=recording_id)


@click.group()
@click.version_option(version=__version__, prog_name="f0priv")
def cli():
    """Pitch-contour anonymization toolkit."""


@cli.command("extract")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--frame-len", type=float, default=None, help="Analysis window in seconds.")
@click.option("--frame-hop", type=float, default=None, help="Hop between frames in seconds.")
@click.option("--f-min", type=float, default=None, help="Lowest trackable F0 in Hz.")
@click.option("--f-max", type=float, default=None, help="Highest trackable F0 in Hz.")
@click.option("--voicing-threshold", type=float, default=None, help="Peak correlation needed to call a frame voiced.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def cmd_extract(inputs, out, frame_len, frame_hop, f_min, f_max, voicing_threshold, config):
    """Extract F0 trajectories from WAV files (or a manifest) to CSV."""
    run_config = _load_run_config(config)
    pitch_cfg = _pitch_config(run_config, frame_len, frame_hop, f_min, f_max, voicing_threshold)
    out_dir = _out_dir(out, run_config)

    jobs: list[tuple[Path, str]] = []  # (wav path, recording id)
    failures = 0
    for path in _resolve_inputs(inputs, run_config):
        if path.suffix.lower() == ".json":
            for entry in _load_manifest(path):
                jobs.append((entry["path"], entry["recording_id"]))
        else:
            jobs.append((path, path.stem))

    for wav_path, rid in jobs:
        target = out_dir / f"{rid}.csv"
        try:
            _guard_not_input(target, wav_path)
            traj = extract_f0(read_wav(wav_path), pitch_cfg, recording_id=rid)
            _atomic_write(target, _csv_bytes(traj))
        except (OSError, ValueError) as exc:
            click.echo(f"error: {wav_path}: {exc}", err=True)
            failures += 1
            continue
        click.echo(f"{wav_path} -> {target}")
    if failures:
        sys.exit(2)


@cli.command("modify")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--kind", type=click.Choice(KINDS), default=None, help="Which modification to apply.")
@click.option("--role", type=click.Choice(ROLES), default=None, help="Dataset role for modulated-different.")
@click.option("--seed", type=int, envvar="F0PRIV_SEED", default=None, help="Seed for the random-walk kinds.")
@click.option("--strength", type=click.IntRange(1, 2), default=None, help="Random-walk strength override (1 weak, 2 strong).")
@click.option("--f1", type=float, default=None, help="First carrier frequency override in Hz.")
@click.option("--f2", type=float, default=None, help="Second carrier frequency override in Hz.")
@click.option("--target-mean", type=float, default=None, help="shift-and-scale target mean in Hz.")
@click.option("--target-std", type=float, default=None, help="shift-and-scale target std in Hz.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--jobs", type=click.IntRange(1, 64), default=1, help="Parallel workers over input files.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def cmd_modify(inputs, kind, role, seed, strength, f1, f2, target_mean, target_std, out, jobs, config):
    """Apply one modification to trajectory CSV files."""
    run_config = _load_run_config(config)
    spec = _modifier_spec(run_config, kind, role, seed, strength, f1, f2, target_mean, target_std)
    if spec is None:
        raise click.UsageError("no modifier kind given (use --kind or a config file)")
    out_dir = _out_dir(out, run_config)
    paths = _resolve_inputs(inputs, run_config)

    def process(path: Path):
        target = out_dir / path.name
        try:
            _guard_not_input(target, path)
            traj = read_f0_csv(path)
            modified = apply(spec, traj)
            problems = validate(modified)
            if problems:
                raise ValueError("output failed validation: " + "; ".join(problems))
            _atomic_write(target, _csv_bytes(modified))
            return path, target, None
        except (OSError, ValueError) as exc:
            return path, target, exc

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(process, paths))

    failures = 0
    for path, target, error in results:
        if error is not None:
            click.echo(f"error: {path}: {error}", err=True)
            failures += 1
        else:
            click.echo(f"{path} -> {target}")

    sidecar = {
        "tool": "f0priv",
        "tool_version": __version__,
        "spec": spec.to_dict(),
        "seed": spec.seed,
        "inputs": [p.name for p in paths],
    }
    _atomic_write(out_dir / "sidecar.json", (json.dumps(sidecar, indent=2) + "\n").encode("utf-8"))
    if failures:
        sys.exit(2)


@cli.command("stats")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
def cmd_stats(inputs, out):
    """Per-recording speaker-identifying statistics as JSON (null = undefined)."""
    reports = []
    failures = 0
    for item in inputs:
        path = Path(item)
        try:
            traj = read_f0_csv(path)
        except (OSError, ValueError) as exc:
            click.echo(f"error: {path}: {exc}", err=True)
            failures += 1
            continue
        st = stats(traj)
        reports.append(
            {
                "recording_id": traj.recording_id,
                "n_frames": traj.n_frames,
                "frame_hop": traj.frame_hop,
                "stats": st.to_dict(),
            }
        )
    text = json.dumps(reports, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        _atomic_write(Path(out), text.encode("utf-8"))
    if failures:
        sys.exit(2)


@cli.command("eval")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--scenario", type=click.Choice(SCENARIOS), required=True)
@click.option("--kind", type=click.Choice(KINDS), default=None)
@click.option("--seed", type=int, envvar="F0PRIV_SEED", default=None)
@click.option("--strength", type=click.IntRange(1, 2), default=None)
@click.option("--f1", type=float, default=None)
@click.option("--f2", type=float, default=None)
@click.option("--target-mean", type=float, default=None)
@click.option("--target-std", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here instead of stdout.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
def cmd_eval(manifest, scenario, kind, seed, strength, f1, f2, target_mean, target_std, out, config):
    """Score a corpus under one attack scenario and report EER/Cllr."""
    run_config = _load_run_config(config)
    spec = _modifier_spec(
        run_config, kind, None, seed, strength, f1, f2, target_mean, target_std,
        per_side_roles=True,
    )
    if scenario != "OO" and spec is None:
        raise click.UsageError(f"scenario {scenario} needs a modifier (--kind ...)")
    pitch_cfg = _pitch_config(run_config, None, None, None, None, None)

    entries = _load_manifest(Path(manifest))
    recordings = []
    failures = 0
    for entry in entries:
        try:
            traj = _load_trajectory(entry["path"], pitch_cfg, entry["recording_id"])
        except (OSError, ValueError) as exc:
            click.echo(f"error: {entry['path']}: {exc}", err=True)
            failures += 1
            continue
        recordings.append(
            Recording(entry["speaker_id"], entry["recording_id"], entry["split"], traj)
        )
    if failures:
        sys.exit(2)

    corpus = SpeakerCorpus(tuple(recordings))
    problems = corpus.violations()
    if problems:
        for p in problems:
            click.echo(f"corpus error: {p}", err=True)
        sys.exit(2)

    try:
        report = run_scenario(corpus, spec, scenario)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    text = report.to_json() + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        _atomic_write(Path(out), text.encode("utf-8"))


@cli.command("plot")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default="plot.svg", help="Output SVG path.")
def cmd_plot(inputs, out):
    """Overlay trajectories in a self-contained SVG (unvoiced frames = gaps)."""
    named = []
    for item in inputs:
        path = Path(item)
        try:
            traj = read_f0_csv(path)
        except (OSError, ValueError) as exc:
            click.echo(f"error: {path}: {exc}", err=True)
            sys.exit(2)
        named.append((path.stem, traj))

    hops = {round(traj.frame_hop, 9) for _, traj in named}
    if len(hops) > 1:
        click.echo(
            "warning: trajectories have different frame hops; plotting on a common time axis",
            err=True,
        )
    try:
        svg = trajectory_svg(named)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _atomic_write(Path(out), svg.encode("utf-8"))
    click.echo(f"wrote {out}")


def main():
    cli(prog_name="f0priv")


if __name__ == "__main__":
    main()
