"""Command-line driver: one JSON config per run, CSV/JSON artifacts out.

Subcommands: scan | spectrum | edge | sample. Every output file carries the
sha256 hash of the resolved config and the tool version, so identical
configs reproduce identical bytes. Exit codes: 0 success, 1 numerical
failure, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

import blockspec
from blockspec.blocks import (
    BlockLibrary,
    BlockSequence,
    ValidationError,
    expand_blocks,
    pseudo_ergodic_word,
    sample_iid,
    standard_library,
)
from blockspec.classify import Verdict, scan
from blockspec.edge import EdgeModeError, edge_mode_fixture, find_edge_modes
from blockspec.eigen import EigensolverError
from blockspec.finite import finite_spectrum, inclusion_check
from blockspec.projective import NotHyperbolicError

__all__ = ["main", "cmd_scan", "cmd_spectrum", "cmd_edge", "cmd_sample"]

_NUMERICAL_ERRORS = (
    EigensolverError,
    EdgeModeError,
    NotHyperbolicError,
    FloatingPointError,
)


class ConfigError(Exception):
    pass


def _load_config(path: str) -> tuple[dict, str]:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return config, digest


def _load_library(config: dict) -> BlockLibrary:
    if "fixture" in config and config["fixture"]:
        return edge_mode_fixture()["library"]
    if "library" in config:
        spec = config["library"]
        if spec == "standard":
            return standard_library()
    elif "library_path" in config:
        try:
            spec = json.loads(Path(config["library_path"]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load library file: {exc}") from exc
    else:
        raise ConfigError("config needs 'library', 'library_path', or 'fixture'")
    try:
        return BlockLibrary.from_dict(spec)
    except (ValidationError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid library spec: {exc}") from exc


def _load_sequence(config: dict, library: BlockLibrary, key: str = "sequence"):
    if "fixture" in config and config["fixture"]:
        return edge_mode_fixture()["sequence"]
    spec = config.get(key)
    if spec is None:
        raise ConfigError(f"config needs '{key}'")
    if isinstance(spec, list):
        seq = BlockSequence(tuple(spec), "explicit")
    elif isinstance(spec, dict) and "iid" in spec:
        params = spec["iid"]
        seq = sample_iid(library, int(params["m"]), int(params.get("seed", 0)))
    elif isinstance(spec, dict) and "periodic" in spec:
        params = spec["periodic"]
        seq = BlockSequence(
            (int(params["block"]),) * int(params["m"]), "periodic"
        )
    else:
        raise ConfigError(f"'{key}' must be a list of indices or iid/periodic spec")
    try:
        seq.validate(library)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    return seq


def _out_dir(config: dict, args) -> Path:
    out = Path(args.output_dir or config.get("output_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(digest: str) -> dict:
    return {"config_hash": digest, "version": blockspec.__version__}


def _meta_comment(digest: str) -> str:
    return f"config_hash={digest} version={blockspec.__version__}"


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_scan(config: dict, digest: str, args) -> None:
    library = _load_library(config)
    lo = float(config.get("lambda_min", 0.0))
    hi = float(config.get("lambda_max", 4.0))
    grid = int(config.get("grid", 1000))
    report = scan(library, lo, hi, grid=grid)
    out = _out_dir(config, args)
    report.to_csv(out / "bands.csv", meta_comment=_meta_comment(digest))
    report.to_json(out / "bands.json", meta=_meta(digest))
    if args.verbose:
        for iv in report.intervals:
            print(f"[{iv.lo:.12g}, {iv.hi:.12g}] {iv.verdict.value}")


def cmd_spectrum(config: dict, digest: str, args) -> None:
    library = _load_library(config)
    m = int(config.get("M", 100))
    seeds = [int(s) for s in config.get("seeds", [0])]
    tolerance = float(config.get("tolerance", 1e-8))
    if m < 0:
        raise ConfigError("M must be >= 0")

    def run(seed: int):
        if m == 0:
            return seed, None, None
        seq = sample_iid(library, m, seed)
        result = finite_spectrum(library, seq)
        return seed, result, None

    workers = max(1, args.threads)
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, seeds))
    else:
        runs = [run(seed) for seed in seeds]

    report = None
    rows = []
    for seed, result, _ in sorted(runs, key=lambda t: t[0]):
        if result is None:
            continue
        vals = result.spectrum.eigenvalues
        if report is None or vals[-1] > report.intervals[-1].hi:
            report = scan(library, 0.0, float(vals[-1]) * 1.05 + 0.1,
                          grid=int(config.get("scan_grid", 500)))
        incl = inclusion_check(result, report, tolerance=tolerance)
        for i, lam in enumerate(vals):
            rows.append(
                (seed, m, i, repr(float(lam)), repr(float(incl.distances[i])),
                 int(i in incl.flags))
            )
    out = _out_dir(config, args)
    with open(out / "spectrum.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {_meta_comment(digest)}\r\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "M", "index", "lambda", "distance_to_sigma", "flag"])
        writer.writerows(rows)
    flagged = sum(r[5] for r in rows)
    _write_json(out / "spectrum.json", {
        **_meta(digest),
        "seeds": seeds,
        "M": m,
        "rows": len(rows),
        "flagged": flagged,
        # a flag can err conservatively on either side: gaps enter Sigma's
        # complement only where certified, edge sets only where detected
        "flag_semantics": "eigenvalue farther than tolerance from "
        "(non-certified-gap intervals + detected edge modes)",
        "tolerance": tolerance,
    })
    if args.verbose:
        print(f"{len(rows)} eigenvalues, {flagged} flagged")


def cmd_edge(config: dict, digest: str, args) -> None:
    library = _load_library(config)
    seq = _load_sequence(config, library)
    grid = int(config.get("grid", 200))
    truncation = int(config.get("truncation", 400))
    if "gap" in config:
        gaps = [(float(config["gap"][0]), float(config["gap"][1]))]
    else:
        lo = float(config.get("lambda_min", 0.0))
        hi = float(config.get("lambda_max", 4.0))
        report = scan(library, lo, hi, grid=int(config.get("scan_grid", 500)))
        margin = float(config.get("gap_margin", 1e-3))
        gaps = []
        for iv in report.intervals_with(Verdict.CERTIFIED_GAP):
            width = iv.hi - iv.lo
            if width >= float(config.get("min_gap_width", 0.05)):
                gaps.append((iv.lo + margin * width, iv.hi - margin * width))
    try:
        all_modes = [
            (gap, find_edge_modes(library, seq, gap, grid=grid,
                                  truncation=truncation))
            for gap in gaps
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(config, args)
    entries = []
    k = 0
    for gap, modes in all_modes:
        for mode in modes:
            vec_path = out / f"edge_vector_{k}.csv"
            with open(vec_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(f"# {_meta_comment(digest)}\r\n")
                writer = csv.writer(fh)
                writer.writerow(["index", "value"])
                for i, v in enumerate(mode.eigenvector):
                    writer.writerow([i, repr(float(v))])
            entries.append({
                "lambda": mode.lam,
                "residual": mode.indicator_residual,
                "decay_rate": mode.decay_rate,
                "gap": [gap[0], gap[1]],
                "eigenvector_csv": vec_path.name,
            })
            k += 1
    _write_json(out / "edge_modes.json", {**_meta(digest), "modes": entries})
    if args.verbose:
        print(f"{len(entries)} edge mode(s) in {len(gaps)} gap(s)")


def cmd_sample(config: dict, digest: str, args) -> None:
    library = _load_library(config)
    m = int(config.get("M", 100))
    kind = config.get("kind", "iid")
    seeds = [int(s) for s in config.get("seeds", [0])]
    sequences = []
    if kind == "iid":
        for seed in seeds:
            sequences.append((seed, sample_iid(library, m, seed)))
    elif kind == "pseudo_ergodic":
        order = int(config.get("order", 2))
        sequences.append((None, pseudo_ergodic_word(library.num_blocks, order)))
    else:
        raise ConfigError(f"unknown sample kind: {kind!r}")
    out = _out_dir(config, args)
    with open(out / "samples.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {_meta_comment(digest)}\r\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "position", "block_index"])
        for seed, seq in sequences:
            for pos, idx in enumerate(seq.indices):
                writer.writerow(["" if seed is None else seed, pos, idx])
    _write_json(out / "samples.json", {
        **_meta(digest),
        "kind": kind,
        "sequences": [
            {"seed": seed, "provenance": seq.provenance,
             "num_blocks": len(seq),
             "num_resonators": len(expand_blocks(library, seq).resonators),
             "indices": list(seq.indices)}
            for seed, seq in sequences
        ],
    })
    if args.verbose:
        print(f"wrote {len(sequences)} sequence(s)")


_COMMANDS = {
    "scan": cmd_scan,
    "spectrum": cmd_spectrum,
    "edge": cmd_edge,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockspec",
        description="Spectra of block-disordered subwavelength resonator chains",
    )
    parser.add_argument("--version", action="version", version=blockspec.__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a JSON run configuration")
        p.add_argument("--output-dir", default=None, help="override output directory")
        p.add_argument("--threads", type=int, default=1, help="worker thread count")
        p.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    try:
        config, digest = _load_config(args.config)
        _COMMANDS[args.command](config, digest, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
