"""Command-line interface: ``ciugraph <command> ...``.

Exit codes: 0 success, 1 every batch row failed, 2 unreadable or malformed
input, 3 bad configuration (lexicon, coordinates, lemma rules, metadata
schema, synth spec).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .errors import CiuGraphError, ConfigError, GraphSchemaError, InputError, SchemaError, UnknownCiuId
from .features import FeatureVector, features_csv, read_features_csv
from .graph import SvgOptions, build_graph, from_json as graph_from_json, render_svg, to_dot, to_json as graph_to_json
from .lexicon import CiuSequence
from .pipeline import Resources, RunConfig, detect_format, features_for, parse_transcript, extract
from .stats import ancova_csv, ancova_table, join_records, read_metadata
from .synth import SynthSpec, generate_cohort, write_cohort

log = logging.getLogger("ciugraph")

EXIT_OK, EXIT_ALL_FAILED, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3


# ---------------------------------------------------------------- helpers

def _config(args) -> RunConfig:
    return RunConfig(
        lexicon_path=args.lexicon,
        coords_path=args.coords,
        lemma_rules_path=args.lemma_rules,
        input_format=args.format,
        participant_tier=args.participant_tier,
        include_low_precision=args.include_low_precision,
    )


def _resources(config: RunConfig) -> Resources:
    try:
        return Resources.load(config)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file: {exc}") from exc


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


def _input_path(args) -> str | None:
    return args.input if args.input is not None else args.input_pos


def _transcript_id(path: str | None, explicit: str | None) -> str:
    if explicit:
        return explicit
    return Path(path).stem if path and path != "-" else "stdin"


def _sequence_from_json(data: bytes, res: Resources) -> CiuSequence:
    try:
        doc = json.loads(data)
        ids = [int(c) for c in doc["sequence"]]
        tid = str(doc.get("transcript_id", ""))
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError, ValueError) as exc:
        raise GraphSchemaError(f"not a CIU sequence document: {exc}") from exc
    try:
        return CiuSequence.from_ids(tid, ids, res.lexicon)
    except UnknownCiuId as exc:
        raise GraphSchemaError(str(exc)) from exc


def _looks_like_json(path: str | None, data: bytes) -> bool:
    if path and path.lower().endswith(".json"):
        return True
    return data.lstrip()[:1] == b"{"


def _sequence_json(seq: CiuSequence) -> str:
    return json.dumps(seq.to_dict(), indent=1, ensure_ascii=False) + "\n"


def _feature_output(fv: FeatureVector, as_csv: bool) -> str:
    if as_csv:
        return features_csv([fv])
    return fv.to_json() + "\n"


# ---------------------------------------------------------------- commands

def cmd_extract(args) -> int:
    res = _resources(_config(args))
    path = _input_path(args)
    data = _read_input(path)
    fmt = detect_format(path or "", args.format)
    transcript = parse_transcript(data, _transcript_id(path, args.id), fmt, res.config.participant_tier)
    seq = extract(transcript, res)
    if not seq.matches:
        log.warning("%s: no CIUs found", transcript.id)
    _write_output(_sequence_json(seq), args.out)
    return EXIT_OK


def cmd_features(args) -> int:
    res = _resources(_config(args))
    path = _input_path(args)
    data = _read_input(path)
    if args.format is None and _looks_like_json(path, data):
        seq = _sequence_from_json(data, res)
        if args.id:
            seq = CiuSequence(args.id, seq.matches)
    else:
        fmt = detect_format(path or "", args.format)
        transcript = parse_transcript(data, _transcript_id(path, args.id), fmt, res.config.participant_tier)
        seq = extract(transcript, res)
    fv = features_for(seq, res)
    if fv.is_empty:
        log.warning("%s: empty CIU sequence; all features are null", seq.transcript_id)
    _write_output(_feature_output(fv, args.csv), args.out)
    return EXIT_OK


_WORKER_RES: Resources | None = None


def _init_worker(config: RunConfig) -> None:
    global _WORKER_RES
    _WORKER_RES = Resources.load(config)


def _batch_row(row: tuple[str, str]) -> tuple[str, FeatureVector | None, str | None]:
    rid, path = row
    res = _WORKER_RES
    try:
        data = Path(path).read_bytes()
        fmt = detect_format(path, res.config.input_format)
        seq = extract(parse_transcript(data, rid, fmt, res.config.participant_tier), res)
        return rid, features_for(seq, res), None
    except (OSError, CiuGraphError, ValueError) as exc:
        return rid, None, f"{type(exc).__name__}: {exc}"


def read_manifest(text: str, base: Path) -> list[tuple[str, str]]:
    """``(id, absolute path)`` pairs in manifest order; paths are relative to the manifest."""
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in ("id", "path") if c not in (reader.fieldnames or ())]
    if missing:
        raise SchemaError(f"manifest is missing columns {missing}")
    rows, seen = [], set()
    for line, rec in enumerate(reader, start=2):
        rid = (rec["id"] or "").strip()
        if not rid:
            raise SchemaError(f"manifest line {line}: empty id")
        if rid in seen:
            raise SchemaError(f"manifest id {rid!r} appears twice")
        seen.add(rid)
        path = Path((rec["path"] or "").strip())
        rows.append((rid, str(path if path.is_absolute() else base / path)))
    return rows


def run_batch(rows: list[tuple[str, str]], config: RunConfig, jobs: int = 1):
    """Process manifest rows; results come back in manifest order."""
    global _WORKER_RES
    if jobs <= 1 or len(rows) <= 1:
        _WORKER_RES = _resources(config)
        return [_batch_row(r) for r in rows]
    _resources(config)  # surface config errors before forking
    chunk = max(1, len(rows) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(config,)) as pool:
        return list(pool.map(_batch_row, rows, chunksize=chunk))


def cmd_batch(args) -> int:
    config = _config(args).resolved()
    manifest_path = _input_path(args)
    if manifest_path is None:
        raise InputError("batch needs a manifest CSV")
    try:
        text = _read_input(manifest_path).decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise InputError(f"manifest is not UTF-8: {exc}") from exc
    rows = read_manifest(text, Path(manifest_path).resolve().parent)
    results = run_batch(rows, config, args.jobs)

    vectors, errors = [], []
    for rid, fv, err in results:
        if err is not None:
            errors.append((rid, err))
            log.error("%s: %s", rid, err)
        else:
            if fv.is_empty:
                log.warning("%s: empty CIU sequence; all features are null", rid)
            vectors.append(fv)
    _write_output(features_csv(vectors, sort=False), args.out)
    if args.errors:
        lines = "".join(f"{rid}\t{err}\n" for rid, err in errors)
        Path(args.errors).write_text(lines, encoding="utf-8")
    if rows and not vectors:
        return EXIT_ALL_FAILED
    return EXIT_OK


def cmd_stats(args) -> int:
    feature_text = _read_input(args.features).decode("utf-8-sig")
    meta_text = _read_input(args.meta).decode("utf-8-sig")
    try:
        vectors = read_features_csv(feature_text)
    except ValueError as exc:
        raise InputError(f"bad features CSV: {exc}") from exc
    meta = read_metadata(meta_text)
    records, warnings = join_records(vectors, meta)
    for w in warnings:
        log.warning("%s", w)
    table = ancova_table(records)
    for row in table:
        if row.error:
            log.warning("%s: %s", row.feature_name, row.error)
    _write_output(ancova_csv(table), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    res = _resources(_config(args))
    path = _input_path(args)
    data = _read_input(path)
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise GraphSchemaError(f"render needs a sequence or graph JSON document: {exc}") from exc
    if isinstance(doc, dict) and "edges" in doc:
        graph = graph_from_json(data)
    else:
        graph = build_graph(_sequence_from_json(data, res), res.coords)

    options = SvgOptions(background=args.background) if args.background else SvgOptions()
    wrote = False
    if args.dot:
        _write_output(to_dot(graph), args.dot)
        wrote = True
    if args.svg:
        _write_output(render_svg(graph, options), args.svg)
        wrote = True
    if args.graph_json:
        _write_output(graph_to_json(graph) + "\n", args.graph_json)
        wrote = True
    if not wrote:
        target = args.out
        if target and target.lower().endswith(".svg"):
            _write_output(render_svg(graph, options), target)
        else:
            _write_output(to_dot(graph), target)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.spec:
        try:
            spec = SynthSpec.from_json(Path(args.spec).read_bytes())
        except OSError as exc:
            raise ConfigError(f"cannot read spec: {exc}") from exc
        except TypeError as exc:
            raise SchemaError(f"bad spec: {exc}") from exc
    else:
        spec = SynthSpec()
    if args.n_per_group is not None:
        spec.n_per_group = args.n_per_group
    if args.seed is not None:
        spec.seed = args.seed
    spec.validate()
    res = _resources(_config(args))
    rows, texts = generate_cohort(spec, res.lexicon, res.coords)
    if args.out is None:
        raise InputError("synth needs --out DIR")
    manifest = write_cohort(rows, texts, args.out)
    log.info("wrote %d transcripts and %s", len(rows), manifest)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lexicon", help="lexicon JSON (default: shipped lexicon)")
    p.add_argument("--coords", help="coordinate table JSON (default: shipped table)")
    p.add_argument("--lemma-rules", dest="lemma_rules", help="lemma rules JSON")
    p.add_argument("--format", choices=("chat", "text"), help="input format (default: by extension)")
    p.add_argument("--participant-tier", dest="participant_tier", default="PAR", help="CHAT speaker tier to keep")
    p.add_argument("--include-low-precision", dest="include_low_precision", action="store_true",
                   help="also match words marked low precision in the lexicon")


def _add_input(p: argparse.ArgumentParser, what: str) -> None:
    p.add_argument("input_pos", nargs="?", metavar="INPUT", help=what)
    p.add_argument("--input", help=what)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ciugraph", description="CIU sequences, spatio-semantic graphs and ANCOVA.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="transcript -> CIU sequence JSON")
    _add_input(p, "transcript file (.cha or text; '-' for stdin)")
    _add_config_flags(p)
    p.add_argument("--id", help="transcript id (default: file stem)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("features", help="transcript or sequence JSON -> feature vector")
    _add_input(p, "transcript or sequence JSON")
    _add_config_flags(p)
    p.add_argument("--id", help="transcript id (default: file stem or the JSON's id)")
    p.add_argument("--csv", action="store_true", help="emit a one-row CSV instead of JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("batch", help="manifest CSV -> features CSV")
    _add_input(p, "manifest CSV with id,path columns")
    _add_config_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--out")
    p.add_argument("--errors", help="write failed rows as id<TAB>message to this file")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("stats", help="features CSV + metadata CSV -> ANCOVA CSV")
    p.add_argument("features")
    p.add_argument("meta")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", help="sequence or graph JSON -> DOT / SVG")
    _add_input(p, "sequence JSON or graph JSON")
    _add_config_flags(p)
    p.add_argument("--dot", help="write DOT here")
    p.add_argument("--svg", help="write SVG here")
    p.add_argument("--graph-json", dest="graph_json", help="write graph JSON here")
    p.add_argument("--background", help="image href drawn under the graph in SVG output")
    p.add_argument("--out", help="output when no --dot/--svg is given (.svg selects SVG)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--spec", help="SynthSpec JSON")
    p.add_argument("--n-per-group", dest="n_per_group", type=int)
    p.add_argument("--seed", type=int)
    _add_config_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_synth)
    return parser


def _configure_logging(verbose: bool) -> None:
    # a fresh handler per call so repeated in-process runs write to the current stderr
    root = logging.getLogger("ciugraph")
    for h in list(root.handlers):
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("ciugraph: %(levelname)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    root.propagate = False


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except InputError as exc:  # checked first: GraphSchemaError is both
        log.error("%s", exc)
        return EXIT_INPUT
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
