"""Command-line entry point.

Subcommands: ingest, generate, assemble, stats, eval, sample,
abtest {build, serve, report}. Every run that writes outputs also writes a
manifest (command, arguments, seed, output hashes, tool version) so runs can
be audited and compared. Exit codes: 0 success, 2 validation error, 1
runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .corpus import (
    PseudoCaption,
    assemble,
    ingest_aspect_csv,
    ingest_jsonl,
    read_dataset_jsonl,
    stats,
    write_dataset_jsonl,
    write_records_jsonl,
)
from .errors import TagcapError, ValidationError
from .instruct import InstructionKind, load_templates
from .llmgate import CaptionClient, GenerationConfig, HttpProvider, MockProvider
from .pipeline import generate_captions
from .sampler import RNG_ALGORITHM, build_index, sample

log = logging.getLogger(__name__)


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_manifest(
    command: str,
    args: argparse.Namespace,
    inputs: list[str],
    outputs: list[str],
    started_at: str,
    extra: dict | None = None,
) -> str:
    """Manifest sits next to the first output (or in the output dir)."""
    snapshot = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "command": command,
        "args": snapshot,
        "seed": getattr(args, "seed", None),
        "inputs": inputs,
        "outputs": {out: _sha256_file(out) for out in outputs if os.path.isfile(out)},
        "tool_version": __version__,
        "started_at": started_at,
        "finished_at": _now(),
    }
    if extra:
        manifest.update(extra)
    anchor = outputs[0] if outputs else "run"
    path = anchor + ".manifest.json" if os.path.isfile(anchor) else os.path.join(anchor, "manifest.json")
    if not outputs:
        path = "manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False)
    return path


def load_config(path: str) -> dict[str, str]:
    """Flat key=value file; keys match flag destinations."""
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{line_no}: expected key=value")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Config values fill in flags left at their defaults; flags win."""
    if not getattr(args, "config", None):
        return
    cfg = load_config(args.config)
    for key, value in cfg.items():
        if not hasattr(args, key):
            continue
        default = parser.get_default(key)
        if getattr(args, key) == default:
            if isinstance(default, bool):
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(default, int):
                setattr(args, key, int(value))
            elif isinstance(default, float):
                setattr(args, key, float(value))
            else:
                setattr(args, key, value)


def _read_records(args: argparse.Namespace):
    if args.format == "csv" or (args.format == "auto" and args.input.endswith(".csv")):
        return ingest_aspect_csv(args.input, id_column=args.id_col, aspect_column=args.aspect_col)
    return ingest_jsonl(args.input)


def cmd_ingest(args: argparse.Namespace) -> int:
    started = _now()
    records = _read_records(args)
    write_records_jsonl(records, args.out)
    write_manifest("ingest", args, [args.input], [args.out], started,
                   {"n_records": len(records)})
    print(f"ingested {len(records)} records -> {args.out}")
    return 0


def _parse_kinds(spec: str) -> list[InstructionKind]:
    if spec == "all":
        return list(InstructionKind)
    kinds = []
    for name in spec.split(","):
        name = name.strip()
        try:
            kinds.append(InstructionKind(name))
        except ValueError:
            raise ValidationError(f"unknown instruction kind {name!r}")
    return kinds


def cmd_generate(args: argparse.Namespace) -> int:
    started = _now()
    records = _read_records(args)
    kinds = _parse_kinds(args.kinds)
    templates = load_templates(args.instruction_config) if args.instruction_config else None
    cfg = GenerationConfig(
        model_id=args.model,
        temperature=args.temperature,
        max_retries=args.max_retries,
        max_in_flight=args.max_in_flight,
    )
    if args.provider == "mock":
        provider = MockProvider()
    else:
        provider = HttpProvider()
    client = CaptionClient(provider, cfg, cache_dir=args.cache_dir)
    captions, failures = generate_captions(
        records, kinds, client, templates, loose_coverage=args.loose_coverage
    )
    dataset = assemble(records, captions)
    write_dataset_jsonl(dataset, args.out)
    if failures:
        report_path = args.out + ".failures.json"
        with open(report_path, "w", encoding="utf-8") as f:
            json.dump(
                [{"track_id": x.track_id, "kind": x.kind.value, "error": x.error} for x in failures],
                f,
                indent=2,
            )
        print(f"{len(failures)} failures -> {report_path}", file=sys.stderr)
    write_manifest(
        "generate", args, [args.input], [args.out], started,
        {"n_records": len(records), "n_captions": len(captions), "n_failures": len(failures)},
    )
    print(f"wrote {len(dataset)} captioned records -> {args.out}")
    return 1 if failures and not captions else 0


def read_caption_rows(path: str) -> list[PseudoCaption]:
    captions = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            row = json.loads(line)
            captions.append(
                PseudoCaption(
                    track_id=str(row["track_id"]),
                    kind=InstructionKind(row["kind"]),
                    text=row["text"],
                    model_id=row.get("model", ""),
                    coverage=float(row.get("coverage", 0.0)),
                    new_attributes=row.get("new_attributes", []),
                    created_at=row.get("created_at", ""),
                )
            )
    return captions


def cmd_assemble(args: argparse.Namespace) -> int:
    started = _now()
    records = ingest_jsonl(args.records)
    captions = read_caption_rows(args.captions)
    dataset = assemble(records, captions)
    write_dataset_jsonl(dataset, args.out)
    write_manifest("assemble", args, [args.records, args.captions], [args.out], started)
    print(f"wrote {len(dataset)} captioned records -> {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    dataset = read_dataset_jsonl(args.dataset)
    s = stats(dataset)
    print(json.dumps(s.__dict__, indent=2))
    return 0


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f if line.strip()]


def cmd_eval(args: argparse.Namespace) -> int:
    from .metrics import FileEmbeddingProvider, default_stages, evaluate_corpus

    started = _now()
    candidates = _read_lines(args.candidates)
    references = _read_lines(args.references)
    if not candidates:
        raise ValidationError("empty candidate file")
    if len(candidates) != len(references):
        raise ValidationError(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    training = _read_lines(args.train_captions) if args.train_captions else None

    cand_embs = ref_embs = None
    if args.cand_embeddings or args.ref_embeddings:
        if not (args.cand_embeddings and args.ref_embeddings):
            raise ValidationError("BERT-Score needs both --cand-embeddings and --ref-embeddings")
        cand_provider = FileEmbeddingProvider(args.cand_embeddings)
        ref_provider = FileEmbeddingProvider(args.ref_embeddings)
        cand_embs = [cand_provider.get(str(i)) for i in range(len(candidates))]
        ref_embs = [ref_provider.get(str(i)) for i in range(len(references))]

    stages = default_stages(use_stem=args.meteor_stem, synonym_lexicon_path=args.meteor_synonyms)
    report = evaluate_corpus(
        candidates,
        references,
        training=training,
        cand_embs=cand_embs,
        ref_embs=ref_embs,
        beta=args.beta,
        meteor_stages=stages,
    )
    out_json = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(out_json + "\n")
        write_manifest("eval", args, [args.candidates, args.references], [args.out], started)
    print(out_json)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    started = _now()
    records = ingest_jsonl(args.records)
    index = build_index(records)
    ids = sample(index, args.n, args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("\n".join(ids) + ("\n" if ids else ""))
        write_manifest("sample", args, [args.records], [args.out], started,
                       {"rng": RNG_ALGORITHM})
    else:
        for track_id in ids:
            print(track_id)
    return 0


def cmd_abtest_build(args: argparse.Namespace) -> int:
    from .abtest import StudyStore, build_study

    started = _now()
    samples = _read_lines(args.samples)
    ground_truth: dict[str, str] = {}
    for line in _read_lines(args.ground_truth):
        row = json.loads(line)
        ground_truth[str(row["sample_id"])] = row["caption"]
    methods: dict[str, dict[str, str]] = {}
    for line in _read_lines(args.method_captions):
        row = json.loads(line)
        methods.setdefault(row["method"], {})[str(row["sample_id"])] = row["caption"]
    questions = build_study(samples, methods, ground_truth, args.seed)
    StudyStore.create(args.out_dir, questions, args.seed, study_id=args.study_id)
    write_manifest("abtest-build", args,
                   [args.samples, args.ground_truth, args.method_captions],
                   [args.out_dir], started, {"n_questions": len(questions)})
    print(f"built study with {len(questions)} questions -> {args.out_dir}")
    return 0


def cmd_abtest_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .abtest import StudyStore
    from .abtest.service import create_app

    store = StudyStore(args.study_dir)
    app = create_app(
        store,
        audio_dir=args.audio_dir,
        static_dir=args.static_dir,
        session_size=args.session_size,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_abtest_report(args: argparse.Namespace) -> int:
    from .abtest import StudyStore

    store = StudyStore(args.study_dir)
    result = store.aggregate()
    print(json.dumps(result.to_jsonable(), indent=2))
    return 0


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="tag file (JSONL or aspect CSV)")
    p.add_argument("--format", choices=["auto", "jsonl", "csv"], default="auto")
    p.add_argument("--id-col", default="ytid", help="CSV id column name")
    p.add_argument("--aspect-col", default="aspect_list", help="CSV aspect-list column name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tagcap", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="global seed for stochastic steps")
    parser.add_argument("--config", help="flat key=value config file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a tag dataset to JSONL")
    _add_input_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="generate pseudo captions for a tag dataset")
    _add_input_flags(p)
    p.add_argument("--kinds", default="all",
                   help="comma list of writing,summary,paraphrase,attribute_prediction or 'all'")
    p.add_argument("--provider", choices=["mock", "http"], default="mock")
    p.add_argument("--model", default="gpt-3.5-turbo")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--instruction-config", default=None,
                   help="key=value file overriding instruction templates")
    p.add_argument("--loose-coverage", action="store_true",
                   help="bag-of-tokens tag coverage instead of contiguous match")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("assemble", help="join tag records with generated captions")
    p.add_argument("--records", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="score candidate captions against references")
    p.add_argument("--candidates", required=True, help="one caption per line")
    p.add_argument("--references", required=True, help="one caption per line, aligned")
    p.add_argument("--train-captions", default=None)
    p.add_argument("--cand-embeddings", default=None)
    p.add_argument("--ref-embeddings", default=None)
    p.add_argument("--beta", type=float, default=1.2)
    p.add_argument("--meteor-stem", action="store_true")
    p.add_argument("--meteor-synonyms", default=None, help="synonym lexicon file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="balanced tag-anchored sampling")
    p.add_argument("--records", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("abtest", help="A-vs-B study lifecycle")
    absub = p.add_subparsers(dest="abtest_command", required=True)

    q = absub.add_parser("build", help="build a blinded question set")
    q.add_argument("--samples", required=True, help="one sample id per line")
    q.add_argument("--ground-truth", required=True, help="JSONL {sample_id, caption}")
    q.add_argument("--method-captions", required=True, help="JSONL {sample_id, method, caption}")
    q.add_argument("--study-id", default="study")
    q.add_argument("--out-dir", required=True)
    q.set_defaults(func=cmd_abtest_build)

    q = absub.add_parser("serve", help="run the rating service")
    q.add_argument("--study-dir", required=True)
    q.add_argument("--audio-dir", default=None)
    q.add_argument("--static-dir", default=None, help="rater UI bundle to serve at /")
    q.add_argument("--host", default="127.0.0.1")
    q.add_argument("--port", type=int, default=8000)
    q.add_argument("--session-size", type=int, default=20)
    q.set_defaults(func=cmd_abtest_serve)

    q = absub.add_parser("report", help="aggregate win/tie/lose results")
    q.add_argument("--study-dir", required=True)
    q.set_defaults(func=cmd_abtest_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config(args, parser)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TagcapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
