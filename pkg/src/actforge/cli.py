"""Command-line entry points: augment, vs, stats, eval, validate, convert.

Exit codes: 0 success, 1 data errors, 2 usage errors. Logs go to stderr;
data goes only to the files named by flags (plus a manifest sidecar per
output file).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time

from . import __version__
from .actgen import AugConfig
from .augment import (
    AugDeps,
    augment_corpus,
    substitute_corpus,
    write_records,
    write_stats,
)
from .convert import convert_multiwoz
from .corpus import (
    CorpusError,
    bundled_coref_list,
    bundled_dictionary,
    load_coref_list,
    load_corpus,
    load_dictionary,
    validate_corpus,
    write_corpus,
)
from .filtering import FilterDeps, RemoteClassifier
from .genbridge import ExternalGenerator, PhraseLexicon, ProtocolError
from .metrics import (
    joint_goal_accuracy,
    load_predictions,
    slot_class_f1,
    slot_distribution,
)

log = logging.getLogger("act-forge")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _config_hash(cfg: AugConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def write_manifest(out_path, subcommand: str, inputs: list, seed=None, cfg=None) -> None:
    manifest = {
        "tool": "act-forge",
        "version": __version__,
        "subcommand": subcommand,
        "seed": seed,
        "config_hash": _config_hash(cfg) if cfg is not None else None,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "output": {str(out_path): _sha256(out_path)},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    with open(f"{out_path}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_common(args):
    svdict = load_dictionary(args.dict) if args.dict else bundled_dictionary()
    coref = load_coref_list(args.coref) if args.coref else bundled_coref_list()
    return svdict, coref


def _build_config(args) -> AugConfig:
    cfg = AugConfig.from_file(args.config) if args.config else AugConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "beam_size", None) is not None:
        overrides["beam_size"] = args.beam_size
    if getattr(args, "domain_switch_mode", None):
        overrides["domain_switch_mode"] = args.domain_switch_mode
    if overrides:
        cfg = AugConfig.from_dict({**cfg.to_dict(), **overrides})
    return cfg


def cmd_augment(args) -> int:
    svdict, coref = _load_common(args)
    cfg = _build_config(args)
    corpus = load_corpus(args.corpus)
    lexicon = PhraseLexicon.default_for(svdict, coref)
    generator = None
    classifier = None
    try:
        if args.generator != "template":
            generator = ExternalGenerator(args.generator, timeout=args.timeout)
        if args.filter != "rule":
            classifier = RemoteClassifier(args.filter, timeout=args.timeout)
        deps = AugDeps(
            svdict=svdict,
            coref=coref,
            lexicon=lexicon,
            generator=generator,
            filter_deps=FilterDeps(svdict, coref, lexicon, classifier=classifier),
        )
        records, stats = augment_corpus(corpus, deps, cfg, workers=args.workers)
    finally:
        if generator is not None:
            generator.close()
        if classifier is not None:
            classifier.close()
    write_records(records, args.out)
    inputs = [args.corpus] + [p for p in (args.dict, args.coref, args.config) if p]
    write_manifest(args.out, "augment", inputs, seed=cfg.seed, cfg=cfg)
    if args.stats:
        write_stats(stats, args.stats)
        write_manifest(args.stats, "augment", inputs, seed=cfg.seed, cfg=cfg)
    log.info(
        "augmented %d/%d turns (%.1f%% success, %d skipped)",
        stats.turns_succeeded, stats.turns_attempted,
        100.0 * stats.success_rate, stats.turns_skipped,
    )
    return 0


def cmd_vs(args) -> int:
    svdict, _ = _load_common(args)
    corpus = load_corpus(args.corpus)
    records, stats = substitute_corpus(corpus, svdict, seed=args.seed or 0)
    with open(args.out, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    inputs = [args.corpus] + ([args.dict] if args.dict else [])
    write_manifest(args.out, "vs", inputs, seed=args.seed or 0)
    if args.stats:
        write_stats(stats, args.stats)
        write_manifest(args.stats, "vs", inputs, seed=args.seed or 0)
    log.info("substituted %d/%d turns", stats.turns_succeeded, stats.turns_attempted)
    return 0


def cmd_stats(args) -> int:
    svdict, coref = _load_common(args)
    if args.records:
        from .augment import load_records

        source = load_records(args.records)
        inputs = [args.records]
    else:
        source = load_corpus(args.corpus)
        inputs = [args.corpus]
    report = slot_distribution(source, svdict, coref, unit=args.unit)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(args.out, "stats", inputs)
    print(report.format_table())
    return 0


def cmd_eval(args) -> int:
    svdict, coref = _load_common(args)
    corpus = load_corpus(args.corpus)
    preds = load_predictions(args.preds)
    jga = joint_goal_accuracy(preds, corpus)
    f1 = slot_class_f1(preds, corpus, svdict, coref)
    report = {"joint_goal_accuracy": jga, "slot_class_f1": f1}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(args.out, "eval", [args.corpus, args.preds])
    width = max(len(k) for k in f1)
    print(f"{'JGA':<{width}}  {jga:8.4f}")
    for cls, score in sorted(f1.items()):
        print(f"{cls:<{width}}  {score:8.4f}")
    return 0


def cmd_validate(args) -> int:
    svdict, coref = _load_common(args)
    corpus = load_corpus(args.corpus)
    violations = validate_corpus(corpus, svdict, coref)
    for violation in violations:
        print(str(violation))
    if violations:
        log.error("%d violation(s) found", len(violations))
        return 1
    log.info("corpus is valid: %d dialogues, %d turns", len(corpus.dialogues), corpus.num_turns())
    return 0


def cmd_convert(args) -> int:
    corpus = convert_multiwoz(args.raw)
    write_corpus(corpus, args.out)
    write_manifest(args.out, "convert", [args.raw])
    log.info("converted %d dialogues, %d turns", len(corpus.dialogues), corpus.num_turns())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="act-forge",
        description="Controllable user dialogue act augmentation for task-oriented corpora",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, dict_coref=True):
        if dict_coref:
            p.add_argument("--dict", help="slot-value dictionary JSON (default: bundled)")
            p.add_argument("--coref", help="coreference list JSON (default: bundled)")

    p = sub.add_parser("augment", help="augment every turn of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dict", required=True, help="slot-value dictionary JSON")
    p.add_argument("--coref", help="coreference list JSON (default: bundled)")
    p.add_argument("--config", help="augmentation config JSON")
    p.add_argument("--generator", default="template",
                   help="'template' or an endpoint (tcp:HOST:PORT / cmd:COMMAND)")
    p.add_argument("--filter", default="rule",
                   help="'rule' or a classifier endpoint (tcp:HOST:PORT / cmd:COMMAND)")
    p.add_argument("--out", required=True, help="output records JSONL")
    p.add_argument("--stats", help="stats summary JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--beam-size", type=int, dest="beam_size")
    p.add_argument("--domain-switch-mode", choices=["stay", "switch"], dest="domain_switch_mode")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("vs", help="value-substitution baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dict", required=True, help="slot-value dictionary JSON")
    p.add_argument("--coref", help="coreference list JSON (default: bundled)")
    p.add_argument("--out", required=True)
    p.add_argument("--stats")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_vs)

    p = sub.add_parser("stats", help="slot distribution report")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--records", help="augmentation records JSONL")
    group.add_argument("--corpus", help="canonical corpus JSON")
    common(p)
    p.add_argument("--unit", choices=["turn", "slot"], default="turn")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="evaluate tracker predictions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--preds", required=True, help="predictions JSONL")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="check corpus invariants")
    p.add_argument("--corpus", required=True)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert raw MultiWOZ 2.x JSON")
    p.add_argument("--raw", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CorpusError, ProtocolError, FileNotFoundError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
