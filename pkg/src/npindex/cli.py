"""Command-line entry point: one subcommand per pipeline stage.

Flag values override config-file values, which override the built-in
defaults.  Exit status is 0 on success, 2 for missing inputs or bad
configuration, and 3 when an artifact was produced under a different
configuration than the current one.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline
from .config import ConfigError, PipelineConfig, load_config
from .ingest import CorpusFormatError
from .parser import ParseAbort
from .pipeline import ArtifactMismatchError, MissingArtifactError

STAGES = ("chunk", "stats", "atoms", "parse", "compounds",
          "index", "search", "eval", "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npindex",
        description="Phrase extraction and phrase-based retrieval pipeline")
    parser.add_argument("--verbose", action="store_true",
                        help="log per-phase progress to stderr")
    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in STAGES:
        sp = sub.add_parser(stage, help=f"run the {stage} stage")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--corpus", help="JSONL document file")
        sp.add_argument("--lexicon", help="tab-separated lemma/category file")
        sp.add_argument("--queries", help="tab-separated id/text query file")
        sp.add_argument("--qrels", help="tab-separated query_id/doc_id file")
        sp.add_argument("--output-dir", dest="output_dir", help="artifact directory")
        sp.add_argument("--run-tag", dest="run_tag", help="tag in run output")
        sp.add_argument("--search-limit", dest="search_limit", type=int)
        for key in ("lambda1", "lambda2", "ps_threshold", "ps_decay", "ps_floor"):
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
        sp.add_argument("--max-phases", dest="max_phases", type=int)
        sp.add_argument("--atom-min-freq", dest="atom_min_freq", type=int)
        sp.add_argument("--atom-noun-ratio", dest="atom_noun_ratio", type=float)
        sp.add_argument("--atom-adj-ratio", dest="atom_adj_ratio", type=float)
        sp.add_argument("--attest-substrings", dest="attest_substrings",
                        action="store_const", const=True)
        sp.add_argument("--no-query-attest", dest="query_attest",
                        action="store_const", const=False)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {
        key: getattr(args, key)
        for key in ("lambda1", "lambda2", "ps_threshold", "ps_decay", "ps_floor",
                    "max_phases", "atom_min_freq", "atom_noun_ratio",
                    "atom_adj_ratio", "attest_substrings", "query_attest",
                    "corpus", "lexicon", "queries", "qrels", "output_dir",
                    "run_tag", "search_limit")
        if getattr(args, key, None) is not None
    }
    config = config.merged(overrides)
    config.validate()
    return config


_STAGE_FUNCTIONS = {
    "chunk": pipeline.stage_chunk,
    "stats": pipeline.stage_stats,
    "atoms": pipeline.stage_atoms,
    "parse": pipeline.stage_parse,
    "compounds": pipeline.stage_compounds,
    "index": pipeline.stage_index,
    "search": pipeline.stage_search,
    "eval": pipeline.stage_eval,
    "all": pipeline.run_all,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        _STAGE_FUNCTIONS[args.stage](config)
    except MissingArtifactError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ArtifactMismatchError as exc:
        print(str(exc), file=sys.stderr)
        return 3
    except (ConfigError, CorpusFormatError, ParseAbort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
