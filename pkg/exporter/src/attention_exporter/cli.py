"""Command line: translate a sentences file and export attention JSONs.

    exporter --model lexicon --in sentences.txt --out-dir attn/
    exporter --model random-byt5 --in sentences.txt --out-dir attn/
    exporter --model <transformers-id> --in sentences.txt --out-dir attn/

Exit codes: 0 success, 1 backend/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .backends import load_backend
from .errors import ExporterError
from .exporter import ExportRequest, export_attention, read_sentences


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exporter",
        description="Translate sentences and export attention matrices.",
    )
    parser.add_argument(
        "--model",
        default="lexicon",
        help="'lexicon', 'random-byt5', or a transformers model id",
    )
    parser.add_argument(
        "--in",
        dest="sentences",
        required=True,
        help="sentences file (one per line, optional '<id>\\t' prefix)",
    )
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument(
        "--attn-layers",
        choices=["last", "mean"],
        default="last",
        help="average heads of the last decoder layer, or of all layers",
    )
    parser.add_argument(
        "--max-new-tokens", type=int, default=48, help="generation length cap"
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sentences = read_sentences(args.sentences)
        request = ExportRequest(tuple(sentences), args.model)
        if args.model == "lexicon":
            backend = load_backend(args.model)
        else:
            backend = load_backend(
                args.model,
                attn_layers=args.attn_layers,
                max_new_tokens=args.max_new_tokens,
            )
        written = export_attention(request, backend, args.out_dir)
    except ExporterError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
