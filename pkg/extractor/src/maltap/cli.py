"""maltap command line: dump-matrix, dump-sequences, freeze-fixtures."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dump import dump_embedding_matrix, dump_sequences
from .errors import MaltapError
from .fixtures import freeze_fixtures
from .taps import TAP_ADAPTER_OUTPUT, TAP_LM_EMBEDDINGS, TapSpec

log = logging.getLogger("maltap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maltap",
                                     description="interchange-format extraction")
    parser.add_argument("--output-dir", default=".", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_matrix = sub.add_parser("dump-matrix", help="dump a checkpoint's embedding table")
    p_matrix.add_argument("--checkpoint", required=True)
    p_matrix.add_argument("--model-id", default="unknown")
    p_matrix.add_argument("--family", default="toy")

    p_seq = sub.add_parser("dump-sequences", help="dump per-utterance sequences")
    p_seq.add_argument("--corpus", required=True, help="directory of .wav files")
    p_seq.add_argument("--model-id", default="unknown")
    p_seq.add_argument("--family", default="toy")
    p_seq.add_argument("--tap", default=TAP_ADAPTER_OUTPUT)
    p_seq.add_argument("--frame-ms", type=int)
    p_seq.add_argument("--dim", type=int, default=16)

    p_freeze = sub.add_parser("freeze-fixtures", help="persist provider responses")
    p_freeze.add_argument("--requests", required=True)
    p_freeze.add_argument("--store", required=True)
    p_freeze.add_argument("--bridge-argv", nargs="+", required=True,
                          help="command speaking the JSON-line provider protocol")
    return parser


class _BridgeBackend:
    """Minimal JSON-line subprocess bridge for freeze-fixtures."""

    def __init__(self, argv):
        self.argv = argv
        self.name = Path(argv[0]).name
        self._proc = None

    def serve(self, request):
        import json
        import subprocess

        from .errors import MaltapError
        from .formats import canonical_json

        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                    text=True, bufsize=1)
            except OSError as exc:
                raise MaltapError(f"cannot start bridge {self.argv[0]}: {exc}")
        self._proc.stdin.write(canonical_json(request) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise MaltapError(f"bridge {self.argv[0]} closed its output")
        reply = json.loads(line)
        if "error" in reply:
            raise MaltapError(f"bridge error: {reply['error']}")
        return reply["response"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        if args.command == "dump-matrix":
            spec = TapSpec(model_id=args.model_id, family=args.family,
                           tap=TAP_LM_EMBEDDINGS,
                           checkpoint_dir=Path(args.checkpoint),
                           output_dir=Path(args.output_dir))
            path = dump_embedding_matrix(spec)
            print(f"wrote {path}")
        elif args.command == "dump-sequences":
            spec = TapSpec(model_id=args.model_id, family=args.family,
                           tap=args.tap, corpus_dir=Path(args.corpus),
                           output_dir=Path(args.output_dir),
                           frame_ms=args.frame_ms, feature_dim=args.dim)
            written = dump_sequences(spec)
            print(f"wrote {len(written)} sequence files to {args.output_dir}")
        elif args.command == "freeze-fixtures":
            report = freeze_fixtures(args.requests, _BridgeBackend(args.bridge_argv),
                                     args.store)
            print(f"froze {report.answered} responses "
                  f"({report.skipped} already present) in {report.store_dir}")
    except MaltapError as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
