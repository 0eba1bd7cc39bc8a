"""Command-line front end: analyze, synth, eval, train-svd, gen-corpus, serve."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np


class _UsageExit(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; processing problems exit 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="melobench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[], help="extract a pitch contour from a WAV file")
    p.add_argument("wav", help="input WAV file")
    p.add_argument("--config", help="configuration file (key = value lines)")
    p.add_argument("--out", help="output contour TSV (default: stdout)")
    p.add_argument("--mode", choices=["single", "dual"], help="tracking mode override")
    p.add_argument("--voicing", action="store_true", help="enable the voice detector")
    p.add_argument("--lean", action="store_true", help="skip diagnostics")
    p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )

    p = sub.add_parser("synth", help="render a contour TSV as audio")
    p.add_argument("contour", help="contour TSV file")
    p.add_argument("--out", required=True, help="output WAV path")
    p.add_argument("--mode", choices=["sine", "harmonic"], default="sine")
    p.add_argument("--rate", type=int, default=44100)
    p.add_argument("--amplitude", type=float, default=0.8)

    p = sub.add_parser("eval", help="score an estimated contour against a reference")
    p.add_argument("estimate")
    p.add_argument("reference")
    p.add_argument("--tolerance-cents", type=float, default=50.0)

    p = sub.add_parser("train-svd", help="train the vocal/non-vocal classifier")
    p.add_argument("--corpus", required=True, help="corpus directory, or 'synthetic'")
    p.add_argument("--out", required=True, help="output model JSON")
    p.add_argument("--components", type=int, default=4)
    p.add_argument("--seed", type=int, default=12345)

    p = sub.add_parser("gen-corpus", help="write a labeled synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-class", type=int, default=8)

    p = sub.add_parser("serve", help="run the interactive tuning service")
    p.add_argument("--port", type=int, default=8775)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--max-upload-mb", type=int, default=50)
    p.add_argument("--ui-dir", default=None, help="built UI assets to serve at /")
    return parser


def _load_config(args):
    from .config import AnalysisConfig, apply_overrides, load_config

    config = load_config(args.config) if args.config else AnalysisConfig()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.mode:
        overrides["tracking_mode"] = args.mode
    if args.voicing:
        overrides["voicing.enabled"] = True
    return apply_overrides(config, overrides)


def _cmd_analyze(args) -> int:
    from .audio_io import load_wav
    from .metrics import write_contour
    from .pipeline import analyze

    clip = load_wav(args.wav)
    result = analyze(clip, _load_config(args), lean=args.lean)
    if args.out:
        write_contour(result.contour, args.out)
    else:
        for t, f in zip(result.contour.times, result.contour.f0):
            print(f"{t:.6f}\t{f:.4f}")
    return 0


def _cmd_synth(args) -> int:
    from .metrics import read_contour
    from .synth import synthesize_contour, write_wav

    contour = read_contour(args.contour)
    clip = synthesize_contour(contour, args.rate, mode=args.mode, amplitude=args.amplitude)
    write_wav(clip, args.out)
    return 0


def _cmd_eval(args) -> int:
    from .metrics import evaluate, read_contour

    metrics = evaluate(
        read_contour(args.estimate), read_contour(args.reference), args.tolerance_cents
    )
    print(json.dumps(metrics.as_dict(), indent=1))
    return 0


def _cmd_train_svd(args) -> int:
    from .config import AnalysisConfig
    from .pipeline import analyze
    from .synthetic import make_svd_corpus, read_corpus
    from .voicing import save_svd_model, train_gmm

    if args.corpus == "synthetic":
        segments = make_svd_corpus(seed=args.seed)
    else:
        segments = read_corpus(args.corpus)
    config = AnalysisConfig()
    features, labels = [], []
    for seg in segments:
        res = analyze(seg.clip, config)
        feats = res.diagnostics.features
        features.append(feats)
        labels.append(np.full(len(feats), seg.vocal))
    x = np.vstack(features)
    y = np.concatenate(labels)
    vocal = train_gmm(x[y], k=args.components, seed=0)
    nonvocal = train_gmm(x[~y], k=args.components, seed=0)
    save_svd_model(args.out, vocal, nonvocal)
    print(f"trained on {len(x)} frames ({int(y.sum())} vocal); wrote {args.out}")
    return 0


def _cmd_gen_corpus(args) -> int:
    from .synthetic import make_svd_corpus, write_corpus

    segments = make_svd_corpus(seed=args.seed, n_per_class=args.per_class)
    write_corpus(args.out, segments)
    print(f"wrote {len(segments)} segments to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_upload_mb=args.max_upload_mb, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "synth": _cmd_synth,
    "eval": _cmd_eval,
    "train-svd": _cmd_train_svd,
    "gen-corpus": _cmd_gen_corpus,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        return int(exc.code or 1)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - boundary: report and set exit status
        print(f"melobench {args.command}: error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
