"""Command-line entry point: ``bengali-hts <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the inputs are
invalid (unreadable files, malformed data, failed training).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .corpus.cache import MAGIC as FEATURE_MAGIC
from .corpus.cache import decode_record, encode_record
from .corpus.loader import load_corpus
from .corpus.synthetic import DEFAULT_PHONES, generate_synthetic_corpus
from .corpus.utt_format import parse_annotation
from .evaluation import (
    aggregate_mos,
    compare_f0,
    compare_spectra,
    read_mos_csv,
    write_f0_comparison_csv,
    write_mcd_csv,
)
from .frontend.g2p import G2PRuleTable
from .frontend.inventory import phoneme_inventory
from .frontend.labels import build_context_labels, format_label
from .frontend.text import parse_tagged_text
from .model.io import load_model_set, save_model_set
from .signal.analysis import AnalysisConfig, mel_cepstrogram
from .signal.audio import read_wav, write_wav
from .signal.pitch import estimate_f0, f0_to_log
from .synthesis.synthesize import SynthesisConfig, synth_utterance, write_trajectory_csv
from .training.pipeline import TrainingConfig, load_training_config, train_pipeline, write_stats_csv

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; usage errors here are 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _atomic(path, mode="wb"):
    """Write to a temporary sibling and rename into place only on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _analysis_config(args) -> AnalysisConfig:
    return AnalysisConfig(order=args.order, alpha=args.alpha)


# ---------------------------------------------------------------- subcommands

def cmd_inventory(args) -> None:
    for p in phoneme_inventory():
        attrs = [p.place, p.manner] if p.cls == "consonant" else \
            [p.vowel_height, p.vowel_backness, p.vowel_rounding] if p.cls == "vowel" else []
        flags = [k for k in ("voiced", "aspirated", "nasal") if getattr(p, k)]
        print("\t".join([p.symbol, p.ipa, p.cls, " ".join(a for a in attrs if a),
                         ",".join(flags)]))


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _annotations(path: str, rules):
    text = _read_input(path)
    if text.lstrip().startswith("UTT "):
        return [parse_annotation(text)]
    utts = parse_tagged_text(text, rules)
    if not utts:
        raise ValueError("no utterances in input")
    return utts


def cmd_labels(args) -> None:
    rules = G2PRuleTable.load(args.g2p) if args.g2p else None
    blocks = ["\n".join(format_label(lab) for lab in build_context_labels(u))
              for u in _annotations(args.input, rules)]
    out = "\n\n".join(blocks) + "\n"
    if args.output:
        with _atomic(args.output) as tmp:
            Path(tmp).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _features_of_wav(path, cfg: AnalysisConfig):
    raw = Path(path).read_bytes()
    wav = read_wav(path)
    return hashlib.sha256(raw).digest(), mel_cepstrogram(wav, cfg), \
        f0_to_log(estimate_f0(wav, cfg))


def cmd_analyze(args) -> None:
    cfg = _analysis_config(args)
    digest, mcep, lf0 = _features_of_wav(args.wav, cfg)
    if args.output:
        with _atomic(args.output) as tmp:
            Path(tmp).write_bytes(encode_record(digest, mcep, lf0, cfg.alpha))
    if args.csv:
        with _atomic(args.csv) as tmp, open(tmp, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["frame", *(f"c{m}" for m in range(mcep.shape[1])), "f0_hz_or_0"])
            for t in range(mcep.shape[0]):
                f0 = float(np.exp(lf0[t])) if np.isfinite(lf0[t]) else 0.0
                w.writerow([t, *(repr(float(v)) for v in mcep[t]), repr(f0)])
    voiced = np.isfinite(lf0)
    msg = f"frames={mcep.shape[0]} order={mcep.shape[1] - 1} voiced={voiced.mean():.3f}"
    if voiced.any():
        msg += f" median_f0={np.exp(np.median(lf0[voiced])):.1f}Hz"
    print(msg)


def cmd_train(args) -> None:
    cfg = load_training_config(args.config) if args.config else TrainingConfig()
    acfg = _analysis_config(args)
    entries = load_corpus(args.corpus, acfg)
    print(f"corpus: {len(entries)} utterances")
    models, rows = train_pipeline(entries, cfg, acfg, cache_dir=args.cache, log=print)
    with _atomic(args.output) as tmp:
        save_model_set(models, tmp)
    if args.stats:
        with _atomic(args.stats) as tmp:
            write_stats_csv(rows, tmp)
    print(f"model written to {args.output}")


def cmd_synth(args) -> None:
    models = load_model_set(args.model)
    rules = G2PRuleTable.load(args.g2p) if args.g2p else None
    if args.text is not None:
        utts = parse_tagged_text(args.text, rules)
        if len(utts) != 1:
            raise ValueError("--text must hold exactly one utterance")
        source = utts[0]
    else:
        utts = _annotations(args.input, rules)
        if len(utts) != 1:
            raise ValueError(f"input holds {len(utts)} utterances; synthesize one at a time")
        source = utts[0]
    cfg = SynthesisConfig(target_frames=args.target_frames, gv_weight=args.gv_weight,
                          seed=args.seed)
    res = synth_utterance(source, models, cfg)
    with _atomic(args.output) as tmp:
        write_wav(tmp, res.waveform)
    if args.dump_traj:
        with _atomic(args.dump_traj) as tmp:
            write_trajectory_csv(res, tmp)
    print(f"{len(res.labels)} labels, {res.mcep.shape[0]} frames, "
          f"{res.waveform.duration:.2f} s -> {args.output}")


def cmd_gen_corpus(args) -> None:
    phones = args.phones.split(",") if args.phones else None
    ids = generate_synthetic_corpus(args.output, n=args.n, seed=args.seed, phones=phones)
    print(f"{len(ids)} utterances written to {args.output}")


def _load_track(path, cfg: AnalysisConfig):
    """``(mcep, f0_hz)`` from a WAV, a feature record or a trajectory CSV."""
    p = Path(path)
    head = p.read_bytes()[:len(FEATURE_MAGIC)] if p.exists() else b""
    if head == FEATURE_MAGIC:
        _, mcep, lf0, _ = decode_record(p.read_bytes())
        return mcep, np.where(np.isfinite(lf0), np.exp(np.nan_to_num(lf0)), np.nan)
    if head[:4] == b"RIFF":
        _, mcep, lf0 = _features_of_wav(p, cfg)
        return mcep, np.where(np.isfinite(lf0), np.exp(np.nan_to_num(lf0)), np.nan)
    with open(p, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "f0_hz_or_0" not in rows[0]:
        raise ValueError(f"{path}: not a WAV, feature record or trajectory CSV")
    cols = sorted((k for k in rows[0] if k.startswith("c") and k[1:].isdigit()),
                  key=lambda k: int(k[1:]))
    mcep = np.array([[float(r[k]) for k in cols] for r in rows]).reshape(len(rows), len(cols))
    f0 = np.array([float(r["f0_hz_or_0"]) for r in rows])
    return mcep, np.where(f0 > 0, f0, np.nan)


def cmd_compare_f0(args) -> None:
    cfg = _analysis_config(args)
    _, a = _load_track(args.natural, cfg)
    _, b = _load_track(args.synthesized, cfg)
    res = compare_f0(a, b)
    rmse = "absent" if res.rmse is None else f"{res.rmse:.3f}"
    print(f"rmse_hz={rmse} agreement={res.agreement:.4f} "
          f"frames={res.n_frames} both_voiced={res.n_both_voiced}")
    if args.csv:
        with _atomic(args.csv) as tmp:
            write_f0_comparison_csv(a, b, tmp)


def cmd_compare_spec(args) -> None:
    cfg = _analysis_config(args)
    a, _ = _load_track(args.natural, cfg)
    b, _ = _load_track(args.synthesized, cfg)
    mcd = compare_spectra(a, b)
    print(f"mcd_db={mcd:.4f} frames={min(len(a), len(b))}")
    if args.csv:
        with _atomic(args.csv) as tmp:
            write_mcd_csv(a, b, tmp)


def cmd_mos(args) -> None:
    for row in aggregate_mos(read_mos_csv(args.scores)):
        print(row.display())


# ---------------------------------------------------------------- parser

def _add_analysis_flags(p) -> None:
    d = AnalysisConfig()
    p.add_argument("--order", type=int, default=d.order, help="mel-cepstral order M")
    p.add_argument("--alpha", type=float, default=d.alpha, help="frequency-warping factor")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bengali-hts", description="HMM-based Bengali speech synthesis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="<command>", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("inventory", help="list the 48 phonemes")
    p.set_defaults(func=cmd_inventory)

    p = sub.add_parser("labels", help="full-context labels for tagged text or a .utt file")
    p.add_argument("input", help="tagged-text file, .utt file, or - for stdin")
    p.add_argument("-o", "--output", help="write labels here instead of stdout")
    p.add_argument("--g2p", help="grapheme-to-phoneme rule file (default: built-in table)")
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("analyze", help="mel-cepstra and F0 of a WAV file")
    p.add_argument("wav")
    p.add_argument("-o", "--output", help="write a BHTSF1 feature record")
    p.add_argument("--csv", help="write per-frame features as CSV")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="train a model set from an annotated corpus")
    p.add_argument("corpus", help="directory holding wav/ and utt/")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--config", help="training config file (key = value lines)")
    p.add_argument("--stats", help="write per-stage log-likelihoods as CSV")
    p.add_argument("--cache", help="feature cache directory")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("synth", help="synthesize one utterance")
    p.add_argument("model", help="model file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="tagged text, e.g. 'type=simple-affirmative-verb word/NN ...'")
    src.add_argument("--input", help="tagged-text or .utt file (- for stdin)")
    p.add_argument("-o", "--output", required=True, help="WAV file to write")
    p.add_argument("--target-frames", type=int, help="impose a total length in frames")
    p.add_argument("--gv-weight", type=float, default=0.0,
                   help="global-variance weight (0 disables, 0.7 is typical)")
    p.add_argument("--seed", type=int, default=0, help="seed of the unvoiced noise source")
    p.add_argument("--g2p", help="grapheme-to-phoneme rule file")
    p.add_argument("--dump-traj", metavar="CSV", help="write generated trajectories as CSV")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gen-corpus", help="render a synthetic annotated corpus")
    p.add_argument("output", help="corpus directory to create")
    p.add_argument("-n", type=int, default=20, help="number of utterances")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--phones", help=f"comma-separated phone subset "
                                    f"(default: {','.join(DEFAULT_PHONES)})")
    p.set_defaults(func=cmd_gen_corpus)

    for name, func, what in (("compare-f0", cmd_compare_f0, "F0 RMSE and voicing agreement"),
                             ("compare-spec", cmd_compare_spec, "mel-cepstral distortion")):
        p = sub.add_parser(name, help=f"{what} between natural and synthesized speech")
        p.add_argument("natural", help="WAV, feature record or trajectory CSV")
        p.add_argument("synthesized", help="WAV, feature record or trajectory CSV")
        p.add_argument("--csv", help="write the per-frame comparison as CSV")
        _add_analysis_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("mos", help="aggregate a listening-test score table")
    p.add_argument("scores", help="CSV with columns system,listener,score[,stdev]")
    p.set_defaults(func=cmd_mos)
    return parser


def _check(args) -> None:
    if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
        raise UsageError("-n must be >= 1")
    if getattr(args, "target_frames", None) is not None and args.target_frames < 1:
        raise UsageError("--target-frames must be >= 1")
    if getattr(args, "gv_weight", 0.0) < 0:
        raise UsageError("--gv-weight must be >= 0")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bengali-hts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except (ValueError, OSError, RuntimeError, KeyError) as exc:
        print(f"bengali-hts {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
