"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data/config error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, atomic_write_json, atomic_write_text, dumps_jsonl, read_jsonl
from .errors import ConfigError, EmoLabError, NonFiniteLoss
from .experiments import AblationGrid, ordering_summary, run_ablation, run_training, write_run_artifacts
from .geometry import build_transition_matrix, load_label_set
from .metrics import MetricsReport, compare_runs, evaluate, format_comparison
from .rewards import AlphaSchedule, RewardConfig, Scorer, ReasoningPattern, parse_response
from .sim import EnvConfig, SpeechEmotionEnv

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self, message)


def _pattern(value: str) -> ReasoningPattern:
    try:
        return ReasoningPattern.parse(value)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_matrix(args) -> int:
    csv_text = build_transition_matrix(load_label_set(args.labels)).to_csv(6)
    if args.out:
        atomic_write_text(args.out, csv_text)
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_score(args) -> int:
    label_set = load_label_set(args.labels)
    config = RewardConfig(gamma=args.gamma, alpha_schedule=AlphaSchedule.constant(args.alpha),
                          accuracy_kind=args.accuracy, gate_accuracy_on_format=args.gate_accuracy_on_format)
    scorer = Scorer(args.pattern, config, build_transition_matrix(label_set))
    out = []
    for rec in read_jsonl(args.inp):
        gold = label_set.match(rec.get("gold"))
        if gold is None:
            raise ConfigError(f"record {rec.get('id')!r}: gold {rec.get('gold')!r} not in label set")
        out.append({**rec, **scorer(rec.get("response", ""), gold).to_json()})
    atomic_write_text(args.out, dumps_jsonl(out))
    n = len(out)
    if n:
        print(f"scored {n} records: format rate {sum(r['format'] for r in out) / n:.4f}, "
              f"mean accuracy {sum(r['accuracy'] for r in out) / n:.4f}, "
              f"mean total {sum(r['total'] for r in out) / n:.4f}")
    else:
        print("scored 0 records")
    return EXIT_OK


def cmd_validate(args) -> int:
    label_set = load_label_set(args.labels)
    n = ok = 0
    for i, rec in enumerate(read_jsonl(args.inp)):
        parsed = parse_response(rec.get("response", ""), args.pattern, label_set)
        n += 1
        ok += parsed.format_valid
        answer = parsed.answer.name if parsed.answer else "-"
        print(f"{rec.get('id', i)}\t{'valid' if parsed.format_valid else 'INVALID'}\t{answer}")
    rate = ok / n if n else 0.0
    print(f"pass rate: {ok}/{n} ({100 * rate:.2f}%)")
    return EXIT_OK


def cmd_simulate(args) -> int:
    path = Path(args.config)
    doc = json.loads(path.read_text())
    config = EnvConfig.from_json(doc, path.parent)
    env = SpeechEmotionEnv(config)
    atomic_write_text(args.out, dumps_jsonl(ep.to_json() for ep in env.episodes(args.n, args.stream)))
    return EXIT_OK


def cmd_train(args) -> int:
    config = RunConfig.load(args.config).with_env_override()
    out_dir = Path(args.out_dir) if args.out_dir else config.out_dir
    if out_dir is None:
        raise ConfigError("no output directory: pass --out-dir or set out_dir in the config")
    try:
        run, _ = run_training(config)
    except NonFiniteLoss as exc:
        partial = getattr(exc, "run", None)
        if partial is not None:
            write_run_artifacts(partial, config, out_dir)
        raise
    write_run_artifacts(run, config, out_dir)
    if run.curve:
        last = run.curve[-1]
        print(f"{len(run.curve)} steps in {run.wall_time:.2f}s; final window UA {last['ua']:.4f}, "
              f"format rate {last['format_rate']:.4f}, mean reward {last['mean_reward']:.4f}")
    else:
        print("0 steps; policy unchanged")
    return EXIT_OK


def cmd_eval(args) -> int:
    label_set = load_label_set(args.labels)
    records = [(r["gold"], r.get("pred")) for r in read_jsonl(args.inp)]
    rep = evaluate(records, label_set, args.average_over)
    atomic_write_json(args.report, rep.to_json())
    print(rep.pretty())
    return EXIT_OK


def cmd_compare(args) -> int:
    reports = {}
    for item in args.reports:
        name, _, path = item.rpartition("=") if "=" in item else (Path(item).stem, "", item)
        reports[name] = MetricsReport.from_json(json.loads(Path(path).read_text()))
    print(format_comparison(compare_runs(reports, args.baseline), args.baseline))
    return EXIT_OK


def cmd_ablation(args) -> int:
    if args.config:
        path = Path(args.config)
        grid = AblationGrid.from_json(json.loads(path.read_text()), path.parent)
    else:
        grid = AblationGrid()
    if args.seeds:
        grid = AblationGrid(grid.base, grid.variants, tuple(args.seeds), grid.eval_episodes, grid.baseline)
    result = run_ablation(grid, args.out_dir, args.workers)
    print(result.format_table())
    summary = ordering_summary(result)
    n = len(grid.seeds)
    print(f"ESWR >= BCR in {len(summary['eswr_ge_bcr_seeds'])}/{n} seeds")
    if summary["pattern_order_checked"]:
        print(f"ESR >= EUR >= IR in {len(summary['pattern_order_seeds'])}/{n} seeds "
              f"(strict in {len(summary['pattern_order_strict_seeds'])}/{n})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emolab", description="Emotion-similarity GRPO laboratory.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("matrix", help="export the emotion similarity matrix as CSV")
    p.add_argument("--labels", required=True, help="built-in set name (meld7, iemocap4) or JSON file")
    p.add_argument("--out", help="write to file instead of stdout")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("score", help="score JSONL responses")
    p.add_argument("--pattern", type=_pattern, required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--gamma", type=float, default=0.7)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--accuracy", choices=("eswr", "bcr"), default="eswr")
    p.add_argument("--gate-accuracy-on-format", action="store_true",
                   help="award accuracy only when the format is valid")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("validate", help="check responses against a format grammar")
    p.add_argument("--pattern", type=_pattern, required=True)
    p.add_argument("--labels", default="meld7")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="dump synthetic episodes as JSONL")
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--stream", choices=("train", "eval"), default="train")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train a policy from a run config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="UA/WA/macro-F1 from prediction records")
    p.add_argument("--labels", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--average-over", choices=("observed", "all"), default="observed")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="rank metric reports against a baseline")
    p.add_argument("--baseline", required=True)
    p.add_argument("reports", nargs="+", help="report.json files, optionally as name=path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ablation", help="train and compare reward/pattern variants")
    p.add_argument("--config", help="grid JSON; defaults to {bcr,eswr} x {ir,eur,esr} over seeds 0-4")
    p.add_argument("--out-dir")
    p.add_argument("--seeds", type=int, nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_ablation)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"{exc.parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EmoLabError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
