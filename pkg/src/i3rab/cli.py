"""Command-line entry point: validate, convert, stats, train, parse,
eval, crossval, render.

Exit codes: 0 success, 1 validation/data errors found, 2 usage error,
3 I/O error, 4 internal failure.
"""

from __future__ import annotations

import argparse
import sys

from . import convert as convert_mod
from . import evaluate as eval_mod
from . import parser as parser_mod
from . import render as render_mod
from .conllx import Treebank, emit_treebank, parse_treebank
from .errors import I3rabError
from .schema import Schema, Severity, load_schema_file, validate_treebank

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


def _load_schema(spec: str | None) -> Schema:
    if spec is None or spec == "default":
        return Schema()
    return load_schema_file(spec)


def _read_treebank(path: str) -> Treebank:
    with open(path, encoding="utf-8") as handle:
        return parse_treebank(handle.read(), source=path)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _cmd_validate(args) -> int:
    schema = _load_schema(args.schema)
    tb = _read_treebank(args.file)
    violations = validate_treebank(tb, schema)
    for violation in violations:
        print(violation)
    errors = [v for v in violations if v.severity is Severity.ERROR]
    print(
        "%d sentences, %d violations (%d errors)"
        % (len(tb), len(violations), len(errors))
    )
    return EXIT_DATA if errors else EXIT_OK


def _cmd_convert(args) -> int:
    schema = _load_schema(args.schema)
    if args.rules is None or args.rules == "default":
        rules = convert_mod.default_rules(schema)
    else:
        with open(args.rules, encoding="utf-8") as handle:
            rules = convert_mod.load_rules(handle.read(), schema)
    overrides = _read_treebank(args.overrides) if args.overrides else None
    tb = _read_treebank(args.input)
    converted, report = convert_mod.convert_treebank(tb, rules, overrides)
    _write_text(args.output, emit_treebank(converted))
    if args.report:
        _write_text(args.report, report.as_text())
    sys.stderr.write(report.as_text())
    return EXIT_OK


def _cmd_stats(args) -> int:
    schema = _load_schema(args.schema)
    tb = _read_treebank(args.file)
    opts = eval_mod.EvalOptions(
        exclude_punct=args.exclude_punct,
        exclude_root_dot_distance=args.exclude_root_dot,
    )
    direction = eval_mod.direction_stats(tb, opts, schema)
    root_hist, other_hist = eval_mod.distance_histogram(tb, opts, schema)
    classes = eval_mod.cardinality_classes(tb, opts, schema)
    shares = eval_mod.label_shares(tb, opts, schema)
    if args.machine:
        out = [direction.as_machine()]
        for dist, count in root_hist.as_rows():
            out.append("root_distance_%d\t%d\n" % (dist, count))
        for dist, count in other_hist.as_rows():
            out.append("other_distance_%d\t%d\n" % (dist, count))
        for label in sorted(classes):
            out.append("cardinality_%s\t%s\n" % (label, classes[label]))
        print("".join(out), end="")
        return EXIT_OK
    print("== arc direction ==")
    print(direction.as_text(), end="")
    print("== dependency distance: ROOT to main word ==")
    for dist, count in root_hist.as_rows():
        print("distance %-3d %6d  (%.2f%%)" % (dist, count, root_hist.share(dist)))
    print("== dependency distance: head to modifier ==")
    for dist, count in other_hist.as_rows():
        print("distance %-3d %6d  (%.2f%%)" % (dist, count, other_hist.share(dist)))
    print("== relation cardinality ==")
    for label in sorted(classes):
        print("%-12s %6.2f%%  %s" % (label, shares[label], classes[label]))
    return EXIT_OK


def _cmd_train(args) -> int:
    schema = _load_schema(args.schema)
    tb = _read_treebank(args.train)
    model, report = parser_mod.train(
        tb, epochs=args.epochs, seed=args.seed, schema=schema
    )
    model.save(args.model)
    print(
        "trained on %d/%d sentences (%d non-projective skipped), "
        "%d epochs, %d updates"
        % (
            report.used,
            report.sentences,
            report.skipped_nonprojective,
            report.epochs,
            report.updates,
        )
    )
    return EXIT_OK


def _cmd_parse(args) -> int:
    model = parser_mod.ParserModel.load(args.model)
    tb = _read_treebank(args.input)
    parsed = parser_mod.parse_treebank_with_model(tb, model)
    _write_text(args.output, emit_treebank(parsed))
    return EXIT_OK


def _cmd_eval(args) -> int:
    gold = _read_treebank(args.gold)
    pred = _read_treebank(args.pred)
    opts = eval_mod.EvalOptions(exclude_punct=args.exclude_punct)
    report = eval_mod.attachment_scores(gold, pred, opts)
    if args.machine:
        print(report.as_machine(), end="")
    else:
        print("UAS %.2f / LAS %.2f" % (report.uas, report.las))
    return EXIT_OK


def _cmd_crossval(args) -> int:
    schema = _load_schema(args.schema)
    tb = _read_treebank(args.file)
    opts = eval_mod.EvalOptions(exclude_punct=args.exclude_punct)
    scores = eval_mod.cross_validate(
        tb, k=args.k, epochs=args.epochs, seed=args.seed, opts=opts, schema=schema
    )
    print(scores.as_text(), end="")
    return EXIT_OK


def _cmd_render(args) -> int:
    tb = _read_treebank(args.file)
    text = render_mod.render_treebank(tb, format=args.format, rtl=args.rtl)
    _write_text(args.output, text)
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="i3rab",
        description="Treebank toolkit for the I3rab dependency scheme",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a treebank against the schema")
    p.add_argument("--schema", default=None)
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("convert", help="convert PADT-style trees to I3rab")
    p.add_argument("--schema", default=None)
    p.add_argument("--rules", default=None)
    p.add_argument("--overrides", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("stats", help="direction, distance and cardinality stats")
    p.add_argument("--schema", default=None)
    p.add_argument("--exclude-punct", action="store_true")
    p.add_argument("--exclude-root-dot", action="store_true")
    p.add_argument("--machine", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train the transition parser")
    p.add_argument("--schema", default=None)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("train")
    p.add_argument("model")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("parse", help="parse sentences with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("eval", help="UAS/LAS of a prediction against gold")
    p.add_argument("--exclude-punct", action="store_true")
    p.add_argument("--machine", action="store_true")
    p.add_argument("gold")
    p.add_argument("pred")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("crossval", help="k-fold cross-validation")
    p.add_argument("--schema", default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--exclude-punct", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("render", help="draw dependency trees")
    p.add_argument("--format", choices=("text", "svg"), default="text")
    p.add_argument("--rtl", action="store_true")
    p.add_argument("file")
    p.add_argument("output")
    p.set_defaults(func=_cmd_render)

    return top


def run_command(argv: list[str]) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        sys.stderr.write("i3rab: %s\n" % exc)
        return EXIT_IO
    except I3rabError as exc:
        sys.stderr.write("i3rab: %s\n" % exc)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        sys.stderr.write("i3rab: internal error: %r\n" % exc)
        return EXIT_INTERNAL


def main() -> int:
    return run_command(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
