"""Command-line driver. Each subcommand translates arguments and calls the library.

Exit codes: 0 ok, 1 violations found, 2 usage or input error, 3 invariant breach.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from ._congruence import check_acyclic
from ._util import dumps, from_jsonable, id_key, to_jsonable
from .colim import pushout_glob_explicit, pushout_glob_generic
from .enumerated import iso_pi0
from .errors import FlowError
from .generators import random_pushout_instance
from .precubical import realize_flow
from .presentation import presentation_from_json, schedule_classes, validate
from .pv import analyze, parse_pv, report_to_dot, swiss_flag, to_precubical

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BREACH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_program(args):
    if getattr(args, "swiss", False):
        return swiss_flag()
    if not args.file:
        raise UsageError("give a PV source file or --swiss")
    return parse_pv(_read(args.file))


def _parse_state(text: str):
    try:
        return from_jsonable(json.loads(text))
    except json.JSONDecodeError:
        pass
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        return text


def _load_flow(path: str):
    """A presentation from JSON, or the realized progress graph of a PV source."""
    text = _read(path)
    if path.endswith(".json"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc.msg})") from None
        return presentation_from_json(doc)
    return realize_flow(to_precubical(parse_pv(text), max_dim=2))


def cmd_analyze(args, out) -> int:
    program = _load_program(args)
    report = analyze(program, max_procs=args.max_processes)
    if args.format == "json":
        out.write(dumps(report.to_json()))
    elif args.format == "dot":
        out.write(report_to_dot(program, report, max_procs=args.max_processes))
    else:
        out.write(report.to_text())
    if args.fail_on_deadlock and report.deadlocks:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_schedules(args, out) -> int:
    flow = _load_flow(args.file)
    src, tgt = _parse_state(args.source), _parse_state(args.target)
    reps = schedule_classes(flow, src, tgt)
    doc = {
        "from": to_jsonable(src),
        "to": to_jsonable(tgt),
        "count": len(reps),
        "representatives": [[id_key(e) for e in w] for w in reps],
    }
    if args.format == "json":
        out.write(dumps(doc))
    else:
        out.write(f"{len(reps)} schedule classes from {id_key(src)} to {id_key(tgt)}\n")
        for w in doc["representatives"]:
            out.write("  " + " . ".join(w) + "\n")
    return EXIT_OK


def cmd_check(args, out) -> int:
    text = _read(args.file)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.file}: invalid JSON ({exc.msg})") from None
    p = presentation_from_json(doc)
    problems = [str(v) for v in validate(p)]
    if not problems:
        try:
            check_acyclic(p.states, p.letters)
        except FlowError as exc:
            problems.append(f"{type(exc).__name__}: {exc}")
    doc = {"ok": not problems, "violations": problems, "states": len(p.states), "letters": len(p.letters)}
    if args.format == "json":
        out.write(dumps(doc))
    else:
        out.write("ok\n" if not problems else "".join(f"{v}\n" for v in problems))
    return EXIT_OK if not problems else EXIT_VIOLATION


def cmd_oracle_pushout(args, out, err) -> int:
    rng = random.Random(args.seed)
    failures = []
    for _ in range(args.count):
        seed = rng.randrange(2**31)
        inst = random_pushout_instance(seed)
        explicit = pushout_glob_explicit(*inst.args())
        generic = pushout_glob_generic(*inst.args()).flow
        if iso_pi0(explicit, generic) is None:
            failures.append(seed)
    passed = args.count - len(failures)
    out.write(f"{passed}/{args.count} isomorphic\n")
    if failures:
        err.write(f"run seed {args.seed}; failing instance seeds: {failures}\n")
        return EXIT_BREACH
    return EXIT_OK


def cmd_export(args, out) -> int:
    program = _load_program(args)
    text = report_to_dot(program, max_procs=args.max_processes)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowcat", description="Flows, progress graphs and schedule classes.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="diagnose a PV program")
    a.add_argument("file", nargs="?")
    a.add_argument("--swiss", action="store_true", help="use the builtin two-lock example")
    a.add_argument("--format", choices=("json", "text", "dot"), default="text")
    a.add_argument("--fail-on-deadlock", action="store_true")
    a.add_argument("--max-processes", type=_positive, default=None)

    s = sub.add_parser("schedules", help="schedule classes between two states")
    s.add_argument("file")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--format", choices=("json", "text"), default="json")

    c = sub.add_parser("check", help="validate a presentation JSON file")
    c.add_argument("file")
    c.add_argument("--format", choices=("json", "text"), default="text")

    o = sub.add_parser("oracle-pushout", help="explicit vs generic globe pushouts")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--count", type=_positive, default=100)

    e = sub.add_parser("export", help="progress graph in DOT")
    e.add_argument("file", nargs="?")
    e.add_argument("--swiss", action="store_true")
    e.add_argument("--dot", action="store_true", required=True)
    e.add_argument("-o", "--output")
    e.add_argument("--max-processes", type=_positive, default=None)
    return parser


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "analyze":
            return cmd_analyze(args, out)
        if args.command == "schedules":
            return cmd_schedules(args, out)
        if args.command == "check":
            return cmd_check(args, out)
        if args.command == "oracle-pushout":
            return cmd_oracle_pushout(args, out, err)
        if args.command == "export":
            return cmd_export(args, out)
    except (UsageError, FlowError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_BREACH
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())
