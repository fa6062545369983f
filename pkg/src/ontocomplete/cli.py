"""Command-line entry point.

Exit codes: 0 success, 1 input carrying error diagnostics, 2 usage error,
3 ``gate`` ran but the threshold was not reached.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import report
from .advisor import DEFAULT_THRESHOLD, gate_phase, place_phase, recommend_improvements
from .octree import Phase, builtin_profiles, default_tree, evaluate
from .parser import PROFILE_ENV, ParseDiagnostic, load_profile_file, parse_ontology
from .replay import ReplayError, load_snapshots, replay, to_csv

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE, EXIT_GATE_CLOSED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("threshold must be in (0, 1]")
    return value


def _phase(text: str) -> Phase:
    try:
        return Phase.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ontocomplete", description="Ontology completeness evaluation.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, formats: tuple[str, ...], default: str, with_phase: bool = True) -> None:
        sp.add_argument("--profile", help=f"weight profile JSON (default: ${PROFILE_ENV} or built-in)")
        if with_phase:
            sp.add_argument("--phase", type=_phase, help="development phase, e.g. 2.3 (default: placed automatically)")
        sp.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD, help="gate threshold in (0, 1]")
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    for name, help_text in (
        ("evaluate", "OC score, per-node prices and element counts"),
        ("recommend", "improvement actions sorted by projected gain"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("ontology")
        common(sp, ("text", "json", "html"), "text")

    sp = sub.add_parser("gate", help="decide whether to progress to the next phase")
    sp.add_argument("ontology")
    common(sp, ("text", "json"), "text")

    sp = sub.add_parser("place", help="suggest the phase to resume work in")
    sp.add_argument("ontology")
    common(sp, ("text", "json"), "text", with_phase=False)

    sp = sub.add_parser("replay", help="evaluate a directory of snapshots in file-name order")
    sp.add_argument("snapshots", help="directory of .ttl snapshots")
    common(sp, ("csv", "json"), "csv", with_phase=False)
    return p


def _print_diagnostics(source: str, diagnostics: list[ParseDiagnostic]) -> None:
    for d in diagnostics:
        print(f"{source}:{d}", file=sys.stderr)


def _load_profiles(path: str | None):
    path = path or os.environ.get(PROFILE_ENV) or None
    if path is None:
        tree = default_tree()
        return tree, builtin_profiles(tree)
    if not Path(path).is_file():
        raise UsageError(f"profile not found: {path}")
    result = load_profile_file(path)
    _print_diagnostics(path, result.diagnostics)
    if not result.ok:
        raise InputError(path)
    return result.tree, result.profiles


def _load_ontology(path: str):
    if not Path(path).is_file():
        raise UsageError(f"ontology not found: {path}")
    parsed = parse_ontology(Path(path).read_text(encoding="utf-8"))
    _print_diagnostics(path, parsed.diagnostics)
    if not parsed.ok:
        raise InputError(path)
    return parsed.ontology


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"ontocomplete: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError:
        return EXIT_DIAGNOSTICS


def _dispatch(args: argparse.Namespace) -> int:
    tree, profiles = _load_profiles(args.profile)

    if args.command == "replay":
        directory = Path(args.snapshots)
        if not directory.is_dir():
            raise UsageError(f"not a directory: {directory}")
        docs, names = load_snapshots(directory)
        try:
            records = replay(docs, profiles, args.threshold, tree, names)
        except ReplayError as exc:
            _print_diagnostics(str(directory / names[exc.iteration - 1]), exc.diagnostics)
            print(f"ontocomplete: error: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        if args.format == "csv":
            _emit(to_csv(records), args.output)
        else:
            rows = [
                {
                    "iteration": r.iteration,
                    "phase": r.phase.value,
                    "oc": round(r.oc, 4),
                    **r.counts.as_dict(),
                    "gate_fired": r.gate_fired,
                }
                for r in records
            ]
            _emit(json.dumps(rows, indent=2) + "\n", args.output)
        return EXIT_OK

    onto = _load_ontology(args.ontology)

    if args.command == "place":
        phase = place_phase(onto, profiles, args.threshold, tree)
        if args.format == "json":
            _emit(json.dumps({"phase": phase.value, "title": phase.title}) + "\n", args.output)
        else:
            _emit(f"suggested phase: {phase.value} ({phase.title})\n", args.output)
        return EXIT_OK

    phase = args.phase or place_phase(onto, profiles, args.threshold, tree)
    result = evaluate(tree, profiles[phase], onto)

    if args.command == "gate":
        decision = gate_phase(result, phase, args.threshold)
        if args.format == "json":
            payload = {
                "phase": phase.value,
                "oc": result.oc,
                "threshold": decision.threshold,
                "advance": decision.advance,
                "next_phase": decision.next_phase.value if decision.next_phase else None,
            }
            _emit(json.dumps(payload) + "\n", args.output)
        else:
            _emit(f"OC {report.pct(result.oc)} in phase {phase.value}: {decision.message()}\n", args.output)
        return EXIT_OK if decision.advance else EXIT_GATE_CLOSED

    actions = recommend_improvements(result)
    if args.format == "json":
        _emit(json.dumps(report.to_json(result, actions), indent=2) + "\n", args.output)
    elif args.format == "html":
        _emit(report.to_html(result, actions), args.output)
    else:
        _emit(report.to_text(result, actions, details=args.command == "recommend"), args.output)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
