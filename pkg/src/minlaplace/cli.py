"""Command-line front end.

Exit codes: 0 pass, 1 domain failure (validation, comparison or corpus
diff), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .connection import validate_admissible, validate_resonance_free
from .documents import DocumentError, build_report, load_connection, render_report

__all__ = ["main", "corpus_entries", "golden_path", "report_for"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FIXTURE_SUFFIX = ".conn.json"
GOLDEN_SUFFIX = ".report.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def corpus_entries(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.name.endswith(FIXTURE_SUFFIX))


def golden_path(fixture: Path) -> Path:
    return fixture.with_name(fixture.name[: -len(FIXTURE_SUFFIX)] + GOLDEN_SUFFIX)


def report_for(path: Path, mode: str = "full", involution: bool = True) -> tuple[str, bool]:
    conn = load_connection(path)
    report, ok = build_report(conn, mode=mode, involution=involution)
    return render_report(report), ok


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        conn = load_connection(args.path)
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    reports = [validate_resonance_free(conn), validate_admissible(conn)]
    lines = [line for r in reports for line in r.lines()]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def cmd_transform(args) -> int:
    path = Path(args.path)
    mode = "predict-only" if args.predict_only else ("full" if args.full else "summary")
    targets = corpus_entries(path) if path.is_dir() else [path]
    chunks, status = [], EXIT_PASS
    for target in targets:
        start = time.perf_counter()
        try:
            conn = load_connection(target)
        except DocumentError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report, ok = build_report(conn, mode=mode, involution=args.involution)
        if args.timing:
            report["timing_seconds"] = f"{time.perf_counter() - start:.3f}"
        chunks.append(render_report(report))
        if not ok:
            status = EXIT_FAIL
    _emit("".join(chunks), args.out)
    return status


def _changed_checks(stored: str, text: str) -> list[tuple[str, str]]:
    """Summary check lines that differ between two rendered reports."""
    try:
        before, after = json.loads(stored).get("checks", []), json.loads(text).get("checks", [])
    except (json.JSONDecodeError, AttributeError):
        return []
    missing = "<absent>"
    pairs = []
    for n in range(max(len(before), len(after))):
        a = before[n] if n < len(before) else missing
        b = after[n] if n < len(after) else missing
        if a != b:
            pairs.append((a, b))
    return pairs


def cmd_corpus_check(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"not a directory: {directory}", file=sys.stderr)
        return EXIT_USAGE
    entries = corpus_entries(directory)
    if not entries:
        print(f"warning: no fixtures (*{FIXTURE_SUFFIX}) in {directory}", file=sys.stderr)
        return EXIT_PASS
    status = EXIT_PASS
    for fixture in entries:
        try:
            text, _ = report_for(fixture)
        except DocumentError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        golden = golden_path(fixture)
        if args.update:
            golden.write_text(text, encoding="utf-8")
            print(f"{fixture.name}: golden written")
            continue
        if not golden.exists():
            print(f"{fixture.name}: missing golden report {golden.name}")
            status = EXIT_FAIL
            continue
        stored = golden.read_text(encoding="utf-8")
        if stored == text:
            print(f"{fixture.name}: identical")
            continue
        status = EXIT_FAIL
        old, new = stored.splitlines(), text.splitlines()
        for n, (a, b) in enumerate(zip(old, new), start=1):
            if a != b:
                break
        else:
            n = min(len(old), len(new)) + 1
            a = old[n - 1] if n <= len(old) else "<end of file>"
            b = new[n - 1] if n <= len(new) else "<end of file>"
        print(f"{fixture.name}: differs at line {n}\n  golden:   {a.strip()}\n  computed: {b.strip()}")
        for before, after in _changed_checks(stored, text):
            print(f"  check changed: {before}\n             now: {after}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minlaplace", description="Minimal Laplace transform of parabolic connections.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check resonance-freeness and admissibility")
    v.add_argument("path")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("transform", help="predict, transform and compare")
    t.add_argument("path", help="connection document or a directory of *.conn.json fixtures")
    group = t.add_mutually_exclusive_group()
    group.add_argument("--predict-only", action="store_true", help="stationary-phase prediction only")
    group.add_argument("--full", action="store_true", help="include the entries of X(xi)")
    t.add_argument("--involution", action="store_true", help="append the round-trip verdicts")
    t.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identity)")
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    c = sub.add_parser("corpus-check", help="recompute reports and diff against goldens")
    c.add_argument("dir")
    c.add_argument("--update", action="store_true", help="rewrite the golden reports")
    c.set_defaults(func=cmd_corpus_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
