"""Command-line entry point: mine, match, export, import, serve.

Exit codes: 0 success, 1 matches found under --fail-on-match, 2 usage
or configuration error. stdout carries only the report (table or
JSON); diagnostics go to stderr.
"""

import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path

from .match import TriageFilter
from .pipeline import MineConfig, match_checkout, mine_repository
from .repo import IssueMatcher, RepoError
from .server import ServeModel, make_server
from .store import PatternStore, StoreError, export_jsonl, import_jsonl

EXIT_OK = 0
EXIT_MATCHES = 1
EXIT_CONFIG = 2


class CliError(Exception):
    pass


def _add_filter_flags(parser):
    parser.add_argument("--log-keyword", help="keep patterns whose past commit logs contain this")
    parser.add_argument("--max-matches", type=int, metavar="N",
                        help="keep patterns matching at most N fragments in the revision")
    parser.add_argument("--path-keyword", help="keep matches whose file path contains this")
    parser.add_argument("--exclude-path", help="drop matches whose file path contains this")
    parser.add_argument("--ignore-case", action="store_true",
                        help="case-insensitive keyword filters")


def _triage_from_args(args) -> TriageFilter:
    if args.max_matches is not None and args.max_matches <= 0:
        raise CliError("--max-matches must be positive")
    return TriageFilter(
        log_keyword=args.log_keyword,
        max_matches=args.max_matches,
        path_keyword=args.path_keyword,
        exclude_path=args.exclude_path,
        ignore_case=args.ignore_case,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugpat",
        description="Derive project-specific bug patterns from a git history "
        "and match them against a target revision.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log details to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mine = sub.add_parser("mine", help="mine a repository into a pattern database")
    p_mine.add_argument("repo", help="path to a local clone")
    p_mine.add_argument("--db", required=True, help="pattern database file to create")
    p_mine.add_argument("--branch", default="HEAD", help="branch to walk (default HEAD)")
    p_mine.add_argument("--since", help="ignore commits before this date (YYYY-MM-DD)")
    group = p_mine.add_mutually_exclusive_group(required=True)
    group.add_argument("--issues", help="file with one bug-related issue ID per line")
    group.add_argument("--issue-regex", help="regex marking bug-fix commit messages")
    p_mine.add_argument("--ext", action="append", default=None, metavar=".EXT",
                        help="source file extension (repeatable, default .java)")
    p_mine.add_argument("--no-normalize", action="store_true",
                        help="diagnostic: skip identifier/literal abstraction")
    p_mine.add_argument("--force", action="store_true", help="overwrite an existing database")

    p_match = sub.add_parser("match", help="match a revision checkout against a database")
    p_match.add_argument("revision", help="checkout directory of the target revision")
    p_match.add_argument("--db", required=True, help="pattern database from 'mine'")
    _add_filter_flags(p_match)
    p_match.add_argument("--json", action="store_true", help="one JSON object per match")
    p_match.add_argument("--fail-on-match", action="store_true",
                         help="exit 1 if any match survives the filters")
    p_match.add_argument("--ext", action="append", default=None, metavar=".EXT",
                         help="override source extensions recorded in the database")

    p_export = sub.add_parser("export", help="dump a database as JSON Lines")
    p_export.add_argument("--db", required=True)
    p_export.add_argument("-o", "--output", help="output file (default stdout)")

    p_import = sub.add_parser("import", help="rebuild a database from JSON Lines")
    p_import.add_argument("--db", required=True, help="database file to create")
    p_import.add_argument("-i", "--input", help="input file (default stdin)")
    p_import.add_argument("--force", action="store_true", help="overwrite an existing database")

    p_serve = sub.add_parser("serve", help="serve the triage HTTP API (and optional UI)")
    p_serve.add_argument("revision", help="checkout directory of the target revision")
    p_serve.add_argument("--db", required=True)
    p_serve.add_argument("--bind", default="127.0.0.1:8731", metavar="HOST:PORT")
    p_serve.add_argument("--ui-dir", help="directory with built UI assets to serve at /")
    return parser


def _parse_since(raw):
    if raw is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise CliError(f"bad --since date: {exc}") from exc


def _guard_db_overwrite(db_path: str, force: bool):
    if Path(db_path).exists() and not force:
        raise CliError(f"database exists: {db_path} (use --force to overwrite)")


def cmd_mine(args) -> int:
    _guard_db_overwrite(args.db, args.force)
    if args.issues:
        matcher = IssueMatcher.from_id_file(args.issues)
    else:
        matcher = IssueMatcher.from_regex(args.issue_regex)
    config = MineConfig(
        repo_path=args.repo,
        db_path=args.db,
        matcher=matcher,
        branch=args.branch,
        since=_parse_since(args.since),
        extensions=tuple(args.ext) if args.ext else (".java",),
        normalize=not args.no_normalize,
    )
    summary = mine_repository(config)
    for line in summary.lines():
        print(line)
    return EXIT_OK


def _print_match_table(results):
    if not results:
        print("no matches")
        return
    width = max(len(f"{r.path}:{r.line_span[0]}-{r.line_span[1]}") for r in results)
    print(f"{'PSBP':>5}  {'LOCATION':<{width}}  SUGGESTED FIX")
    for r in results:
        location = f"{r.path}:{r.line_span[0]}-{r.line_span[1]}"
        suggestion = r.suggested_after_text.replace("\n", " ⏎ ") or "(delete)"
        print(f"{r.psbp_id:>5}  {location:<{width}}  {suggestion}")


def cmd_match(args) -> int:
    triage = _triage_from_args(args)
    outcome = match_checkout(
        db_path=args.db,
        revision_dir=args.revision,
        triage=triage,
        extensions=tuple(args.ext) if args.ext else None,
    )
    if args.json:
        for r in outcome.results:
            print(
                json.dumps(
                    {
                        "psbp_id": r.psbp_id,
                        "path": r.path,
                        "start_index": r.start_index,
                        "end_index": r.end_index,
                        "start_line": r.line_span[0],
                        "end_line": r.line_span[1],
                        "suggested_after_text": r.suggested_after_text,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )
    else:
        _print_match_table(outcome.results)
    if args.fail_on_match and outcome.results:
        return EXIT_MATCHES
    return EXIT_OK


def cmd_export(args) -> int:
    with PatternStore.open(args.db) as store:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                export_jsonl(store, fh)
        else:
            export_jsonl(store, sys.stdout)
    return EXIT_OK


def cmd_import(args) -> int:
    _guard_db_overwrite(args.db, args.force)
    if args.input:
        with open(args.input, "r", encoding="utf-8") as fh:
            store = import_jsonl(fh, args.db)
    else:
        store = import_jsonl(sys.stdin, args.db)
    store.close()
    return EXIT_OK


def cmd_serve(args) -> int:
    host, _, port_raw = args.bind.rpartition(":")
    if not host or not port_raw.isdigit():
        raise CliError(f"bad --bind address: {args.bind} (expected HOST:PORT)")
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    if ui_dir is not None and not ui_dir.is_dir():
        raise CliError(f"--ui-dir is not a directory: {ui_dir}")
    model = ServeModel.load(args.db, args.revision)
    try:
        server = make_server(model, host, int(port_raw), ui_dir)
    except OSError as exc:
        raise CliError(f"cannot bind {args.bind}: {exc}") from exc
    bound_host, bound_port = server.server_address[:2]
    print(f"listening on http://{bound_host}:{bound_port}/", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


_COMMANDS = {
    "mine": cmd_mine,
    "match": cmd_match,
    "export": cmd_export,
    "import": cmd_import,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (CliError, RepoError, StoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
