"""Read-only HTTP JSON API over a mined database and a target revision.

Endpoints (all GET, UTF-8 JSON):
    /api/files                      files with per-file match counts
    /api/patterns?file=PATH         matched patterns with metrics
    /api/patterns/<id>/changes      the past deltas behind one pattern
    /api/source?path=PATH           raw source text of a revision file
Filter query parameters on /api/files and /api/patterns:
    log_kw, max_matches, path_kw, exclude_path, ignore_case
Static files are served from an optional UI directory at / .
"""

import json
import logging
import mimetypes
from dataclasses import dataclass
from functools import partial
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .match import MatchResult, TriageFilter, apply_filters, match_revision, scan_revision
from .psbp import Psbp, extract_psbps
from .repo import CommitRecord
from .store import PatternStore

logger = logging.getLogger(__name__)


@dataclass
class ServeModel:
    """Everything the API serves, loaded once and then read-only."""

    file_paths: list[str]
    source_texts: dict[str, str]
    psbps: list[Psbp]
    results: list[MatchResult]
    commits: dict[str, CommitRecord]

    @classmethod
    def load(cls, db_path, revision_dir, extensions: Optional[tuple[str, ...]] = None):
        with PatternStore.open(db_path) as store:
            if extensions is None:
                stored = store.get_meta("extensions")
                extensions = tuple(stored.split(",")) if stored else (".java",)
            normalize = store.get_meta("normalize") != "0"
            psbps = extract_psbps(store)
            commits = store.commits()
        files = scan_revision(Path(revision_dir), extensions, normalize)
        results = match_revision(psbps, files)
        revision_dir = Path(revision_dir)
        texts = {}
        for nf in files:
            try:
                texts[nf.path] = (revision_dir / nf.path).read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError):
                texts[nf.path] = ""
        return cls(
            file_paths=[nf.path for nf in files],
            source_texts=texts,
            psbps=psbps,
            results=results,
            commits=commits,
        )

    @property
    def commit_logs(self) -> dict[str, str]:
        return {cid: rec.log_message for cid, rec in self.commits.items()}

    def filtered_results(self, triage: TriageFilter) -> list[MatchResult]:
        return apply_filters(self.results, self.psbps, triage, self.commit_logs)

    def files_payload(self, triage: TriageFilter) -> list[dict]:
        results = self.filtered_results(triage)
        counts: dict[str, int] = {}
        for r in results:
            counts[r.path] = counts.get(r.path, 0) + 1

        def fold(s):
            return s.casefold() if triage.ignore_case else s

        payload = []
        for path in self.file_paths:
            if triage.path_keyword is not None and fold(triage.path_keyword) not in fold(path):
                continue
            if triage.exclude_path is not None and fold(triage.exclude_path) in fold(path):
                continue
            payload.append({"path": path, "match_count": counts.get(path, 0)})
        return payload

    def patterns_payload(self, triage: TriageFilter, file: Optional[str]) -> list[dict]:
        results = self.filtered_results(triage)
        if file is not None:
            results = [r for r in results if r.path == file]
        by_psbp: dict[int, list[MatchResult]] = {}
        for r in results:
            by_psbp.setdefault(r.psbp_id, []).append(r)
        payload = []
        for psbp in self.psbps:
            matches = by_psbp.get(psbp.id)
            if not matches:
                continue
            m = psbp.pattern.metrics
            payload.append(
                {
                    "id": psbp.id,
                    "before_text": psbp.pattern.before_text,
                    "after_text": psbp.pattern.after_text,
                    "metrics": {
                        "size": m.size,
                        "files": m.files,
                        "commits": m.commits,
                        "authors": m.authors,
                        "support": m.support,
                        "matched": m.matched,
                    },
                    "matches": [
                        {
                            "path": r.path,
                            "start_index": r.start_index,
                            "end_index": r.end_index,
                            "start_line": r.line_span[0],
                            "end_line": r.line_span[1],
                        }
                        for r in matches
                    ],
                }
            )
        return payload

    def changes_payload(self, pattern_id: int) -> Optional[list[dict]]:
        for psbp in self.psbps:
            if psbp.id == pattern_id:
                payload = []
                for delta in psbp.pattern.deltas:
                    commit = self.commits.get(delta.commit_id)
                    payload.append(
                        {
                            "commit_id": delta.commit_id,
                            "author": commit.author if commit else "",
                            "timestamp": commit.timestamp if commit else 0,
                            "log": commit.log_message if commit else "",
                            "is_bugfix": commit.is_bugfix if commit else False,
                            "path": delta.path,
                            "kind": delta.kind.value,
                            "before_text": delta.before_text,
                            "after_text": delta.after_text,
                        }
                    )
                return payload
        return None


def _triage_from_query(query: dict) -> TriageFilter:
    def first(name):
        values = query.get(name)
        return values[0] if values else None

    max_matches = first("max_matches")
    if max_matches is not None:
        max_matches = int(max_matches)
        if max_matches <= 0:
            raise ValueError("max_matches must be positive")
    return TriageFilter(
        log_keyword=first("log_kw"),
        max_matches=max_matches,
        path_keyword=first("path_kw"),
        exclude_path=first("exclude_path"),
        ignore_case=first("ignore_case") in ("1", "true"),
    )


class TriageApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def __init__(self, *args, model: ServeModel, ui_dir: Optional[Path], **kwargs):
        self.model = model
        self.ui_dir = ui_dir
        super().__init__(*args, **kwargs)

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, payload, status: int = 200):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_file(self, file_path: Path):
        data = file_path.read_bytes()
        ctype = mimetypes.guess_type(file_path.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        parsed = urlparse(self.path)
        route = parsed.path
        query = parse_qs(parsed.query)
        try:
            if route.startswith("/api/"):
                self._handle_api(route, query)
            else:
                self._handle_static(route)
        except ValueError as exc:
            self._send_json({"error": str(exc)}, status=400)
        except BrokenPipeError:
            pass
        except Exception as exc:  # pragma: no cover - defensive
            logger.exception("request failed")
            self._send_json({"error": str(exc)}, status=500)

    def _handle_api(self, route: str, query: dict):
        model = self.model
        if route == "/api/files":
            self._send_json(model.files_payload(_triage_from_query(query)))
        elif route == "/api/patterns":
            file = query.get("file", [None])[0]
            self._send_json(model.patterns_payload(_triage_from_query(query), file))
        elif route.startswith("/api/patterns/") and route.endswith("/changes"):
            raw_id = route[len("/api/patterns/") : -len("/changes")]
            if not raw_id.isdigit():
                self._send_json({"error": "bad pattern id"}, status=400)
                return
            payload = model.changes_payload(int(raw_id))
            if payload is None:
                self._send_json({"error": "no such pattern"}, status=404)
            else:
                self._send_json(payload)
        elif route == "/api/source":
            path = query.get("path", [None])[0]
            if path is None:
                self._send_json({"error": "missing path"}, status=400)
            elif path not in model.source_texts:
                self._send_json({"error": "no such file"}, status=404)
            else:
                self._send_json({"path": path, "text": model.source_texts[path]})
        else:
            self._send_json({"error": "unknown endpoint"}, status=404)

    def _handle_static(self, route: str):
        if self.ui_dir is None:
            self._send_json(
                {
                    "endpoints": [
                        "/api/files",
                        "/api/patterns",
                        "/api/patterns/<id>/changes",
                        "/api/source",
                    ]
                }
            )
            return
        rel = route.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_json({"error": "not found"}, status=404)
            return
        self._send_file(target)


def make_server(
    model: ServeModel,
    host: str = "127.0.0.1",
    port: int = 8731,
    ui_dir: Optional[Path] = None,
) -> ThreadingHTTPServer:
    handler = partial(TriageApiHandler, model=model, ui_dir=ui_dir)
    return ThreadingHTTPServer((host, port), handler)
