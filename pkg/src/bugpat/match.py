"""Matching bug patterns against a target revision and triage filtering."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .normalize import NormalizedFile, abstract_file
from .psbp import Psbp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchResult:
    """One code fragment whose digests equal a pattern's before-text.

    ``start_index``/``end_index`` are a half-open statement range into
    the normalized file; ``line_span`` is the inclusive original line
    range of those statements.
    """

    psbp_id: int
    path: str
    start_index: int
    end_index: int
    line_span: tuple[int, int]
    suggested_after_text: str


@dataclass(frozen=True)
class TriageFilter:
    log_keyword: Optional[str] = None
    max_matches: Optional[int] = None
    path_keyword: Optional[str] = None
    exclude_path: Optional[str] = None
    ignore_case: bool = False


def find_occurrences(needle: Sequence[str], haystack: Sequence[str]) -> list[int]:
    """All start indices of needle in haystack, overlapping included."""
    n = len(needle)
    if n == 0 or n > len(haystack):
        return []
    first = needle[0]
    positions = []
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and tuple(haystack[i : i + n]) == tuple(needle):
            positions.append(i)
    return positions


def match_revision(
    psbps: Iterable[Psbp], revision_files: Iterable[NormalizedFile]
) -> list[MatchResult]:
    """Every occurrence of every pattern's before digests, every file.

    Overlapping occurrences all count. As a side effect each pattern's
    MATCHED metric is set to its total occurrence count (0 if absent).
    """
    psbps = list(psbps)
    results: list[MatchResult] = []
    counts = {p.id: 0 for p in psbps}
    for nf in sorted(revision_files, key=lambda f: f.path):
        digests = nf.digests
        for psbp in psbps:
            needle = psbp.before_digests
            for start in find_occurrences(needle, digests):
                end = start + len(needle)
                span = (
                    nf.statements[start].line_span[0],
                    nf.statements[end - 1].line_span[1],
                )
                results.append(
                    MatchResult(
                        psbp_id=psbp.id,
                        path=nf.path,
                        start_index=start,
                        end_index=end,
                        line_span=span,
                        suggested_after_text=psbp.pattern.after_text,
                    )
                )
                counts[psbp.id] += 1
    for psbp in psbps:
        if psbp.pattern.metrics is not None:
            psbp.pattern.metrics.matched = counts[psbp.id]
    results.sort(key=lambda r: (r.path, r.start_index, r.psbp_id))
    return results


def apply_filters(
    results: Iterable[MatchResult],
    psbps: Iterable[Psbp],
    triage: TriageFilter,
    commit_logs: Mapping[str, str],
) -> list[MatchResult]:
    """Apply the three triage filters; unset fields are ignored.

    - log keyword: some commit log among the pattern's deltas contains
      the keyword (substring; case-sensitive unless ignore_case)
    - max matches: the pattern's MATCHED count does not exceed the bound
    - path keyword / exclude path: substring on the result's file path
    """
    by_id = {p.id: p for p in psbps}

    def fold(s: str) -> str:
        return s.casefold() if triage.ignore_case else s

    log_ok_cache: dict[int, bool] = {}

    def log_ok(psbp: Psbp) -> bool:
        if triage.log_keyword is None:
            return True
        cached = log_ok_cache.get(psbp.id)
        if cached is None:
            keyword = fold(triage.log_keyword)
            cached = any(
                keyword in fold(commit_logs.get(d.commit_id, ""))
                for d in psbp.pattern.deltas
            )
            log_ok_cache[psbp.id] = cached
        return cached

    kept = []
    for result in results:
        psbp = by_id[result.psbp_id]
        if not log_ok(psbp):
            continue
        if (
            triage.max_matches is not None
            and psbp.pattern.metrics is not None
            and psbp.pattern.metrics.matched > triage.max_matches
        ):
            continue
        if triage.path_keyword is not None and fold(triage.path_keyword) not in fold(
            result.path
        ):
            continue
        if triage.exclude_path is not None and fold(triage.exclude_path) in fold(
            result.path
        ):
            continue
        kept.append(result)
    return kept


def scan_revision(
    root: Path, extensions: tuple[str, ...] = (".java",), normalize: bool = True
) -> list[NormalizedFile]:
    """Abstract every source file under a checkout directory.

    Paths are repository-relative POSIX strings; undecodable files are
    skipped with a warning.
    """
    root = Path(root)
    files = []
    for path in sorted(root.rglob("*")):
        if not path.is_file() or ".git" in path.parts:
            continue
        rel = path.relative_to(root).as_posix()
        if not rel.endswith(tuple(extensions)):
            continue
        try:
            text = path.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError) as exc:
            logger.warning("skipping unreadable file %s (%s)", rel, exc)
            continue
        files.append(abstract_file(text, rel, normalize))
    return files
