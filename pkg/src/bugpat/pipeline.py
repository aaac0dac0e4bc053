"""End-to-end mining: repository history to populated pattern database."""

import logging
from dataclasses import dataclass, field
from datetime import date, datetime
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

from .diff import diff_files
from .match import MatchResult, TriageFilter, apply_filters, match_revision, scan_revision
from .normalize import abstract_file
from .psbp import Psbp, extract_psbps, filter_condition_1
from .repo import IssueMatcher, Repository
from .store import PatternStore

logger = logging.getLogger(__name__)


@dataclass
class MineConfig:
    repo_path: str
    db_path: str
    matcher: IssueMatcher
    branch: str = "HEAD"
    since: Union[None, date, datetime] = None
    extensions: tuple[str, ...] = (".java",)
    normalize: bool = True


@dataclass
class MineSummary:
    commits: int = 0
    bugfix_commits: int = 0
    deltas: int = 0
    patterns: int = 0
    bugfix_related: int = 0  # passing condition (a)
    psbps: int = 0  # passing (a) and (b)
    warnings: int = 0

    def lines(self) -> list[str]:
        return [
            f"commits mined:     {self.commits} ({self.bugfix_commits} bug-fix)",
            f"code deltas:       {self.deltas}",
            f"change patterns:   {self.patterns}",
            f"  bug-fix related (a):           {self.bugfix_related}",
            f"  unique before-text (a)+(b):    {self.psbps}",
        ]


@lru_cache(maxsize=1024)
def _abstract_cached(text: str, normalize: bool):
    return abstract_file(text, "", normalize)


def mine_repository(config: MineConfig) -> MineSummary:
    """Walk the history, extract and group deltas, persist everything.

    Grouping runs single-threaded after extraction so pattern ids are
    deterministic for a given repository and configuration.
    """
    summary = MineSummary()
    _abstract_cached.cache_clear()
    with Repository(config.repo_path, config.extensions) as repo:
        store = PatternStore.create(config.db_path)
        try:
            for commit in repo.walk_history(config.branch, config.since, config.matcher):
                summary.commits += 1
                summary.bugfix_commits += commit.is_bugfix
                store.add_commit(commit)
                for change in repo.changed_source_files(commit):
                    before = _abstract_cached(change.before_text, config.normalize)
                    after = _abstract_cached(change.after_text, config.normalize)
                    for delta in diff_files(before, after, commit.id, change.path):
                        store.add_delta(delta)
                        summary.deltas += 1
                if summary.commits % 1000 == 0:
                    logger.info("processed %d commits", summary.commits)
            patterns = store.build_patterns()
            summary.patterns = len(patterns)
            bugfix_ids = store.bugfix_commit_ids()
            summary.bugfix_related = len(filter_condition_1(patterns, bugfix_ids))
            summary.psbps = len(extract_psbps(store, bugfix_ids))
            store.set_meta("extensions", ",".join(config.extensions))
            store.set_meta("normalize", "1" if config.normalize else "0")
            store.set_meta("repo_path", str(config.repo_path))
            store.set_meta("branch", config.branch)
        finally:
            store.commit()
            store.close()
    return summary


@dataclass
class MatchOutcome:
    results: list[MatchResult]
    psbps: list[Psbp]
    commit_logs: dict[str, str] = field(default_factory=dict)


def match_checkout(
    db_path: Union[str, Path],
    revision_dir: Union[str, Path],
    triage: TriageFilter = TriageFilter(),
    extensions: Optional[tuple[str, ...]] = None,
    persist_matched: bool = True,
) -> MatchOutcome:
    """Scan a checkout against a mined database and triage the results.

    MATCHED counts (relative to this revision) are written back to the
    database unless persist_matched is false.
    """
    with PatternStore.open(db_path) as store:
        if extensions is None:
            stored = store.get_meta("extensions")
            extensions = tuple(stored.split(",")) if stored else (".java",)
        normalize = store.get_meta("normalize") != "0"
        psbps = extract_psbps(store)
        files = scan_revision(Path(revision_dir), extensions, normalize)
        results = match_revision(psbps, files)
        if persist_matched:
            store.set_matched(
                {p.id: p.pattern.metrics.matched for p in psbps if p.pattern.metrics}
            )
        commit_logs = {cid: rec.log_message for cid, rec in store.commits().items()}
    filtered = apply_filters(results, psbps, triage, commit_logs)
    return MatchOutcome(results=filtered, psbps=psbps, commit_logs=commit_logs)
