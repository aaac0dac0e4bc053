"""Filtering change patterns down to project-specific bug patterns.

A pattern survives when (1) at least one of its deltas comes from a
bug-fix commit and (2) it has at least two deltas and its before-text is
unique across the whole pattern set. Addition patterns have nothing to
match against and are never candidates.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .store import ChangePattern, PatternStore


@dataclass(frozen=True)
class Psbp:
    """A change pattern usable as a project-specific bug pattern."""

    pattern: ChangePattern
    bugfix_commit_ids: frozenset[str]

    @property
    def id(self) -> int:
        return self.pattern.id

    @property
    def before_digests(self) -> tuple[str, ...]:
        key = self.pattern.before_key
        return tuple(key.split(",")) if key else ()


def filter_condition_1(
    patterns: Iterable[ChangePattern], bugfix_commit_ids: frozenset[str]
) -> list[ChangePattern]:
    """Keep patterns with at least one delta from a bug-fix commit."""
    return [
        p
        for p in patterns
        if any(d.commit_id in bugfix_commit_ids for d in p.deltas)
    ]


def filter_condition_2(
    patterns: Iterable[ChangePattern], candidates: Iterable[ChangePattern]
) -> list[ChangePattern]:
    """Keep candidates with support >= 2 whose before-text is unique.

    Uniqueness of the before key is judged against the full pattern
    set, not only the candidates: two patterns that fix the same code
    two different ways knock each other out.
    """
    key_counts = Counter(p.before_key for p in patterns)
    kept = []
    for pattern in candidates:
        support = pattern.metrics.support if pattern.metrics else len(pattern.deltas)
        if support >= 2 and key_counts[pattern.before_key] == 1:
            kept.append(pattern)
    return kept


def extract_psbps(
    store: PatternStore, bugfix_commit_ids: frozenset[str] = None
) -> list[Psbp]:
    """Both conditions composed over a store, ordered by pattern id."""
    if bugfix_commit_ids is None:
        bugfix_commit_ids = store.bugfix_commit_ids()
    patterns = store.patterns(with_deltas=True)
    candidates = [p for p in patterns if p.before_key]  # additions excluded
    candidates = filter_condition_1(candidates, bugfix_commit_ids)
    kept = filter_condition_2(patterns, candidates)
    return [
        Psbp(
            pattern=p,
            bugfix_commit_ids=frozenset(
                d.commit_id for d in p.deltas if d.commit_id in bugfix_commit_ids
            ),
        )
        for p in sorted(kept, key=lambda p: p.id)
    ]
