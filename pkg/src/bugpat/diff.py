"""LCS alignment of normalized statement digests and delta extraction.

Two revisions of a file are compared as digest arrays. The longest
common subsequence pins the unchanged statements; every maximal run of
unmatched statements between two anchors becomes one code delta,
classified as a deletion, addition or replacement.
"""

import enum
from array import array
from dataclasses import dataclass
from typing import Optional, Sequence

from .normalize import NormalizedFile, NormalizedStatement


class AlignTag(enum.Enum):
    COMMON = "common"
    BEFORE_ONLY = "before-only"
    AFTER_ONLY = "after-only"


@dataclass(frozen=True)
class AlignedElement:
    tag: AlignTag
    before_index: Optional[int]
    after_index: Optional[int]


class DeltaKind(str, enum.Enum):
    DELETION = "deletion"
    ADDITION = "addition"
    REPLACEMENT = "replacement"


@dataclass(frozen=True)
class CodeDelta:
    """One contiguous chunk of changed statements in one commit.

    ``before`` is empty exactly for additions, ``after`` exactly for
    deletions. The digest-sequence keys identify the chunk contents;
    deltas with equal key pairs form a change pattern.
    """

    commit_id: str
    path: str
    kind: DeltaKind
    before: tuple[NormalizedStatement, ...]
    after: tuple[NormalizedStatement, ...]

    @property
    def before_key(self) -> str:
        return ",".join(s.digest for s in self.before)

    @property
    def after_key(self) -> str:
        return ",".join(s.digest for s in self.after)

    @property
    def before_text(self) -> str:
        return "\n".join(s.normalized_text for s in self.before)

    @property
    def after_text(self) -> str:
        return "\n".join(s.normalized_text for s in self.after)

    @property
    def before_line_span(self) -> Optional[tuple[int, int]]:
        return _span(self.before)

    @property
    def after_line_span(self) -> Optional[tuple[int, int]]:
        return _span(self.after)


def _span(statements: tuple[NormalizedStatement, ...]) -> Optional[tuple[int, int]]:
    if not statements:
        return None
    return (
        min(s.line_span[0] for s in statements),
        max(s.line_span[1] for s in statements),
    )


def lcs_align(before: Sequence[str], after: Sequence[str]) -> list[AlignedElement]:
    """Align two digest arrays along a longest common subsequence.

    The backtrace is deterministic: an equal pair is always taken as
    common, and where deleting or inserting both preserve the LCS length
    the before-side element is emitted first. An identical prefix is
    matched outright so the quadratic table only covers the remainder;
    a common suffix cannot be shortcut the same way without changing
    which of several equal-length alignments wins.
    """
    n_before, n_after = len(before), len(after)
    prefix = 0
    while prefix < n_before and prefix < n_after and before[prefix] == after[prefix]:
        prefix += 1

    out = [AlignedElement(AlignTag.COMMON, i, i) for i in range(prefix)]
    core_b = before[prefix:]
    core_a = after[prefix:]
    n, m = len(core_b), len(core_a)

    # dp[i][j] = LCS length of core_b[i:] vs core_a[j:]
    dp = [array("i", bytes(4 * (m + 1))) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        b_i = core_b[i]
        for j in range(m - 1, -1, -1):
            if b_i == core_a[j]:
                row[j] = below[j + 1] + 1
            else:
                down, right = below[j], row[j + 1]
                row[j] = down if down >= right else right

    i = j = 0
    while i < n and j < m:
        if core_b[i] == core_a[j]:
            out.append(AlignedElement(AlignTag.COMMON, prefix + i, prefix + j))
            i += 1
            j += 1
        elif dp[i + 1][j] == dp[i][j]:
            out.append(AlignedElement(AlignTag.BEFORE_ONLY, prefix + i, None))
            i += 1
        else:
            out.append(AlignedElement(AlignTag.AFTER_ONLY, None, prefix + j))
            j += 1
    for k in range(i, n):
        out.append(AlignedElement(AlignTag.BEFORE_ONLY, prefix + k, None))
    for k in range(j, m):
        out.append(AlignedElement(AlignTag.AFTER_ONLY, None, prefix + k))
    return out


def extract_deltas(
    alignment: Sequence[AlignedElement],
    before_file: NormalizedFile,
    after_file: NormalizedFile,
    commit_id: str,
    path: Optional[str] = None,
) -> list[CodeDelta]:
    """Turn an alignment into classified code deltas.

    Every maximal run of non-common elements between two common anchors
    (or an array end) forms one delta; runs never merge across an
    anchor.
    """
    if path is None:
        path = after_file.path or before_file.path
    deltas: list[CodeDelta] = []
    run_before: list[int] = []
    run_after: list[int] = []

    def flush():
        if not run_before and not run_after:
            return
        before = tuple(before_file.statements[i] for i in run_before)
        after = tuple(after_file.statements[i] for i in run_after)
        if not after:
            kind = DeltaKind.DELETION
        elif not before:
            kind = DeltaKind.ADDITION
        else:
            kind = DeltaKind.REPLACEMENT
        deltas.append(CodeDelta(commit_id, path, kind, before, after))
        run_before.clear()
        run_after.clear()

    for element in alignment:
        if element.tag is AlignTag.COMMON:
            flush()
        elif element.tag is AlignTag.BEFORE_ONLY:
            run_before.append(element.before_index)
        else:
            run_after.append(element.after_index)
    flush()
    return deltas


def diff_files(
    before_file: NormalizedFile,
    after_file: NormalizedFile,
    commit_id: str,
    path: Optional[str] = None,
) -> list[CodeDelta]:
    """Convenience composition of lcs_align and extract_deltas."""
    alignment = lcs_align(before_file.digests, after_file.digests)
    return extract_deltas(alignment, before_file, after_file, commit_id, path)
