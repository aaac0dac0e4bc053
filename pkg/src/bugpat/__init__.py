"""bugpat: derive project-specific bug patterns from a git history.

The pipeline walks every commit on one branch, abstracts changed Java
files into normalized statement digests, diffs them with an LCS, groups
identical deltas into change patterns, filters those down to bug
patterns, and matches them against any checkout to flag code that still
looks like the pre-fix side of a repeated fix.
"""

__version__ = "0.1.0"

from .diff import CodeDelta, DeltaKind, extract_deltas, lcs_align
from .match import MatchResult, TriageFilter, apply_filters, match_revision
from .normalize import NormalizedFile, NormalizedStatement, Token, abstract_file
from .psbp import Psbp, extract_psbps
from .repo import CommitRecord, FileChange, IssueMatcher, Repository, is_bugfix
from .store import ChangePattern, PatternMetrics, PatternStore, group_deltas

__all__ = [
    "CodeDelta",
    "DeltaKind",
    "extract_deltas",
    "lcs_align",
    "MatchResult",
    "TriageFilter",
    "apply_filters",
    "match_revision",
    "NormalizedFile",
    "NormalizedStatement",
    "Token",
    "abstract_file",
    "Psbp",
    "extract_psbps",
    "CommitRecord",
    "FileChange",
    "IssueMatcher",
    "Repository",
    "is_bugfix",
    "ChangePattern",
    "PatternMetrics",
    "PatternStore",
    "group_deltas",
]
