"""Git history walking, changed-file extraction and bug-fix classification.

Talks to a local clone through the ``git`` binary: one ``git log
--raw -z`` pass supplies the first-parent commit chain plus per-commit
raw diff records, and a persistent ``git cat-file --batch`` child
process serves blob contents.
"""

import logging
import re
import subprocess
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterator, Optional, Union

logger = logging.getLogger(__name__)

EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"

_FILE_MODES = {"000000", "100644", "100755"}  # regular blobs or absent


class RepoError(Exception):
    """Fatal repository/configuration problem (maps to CLI exit 2)."""


@dataclass(frozen=True)
class CommitRecord:
    id: str  # 40-hex
    author: str
    timestamp: int  # committer time, UTC seconds
    log_message: str
    is_bugfix: bool


@dataclass(frozen=True)
class FileChange:
    path: str
    before_text: str  # empty for a file creation
    after_text: str  # empty for a file deletion


@dataclass(frozen=True)
class IssueMatcher:
    """Decides whether a commit log names a bug-related issue.

    id-list mode: any listed ID occurring in the message counts, but
    only when the character after it is not a digit, so BUG-7 does not
    fire inside BUG-72. regex mode: the pattern matching anywhere
    counts.
    """

    mode: str  # "id-list" | "regex"
    ids: frozenset[str] = frozenset()
    pattern: str = ""

    def __post_init__(self):
        if self.mode == "id-list":
            if not self.ids:
                raise RepoError("issue ID list is empty")
        elif self.mode == "regex":
            try:
                re.compile(self.pattern)
            except re.error as exc:
                raise RepoError(f"bad issue regex: {exc}") from exc
        else:
            raise RepoError(f"unknown issue matcher mode: {self.mode!r}")

    @classmethod
    def from_id_file(cls, path: Union[str, Path]) -> "IssueMatcher":
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise RepoError(f"cannot read issue file: {exc}") from exc
        ids = frozenset(line.strip() for line in lines if line.strip())
        return cls(mode="id-list", ids=ids)

    @classmethod
    def from_regex(cls, pattern: str) -> "IssueMatcher":
        return cls(mode="regex", pattern=pattern)

    def matches(self, log_message: str) -> bool:
        if self.mode == "regex":
            return re.search(self.pattern, log_message) is not None
        for issue_id in self.ids:
            start = log_message.find(issue_id)
            while start != -1:
                end = start + len(issue_id)
                if end >= len(log_message) or not log_message[end].isdigit():
                    return True
                start = log_message.find(issue_id, start + 1)
        return False


def is_bugfix(log_message: str, matcher: Optional[IssueMatcher]) -> bool:
    """True iff the configured matcher fires on the log message."""
    return matcher is not None and matcher.matches(log_message)


def _to_epoch(since: Union[None, int, date, datetime]) -> Optional[int]:
    if since is None or isinstance(since, int):
        return since
    if isinstance(since, datetime):
        if since.tzinfo is None:
            since = since.replace(tzinfo=timezone.utc)
        return int(since.timestamp())
    return int(datetime(since.year, since.month, since.day, tzinfo=timezone.utc).timestamp())


@dataclass(frozen=True)
class _RawRecord:
    old_mode: str
    new_mode: str
    old_sha: str
    new_sha: str
    status: str
    path: str


class Repository:
    """Read-only access to a local git clone."""

    def __init__(self, path: Union[str, Path], extensions: tuple[str, ...] = (".java",)):
        self.path = str(path)
        self.extensions = tuple(extensions)
        self._raw_by_commit: dict[str, list[_RawRecord]] = {}
        self._catfile: Optional[subprocess.Popen] = None
        try:
            self._git("rev-parse", "--git-dir")
        except RepoError as exc:
            raise RepoError(f"not a readable git repository: {self.path}") from exc

    def close(self):
        if self._catfile is not None:
            self._catfile.stdin.close()
            self._catfile.stdout.close()
            self._catfile.wait()
            self._catfile = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def _git(self, *args: str, binary: bool = False):
        proc = subprocess.run(
            ("git", "-C", self.path) + args,
            capture_output=True,
        )
        if proc.returncode != 0:
            raise RepoError(
                "git %s failed: %s" % (args[0], proc.stderr.decode("utf-8", "replace").strip())
            )
        return proc.stdout if binary else proc.stdout.decode("utf-8", "replace")

    def _has_any_ref(self) -> bool:
        return bool(self._git("for-each-ref", "--count=1").strip())

    def _resolve_branch(self, branch: str) -> Optional[str]:
        """Commit id of the branch tip; None for an unborn/empty repo."""
        proc = subprocess.run(
            ("git", "-C", self.path, "rev-parse", "--verify", "--quiet", branch + "^{commit}"),
            capture_output=True,
        )
        if proc.returncode == 0:
            return proc.stdout.decode().strip()
        if not self._has_any_ref():
            return None  # repository without commits
        raise RepoError(f"unknown branch or revision: {branch}")

    def walk_history(
        self,
        branch: str = "HEAD",
        since: Union[None, int, date, datetime] = None,
        matcher: Optional[IssueMatcher] = None,
    ) -> Iterator[CommitRecord]:
        """Yield first-parent commits of ``branch``, oldest first.

        Merge commits appear once and are later diffed against their
        first parent only. Commits whose committer time is earlier than
        ``since`` are skipped.
        """
        tip = self._resolve_branch(branch)
        if tip is None:
            return
        since_epoch = _to_epoch(since)
        stream = self._git(
            "log",
            tip,
            "--first-parent",
            "--reverse",
            "--diff-merges=first-parent",
            "--raw",
            "--no-renames",
            "--no-abbrev",
            "-z",
            "--format=%x01%H%x1f%an%x1f%ct%x1f%B%x1e",
            binary=True,
        ).decode("utf-8", "replace")
        for chunk in stream.split("\x01"):
            if not chunk:
                continue
            header, _, raw_section = chunk.partition("\x1e")
            commit_id, author, committed_at, log_message = header.split("\x1f", 3)
            self._raw_by_commit[commit_id] = _parse_raw_records(raw_section)
            timestamp = int(committed_at)
            if since_epoch is not None and timestamp < since_epoch:
                continue
            yield CommitRecord(
                id=commit_id,
                author=author,
                timestamp=timestamp,
                log_message=log_message,
                is_bugfix=is_bugfix(log_message, matcher),
            )

    def _raw_records(self, commit: CommitRecord) -> list[_RawRecord]:
        cached = self._raw_by_commit.get(commit.id)
        if cached is not None:
            return cached
        # Commit not seen via walk_history: diff against first parent.
        proc = subprocess.run(
            ("git", "-C", self.path, "rev-parse", "--verify", "--quiet", commit.id + "^1"),
            capture_output=True,
        )
        parent = proc.stdout.decode().strip() if proc.returncode == 0 else EMPTY_TREE
        out = self._git(
            "diff-tree", "-r", "-z", "--no-abbrev", "--no-renames", parent, commit.id,
            binary=True,
        ).decode("utf-8", "replace")
        return _parse_raw_records(out)

    def _is_source_path(self, path: str) -> bool:
        return path.endswith(self.extensions)

    def _blob_text(self, sha: str, path: str, commit_id: str) -> Optional[str]:
        """Blob content as text, or None if binary/undecodable."""
        data = self._blob_bytes(sha)
        if b"\x00" in data:
            logger.warning("skipping binary file %s at %s", path, commit_id[:12])
            return None
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            logger.warning("skipping undecodable file %s at %s", path, commit_id[:12])
            return None

    def _blob_bytes(self, sha: str) -> bytes:
        if self._catfile is None:
            self._catfile = subprocess.Popen(
                ("git", "-C", self.path, "cat-file", "--batch"),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        self._catfile.stdin.write(sha.encode() + b"\n")
        self._catfile.stdin.flush()
        header = self._catfile.stdout.readline().decode()
        fields = header.split()
        if len(fields) != 3 or fields[1] == "missing":
            raise RepoError(f"blob {sha} not found")
        size = int(fields[2])
        data = self._catfile.stdout.read(size)
        self._catfile.stdout.read(1)  # trailing newline
        return data

    def changed_source_files(self, commit: CommitRecord) -> list[FileChange]:
        """Source files whose blob differs from the first parent.

        Non-source paths are dropped, as are binary or undecodable
        blobs (with a warning) and non-regular-file entries such as
        submodules and symlinks.
        """
        changes: list[FileChange] = []
        for rec in self._raw_records(commit):
            if not self._is_source_path(rec.path):
                continue
            if rec.old_mode not in _FILE_MODES or rec.new_mode not in _FILE_MODES:
                continue
            before_text = ""
            after_text = ""
            if not _is_null_sha(rec.old_sha):
                before_text = self._blob_text(rec.old_sha, rec.path, commit.id)
                if before_text is None:
                    continue
            if not _is_null_sha(rec.new_sha):
                after_text = self._blob_text(rec.new_sha, rec.path, commit.id)
                if after_text is None:
                    continue
            if not before_text and not after_text:
                continue
            changes.append(FileChange(rec.path, before_text, after_text))
        return changes


def _is_null_sha(sha: str) -> bool:
    return sha.strip("0") == ""


def _parse_raw_records(raw_section: str) -> list[_RawRecord]:
    """Parse ``git log --raw -z`` records: ':meta' NUL 'path' NUL ..."""
    records: list[_RawRecord] = []
    parts = raw_section.split("\x00")
    i = 0
    while i < len(parts) - 1:
        meta = parts[i].lstrip("\n")
        if meta.startswith(":"):
            fields = meta[1:].split(" ")
            if len(fields) >= 5:
                records.append(
                    _RawRecord(
                        old_mode=fields[0],
                        new_mode=fields[1],
                        old_sha=fields[2],
                        new_sha=fields[3],
                        status=fields[4],
                        path=parts[i + 1],
                    )
                )
            i += 2
        else:
            i += 1
    return records
