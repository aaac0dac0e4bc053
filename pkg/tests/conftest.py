"""Shared fixtures: scripted git repositories and synthetic delta helpers."""

import subprocess
from pathlib import Path

import pytest

from bugpat.diff import CodeDelta, DeltaKind
from bugpat.normalize import NormalizedStatement, abstract_file, digest_of
from bugpat.repo import CommitRecord


class RepoBuilder:
    """Drives a scratch git repository for history fixtures."""

    def __init__(self, path: Path, branch: str = "main"):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._commit_no = 0
        self.git("init", "-q", "-b", branch)
        self.git("config", "user.name", "Fixture")
        self.git("config", "user.email", "fixture@example.invalid")
        self.git("config", "commit.gpgsign", "false")

    def git(self, *args, check=True) -> str:
        proc = subprocess.run(
            ("git", "-C", str(self.path)) + args, capture_output=True, text=True
        )
        if check and proc.returncode != 0:
            raise RuntimeError(f"git {args}: {proc.stderr}")
        return proc.stdout

    def write(self, rel: str, text: str):
        target = self.path / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")

    def write_bytes(self, rel: str, data: bytes):
        target = self.path / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)

    def remove(self, rel: str):
        self.git("rm", "-q", rel)

    def commit(self, message: str, author: str = "Alice Dev", date: str = None) -> str:
        self._commit_no += 1
        if date is None:
            date = f"2020-01-{min(self._commit_no, 28):02d}T12:00:00+00:00"
        self.git("add", "-A")
        self._commit_env(message, author, date)
        return self.head()

    def _commit_env(self, message, author, date):
        import os

        env = os.environ.copy()
        env["GIT_AUTHOR_NAME"] = author
        env["GIT_AUTHOR_EMAIL"] = author.split()[0].lower() + "@example.invalid"
        env["GIT_COMMITTER_NAME"] = author
        env["GIT_COMMITTER_EMAIL"] = env["GIT_AUTHOR_EMAIL"]
        env["GIT_AUTHOR_DATE"] = date
        env["GIT_COMMITTER_DATE"] = date
        proc = subprocess.run(
            ("git", "-C", str(self.path), "commit", "-q", "--allow-empty", "-m", message),
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"git commit: {proc.stderr}")

    def head(self) -> str:
        return self.git("rev-parse", "HEAD").strip()


@pytest.fixture
def repo_builder(tmp_path):
    return RepoBuilder(tmp_path / "repo")


def _worker_source(i: int, variable: str, fixed: bool) -> str:
    before = f"String {variable} = getManagementName();"
    after = f"String {variable} = QuartzHelper.getQuartzContextName(getCamelContext());"
    body = after if fixed else before
    return (
        f"public class W{i} {{\n"
        f"    void setup{i}() {{\n"
        f"        int marker{i} = {i * 100};\n"
        f"    }}\n"
        f"    String resolve{i}() {{\n"
        f"        {body}\n"
        f"        return done{i}();\n"
        f"    }}\n"
        f"}}\n"
    )


# 8 instances of one logical change spread over 6 commits, two different
# variable names; a setup commit predates the mining window.
REPEATED_FIX_SINCE = "2020-01-01"
REPEATED_FIX_COMMIT_PLAN = [
    ("FIX-1 close leak", [1, 2]),
    ("FIX-2 close leak again", [3, 4]),
    ("FIX-3 same fix", [5]),
    ("FIX-4 same fix", [6]),
    ("FIX-5 same fix", [7]),
    ("FIX-6 same fix", [8]),
]


def build_repeated_fix_repo(path: Path) -> RepoBuilder:
    builder = RepoBuilder(path)
    names = {i: ("ctxName" if i <= 5 else "identity") for i in range(1, 9)}
    for i in range(1, 9):
        builder.write(f"src/W{i}.java", _worker_source(i, names[i], fixed=False))
    builder.write("README.md", "fixture\n")
    builder.commit("initial import", date="2019-12-01T12:00:00+00:00")
    for n, (message, files) in enumerate(REPEATED_FIX_COMMIT_PLAN, start=2):
        for i in files:
            builder.write(f"src/W{i}.java", _worker_source(i, names[i], fixed=True))
        builder.commit(message, date=f"2020-01-{n:02d}T12:00:00+00:00")
    return builder


@pytest.fixture(scope="session")
def repeated_fix_repo(tmp_path_factory) -> RepoBuilder:
    return build_repeated_fix_repo(tmp_path_factory.mktemp("repeated") / "repo")


def _handler_source(i: int, fixed: bool) -> str:
    buggy = "response.setContentLength((int) length);"
    good = 'response.addHeader("Content-Length", Long.toString(length));'
    return (
        f"public class Handler{i} {{\n"
        f"    void send{i}() {{\n"
        f"        long length = body{i}().length();\n"
        f"        {good if fixed else buggy}\n"
        f"        flush{i}();\n"
        f"    }}\n"
        f"}}\n"
    )


PLANTED_BUG_PATH = "src/main/Handler4.java"
PLANTED_BUG_LINE = 4
PLANTED_SUGGESTION = "V0 . addHeader ( L , V1 . toString ( V2 ) ) ;"


def build_planted_bug_repo(path: Path) -> RepoBuilder:
    """Three commits fix the same statement; a fourth site stays buggy."""
    builder = RepoBuilder(path)
    for i in range(1, 5):
        builder.write(f"src/main/Handler{i}.java", _handler_source(i, fixed=False))
    builder.commit("initial import")
    for i in range(1, 4):
        builder.write(f"src/main/Handler{i}.java", _handler_source(i, fixed=True))
        builder.commit(f"WICK-1{i} fix content length overflow")
    return builder


@pytest.fixture(scope="session")
def planted_bug_repo(tmp_path_factory) -> RepoBuilder:
    return build_planted_bug_repo(tmp_path_factory.mktemp("planted") / "repo")


@pytest.fixture
def issue_file(tmp_path):
    path = tmp_path / "issues.txt"
    path.write_text("WICK-11\nWICK-12\nWICK-13\nFIX-1\nFIX-2\nFIX-3\nFIX-4\nFIX-5\nFIX-6\n")
    return path


# -- synthetic building blocks --------------------------------------------


def statement(text: str, line: int = 1) -> NormalizedStatement:
    """A statement whose normalized text is given verbatim."""
    return NormalizedStatement(text, digest_of(text), (line, line))


def make_delta(commit_id: str, path: str, before_texts, after_texts) -> CodeDelta:
    before = tuple(statement(t, i + 1) for i, t in enumerate(before_texts))
    after = tuple(statement(t, i + 1) for i, t in enumerate(after_texts))
    if not after:
        kind = DeltaKind.DELETION
    elif not before:
        kind = DeltaKind.ADDITION
    else:
        kind = DeltaKind.REPLACEMENT
    return CodeDelta(commit_id, path, kind, before, after)


def make_commit(cid: str, author: str = "alice", bugfix: bool = False,
                log: str = "", timestamp: int = 1577880000) -> CommitRecord:
    return CommitRecord(cid, author, timestamp, log or f"commit {cid}", bugfix)


def statements_of(source: str):
    return abstract_file(source).statements
