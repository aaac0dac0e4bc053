"""Revision matching against a naive oracle, and the triage filters."""

import random

from bugpat.match import (
    MatchResult,
    TriageFilter,
    apply_filters,
    find_occurrences,
    match_revision,
    scan_revision,
)
from bugpat.normalize import NormalizedFile, NormalizedStatement, abstract_file
from bugpat.psbp import Psbp
from bugpat.store import ChangePattern, PatternMetrics


def file_of(symbols, path="F.java"):
    stmts = tuple(
        NormalizedStatement(f"text {s} {i}", s, (i + 1, i + 1))
        for i, s in enumerate(symbols)
    )
    return NormalizedFile(path, stmts)


def psbp_of(pid, before_symbols, after_text="fixed ;", bugfix=("c" * 40,)):
    pattern = ChangePattern(
        id=pid,
        before_key=",".join(before_symbols),
        after_key="k",
        before_text="\n".join(f"text {s}" for s in before_symbols),
        after_text=after_text,
        deltas=[],
        metrics=PatternMetrics(
            size=len(before_symbols), files=1, commits=1, authors=1, support=2
        ),
    )
    return Psbp(pattern=pattern, bugfix_commit_ids=frozenset(bugfix))


def naive_match_oracle(psbps, files):
    """All-positions scan, written independently of find_occurrences."""
    hits = []
    for psbp in psbps:
        needle = list(psbp.before_digests)
        for nf in files:
            hay = list(nf.digests)
            for start in range(0, len(hay) - len(needle) + 1):
                if hay[start : start + len(needle)] == needle and needle:
                    hits.append((psbp.id, nf.path, start))
    return sorted(hits)


class TestMatchRevision:
    def test_two_occurrences_counted(self):
        psbp = psbp_of(1, ["h"])
        results = match_revision([psbp], [file_of(["h", "x", "h"])])
        assert [(r.start_index, r.end_index) for r in results] == [(0, 1), (2, 3)]
        assert psbp.pattern.metrics.matched == 2

    def test_absent_pattern_matches_nothing(self):
        psbp = psbp_of(1, ["zz"])
        results = match_revision([psbp], [file_of(["a", "b"])])
        assert results == []
        assert psbp.pattern.metrics.matched == 0

    def test_overlapping_occurrences_all_reported(self):
        psbp = psbp_of(1, ["h", "h"])
        results = match_revision([psbp], [file_of(["h", "h", "h"])])
        assert [r.start_index for r in results] == [0, 1]
        assert psbp.pattern.metrics.matched == 2

    def test_random_against_naive_oracle(self):
        rng = random.Random(2468)
        alphabet = ["a", "b", "c", "d"]
        for _ in range(300):
            psbps = [
                psbp_of(pid, [rng.choice(alphabet) for _ in range(rng.randint(1, 8))])
                for pid in range(1, rng.randint(2, 5))
            ]
            files = [
                file_of(
                    [rng.choice(alphabet) for _ in range(rng.randint(0, 8))],
                    path=f"f{k}.java",
                )
                for k in range(rng.randint(1, 3))
            ]
            results = match_revision(psbps, files)
            ours = sorted((r.psbp_id, r.path, r.start_index) for r in results)
            assert ours == naive_match_oracle(psbps, files)
            for psbp in psbps:
                expected = sum(1 for pid, _, _ in ours if pid == psbp.id)
                assert psbp.pattern.metrics.matched == expected

    def test_line_span_and_suggestion(self):
        psbp = psbp_of(3, ["h", "k"], after_text="use ( V0 ) ;")
        results = match_revision([psbp], [file_of(["x", "h", "k"])])
        (result,) = results
        assert result.line_span == (2, 3)
        assert result.suggested_after_text == "use ( V0 ) ;"

    def test_match_soundness_against_renormalization(self, tmp_path):
        source = "alpha();\nbeta(1);\ngamma();\nbeta(2);\n"
        (tmp_path / "S.java").write_text(source)
        needle_file = abstract_file("beta(9);")
        psbp = psbp_of(1, [needle_file.statements[0].digest])
        files = scan_revision(tmp_path)
        results = match_revision([psbp], files)
        assert len(results) == 2
        renormalized = abstract_file(source, "S.java")
        for r in results:
            window = renormalized.digests[r.start_index : r.end_index]
            assert list(window) == list(psbp.before_digests)


class TestTriageFilters:
    LOGS = {
        "c1": "fix race-condition in pool",
        "c2": "polish docs",
    }

    def make_results(self):
        from conftest import make_delta

        psbp_a = psbp_of(1, ["h"])
        psbp_a.pattern.deltas.append(make_delta("c1", "X.java", ["text h"], ["y ;"]))
        psbp_b = psbp_of(2, ["k"])
        psbp_b.pattern.deltas.append(make_delta("c2", "Y.java", ["text k"], ["z ;"]))
        files = [
            file_of(["h", "k"], path="src/main/App.java"),
            file_of(["h"], path="src/test/AppTest.java"),
        ]
        results = match_revision([psbp_a, psbp_b], files)
        return results, [psbp_a, psbp_b]

    def test_no_filters_is_identity(self):
        results, psbps = self.make_results()
        assert apply_filters(results, psbps, TriageFilter(), self.LOGS) == results

    def test_log_keyword_filter(self):
        results, psbps = self.make_results()
        kept = apply_filters(
            results, psbps, TriageFilter(log_keyword="race-condition"), self.LOGS
        )
        assert {r.psbp_id for r in kept} == {1}

    def test_log_keyword_case_sensitivity(self):
        results, psbps = self.make_results()
        strict = apply_filters(
            results, psbps, TriageFilter(log_keyword="RACE-CONDITION"), self.LOGS
        )
        assert strict == []
        relaxed = apply_filters(
            results,
            psbps,
            TriageFilter(log_keyword="RACE-CONDITION", ignore_case=True),
            self.LOGS,
        )
        assert {r.psbp_id for r in relaxed} == {1}

    def test_max_matches_filter(self):
        results, psbps = self.make_results()
        kept = apply_filters(results, psbps, TriageFilter(max_matches=1), self.LOGS)
        # pattern 1 matched twice, pattern 2 once
        assert {r.psbp_id for r in kept} == {2}

    def test_path_keyword_filter(self):
        results, psbps = self.make_results()
        kept = apply_filters(
            results, psbps, TriageFilter(path_keyword="main"), self.LOGS
        )
        assert {r.path for r in kept} == {"src/main/App.java"}

    def test_exclude_path_filter(self):
        results, psbps = self.make_results()
        kept = apply_filters(
            results, psbps, TriageFilter(exclude_path="test"), self.LOGS
        )
        assert all("test" not in r.path for r in kept)
        assert len(kept) == 2

    def test_filters_commute_and_are_idempotent(self):
        results, psbps = self.make_results()
        f_log = TriageFilter(log_keyword="race-condition")
        f_path = TriageFilter(exclude_path="test")
        f_max = TriageFilter(max_matches=1)
        combined = TriageFilter(
            log_keyword="race-condition", exclude_path="test", max_matches=1
        )

        def run(result_set, triage):
            return apply_filters(result_set, psbps, triage, self.LOGS)

        orders = [
            run(run(run(results, f_log), f_path), f_max),
            run(run(run(results, f_max), f_path), f_log),
            run(run(run(results, f_path), f_log), f_max),
            run(results, combined),
        ]
        assert all(o == orders[0] for o in orders)
        once = run(results, f_log)
        assert run(once, f_log) == once

    def test_max_matches_keeps_single_match_subset(self):
        rng = random.Random(77)
        alphabet = ["a", "b", "c"]
        psbps = [
            psbp_of(pid, [rng.choice(alphabet) for _ in range(rng.randint(1, 3))])
            for pid in range(1, 6)
        ]
        files = [
            file_of([rng.choice(alphabet) for _ in range(8)], path=f"f{k}.java")
            for k in range(3)
        ]
        results = match_revision(psbps, files)
        kept = apply_filters(results, psbps, TriageFilter(max_matches=1), {})
        single = {p.id for p in psbps if p.pattern.metrics.matched == 1}
        assert {r.psbp_id for r in kept} == {
            r.psbp_id for r in results if r.psbp_id in single
        }
        assert set(kept) <= set(results)


class TestScanRevision:
    def test_walks_sources_only(self, tmp_path):
        (tmp_path / "src").mkdir()
        (tmp_path / "src" / "A.java").write_text("int a;\n")
        (tmp_path / "src" / "notes.txt").write_text("skip me\n")
        (tmp_path / ".git").mkdir()
        (tmp_path / ".git" / "B.java").write_text("int b;\n")
        files = scan_revision(tmp_path)
        assert [f.path for f in files] == ["src/A.java"]

    def test_undecodable_skipped(self, tmp_path, caplog):
        (tmp_path / "Bad.java").write_bytes(b"\xff\xfe garbage")
        (tmp_path / "Ok.java").write_text("int a;\n")
        with caplog.at_level("WARNING"):
            files = scan_revision(tmp_path)
        assert [f.path for f in files] == ["Ok.java"]
        assert "skipping" in caplog.text


def test_find_occurrences_empty_needle():
    assert find_occurrences([], ["a"]) == []
    assert find_occurrences(["a"], []) == []


def test_match_result_frozen():
    result = MatchResult(1, "p", 0, 1, (1, 1), "s")
    import pytest

    with pytest.raises(AttributeError):
        result.path = "q"
