/** Pure HTML renderers for the panels; no fetching, no globals. */

import {
  ChangeEntry,
  FileEntry,
  METRIC_KEYS,
  MetricKey,
  PatternEntry,
} from "./types.js";
import { SortDirection } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function sortPatterns(
  patterns: PatternEntry[],
  key: MetricKey | null,
  dir: SortDirection,
): PatternEntry[] {
  if (key === null) return patterns.slice();
  const sign = dir === "asc" ? 1 : -1;
  return patterns
    .slice()
    .sort((a, b) => sign * (a.metrics[key] - b.metrics[key]) || a.id - b.id);
}

export function renderFileList(files: FileEntry[], selected: string | null): string {
  if (files.length === 0) {
    return '<p class="empty">no files</p>';
  }
  const items = files.map((f) => {
    const cls = f.path === selected ? "file selected" : "file";
    return (
      `<li class="${cls}" data-path="${escapeHtml(f.path)}">` +
      `<span class="path">${escapeHtml(f.path)}</span>` +
      `<span class="count">${f.match_count}</span></li>`
    );
  });
  return `<ul class="file-list">${items.join("")}</ul>`;
}

export function renderPatternTable(
  patterns: PatternEntry[],
  selectedId: number | null,
  sort: MetricKey | null,
  dir: SortDirection,
): string {
  if (patterns.length === 0) {
    return '<p class="empty">no patterns match the current filters</p>';
  }
  const headers = METRIC_KEYS.map((key) => {
    const marker = sort === key ? (dir === "asc" ? " ▲" : " ▼") : "";
    return `<th class="sortable" data-sort="${key}">${key.toUpperCase()}${marker}</th>`;
  }).join("");
  const rows = sortPatterns(patterns, sort, dir)
    .map((p) => {
      const cls = p.id === selectedId ? "pattern selected" : "pattern";
      const cells = METRIC_KEYS.map((key) => `<td>${p.metrics[key]}</td>`).join("");
      return (
        `<tr class="${cls}" data-psbp="${p.id}"><td>#${p.id}</td>${cells}` +
        `<td class="texts"><code class="before">${escapeHtml(p.before_text)}</code>` +
        `<code class="after">${escapeHtml(p.after_text)}</code></td></tr>`
      );
    })
    .join("");
  return (
    '<table class="patterns"><thead><tr><th>ID</th>' +
    headers +
    "<th>BEFORE → AFTER</th></tr></thead><tbody>" +
    rows +
    "</tbody></table>"
  );
}

export function renderSource(
  text: string,
  highlight: { start: number; end: number } | null,
): string {
  const lines = text.length === 0 ? [] : text.replace(/\n$/, "").split("\n");
  const rendered = lines.map((line, index) => {
    const lineNo = index + 1;
    const hl =
      highlight !== null && lineNo >= highlight.start && lineNo <= highlight.end;
    return (
      `<div class="line${hl ? " hl" : ""}" data-line="${lineNo}">` +
      `<span class="ln">${lineNo}</span>` +
      `<code>${escapeHtml(line) || " "}</code></div>`
    );
  });
  return `<div class="source">${rendered.join("")}</div>`;
}

export function renderChanges(changes: ChangeEntry[]): string {
  if (changes.length === 0) {
    return '<p class="empty">select a pattern to see its past changes</p>';
  }
  const blocks = changes.map((c) => {
    const when = new Date(c.timestamp * 1000).toISOString().slice(0, 10);
    const badge = c.is_bugfix ? '<span class="badge">bug-fix</span>' : "";
    return (
      '<article class="change">' +
      `<header><code class="sha">${escapeHtml(c.commit_id.slice(0, 12))}</code>` +
      ` ${escapeHtml(c.author)} · ${when} ${badge}</header>` +
      `<p class="log">${escapeHtml(c.log.trim())}</p>` +
      `<p class="where">${escapeHtml(c.path)} (${escapeHtml(c.kind)})</p>` +
      `<pre class="before">- ${escapeHtml(c.before_text)}</pre>` +
      `<pre class="after">+ ${escapeHtml(c.after_text)}</pre>` +
      "</article>"
    );
  });
  return blocks.join("");
}

export function renderError(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}
