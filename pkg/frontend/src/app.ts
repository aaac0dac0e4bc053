/** Panel wiring: state lives in the URL, every number comes from the API. */

import { ApiClient, filtersOf } from "./api.js";
import {
  decodeViewState,
  encodeViewState,
  reconcileSelection,
  ViewState,
} from "./state.js";
import {
  renderChanges,
  renderError,
  renderFileList,
  renderPatternTable,
  renderSource,
} from "./render.js";
import { MetricKey, PatternEntry } from "./types.js";

const api = new ApiClient("");
let state: ViewState = decodeViewState(window.location.search);
let filePatterns: PatternEntry[] = [];

// one monotonic ticket per panel: stale responses lose
const tickets = { files: 0, patterns: 0, source: 0, changes: 0 };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function syncUrl(): void {
  const query = encodeViewState(state);
  const url = query ? `?${query}` : window.location.pathname;
  window.history.replaceState(null, "", url);
}

function showError(message: string): void {
  el("error-slot").innerHTML = renderError(message);
}

function clearError(): void {
  el("error-slot").innerHTML = "";
}

async function refreshFiles(): Promise<void> {
  const ticket = ++tickets.files;
  const files = await api.files(filtersOf(state));
  if (ticket !== tickets.files) return;
  el("file-list-slot").innerHTML = renderFileList(files, state.file);
}

async function refreshPatterns(): Promise<void> {
  const ticket = ++tickets.patterns;
  if (!state.file) {
    filePatterns = [];
    el("pattern-slot").innerHTML =
      '<p class="empty">select a file to list its patterns</p>';
    return;
  }
  const patterns = await api.patterns(filtersOf(state), state.file);
  if (ticket !== tickets.patterns) return;
  filePatterns = patterns;
  state.psbp = reconcileSelection(state, patterns);
  el("pattern-slot").innerHTML = renderPatternTable(
    patterns,
    state.psbp,
    state.sort,
    state.sortDir,
  );
}

async function refreshSource(): Promise<void> {
  const ticket = ++tickets.source;
  if (!state.file) {
    el("source-slot").innerHTML = '<p class="empty">no file selected</p>';
    return;
  }
  const payload = await api.source(state.file);
  if (ticket !== tickets.source) return;
  el("source-slot").innerHTML = renderSource(payload.text, currentHighlight());
  scrollToHighlight();
}

async function refreshChanges(): Promise<void> {
  const ticket = ++tickets.changes;
  if (state.psbp === null) {
    el("changes-slot").innerHTML = renderChanges([]);
    return;
  }
  const changes = await api.changes(state.psbp);
  if (ticket !== tickets.changes) return;
  el("changes-slot").innerHTML = renderChanges(changes);
}

function currentHighlight(): { start: number; end: number } | null {
  if (state.psbp === null || !state.file) return null;
  const pattern = filePatterns.find((p) => p.id === state.psbp);
  const match = pattern?.matches.find((m) => m.path === state.file);
  if (!match) return null;
  return { start: match.start_line, end: match.end_line };
}

function scrollToHighlight(): void {
  const first = document.querySelector("#source-slot .line.hl");
  if (first) first.scrollIntoView({ block: "center" });
}

async function refreshAll(): Promise<void> {
  clearError();
  syncUrl();
  try {
    await Promise.all([refreshFiles(), refreshPatterns()]);
    await Promise.all([refreshSource(), refreshChanges()]);
  } catch (err) {
    showError(`API request failed: ${String(err)}`);
  }
}

function readFilterInputs(): void {
  const logKw = el<HTMLInputElement>("log-kw").value.trim();
  const maxRaw = el<HTMLInputElement>("max-matches").value.trim();
  const pathKw = el<HTMLInputElement>("path-kw").value.trim();
  const exclude = el<HTMLInputElement>("exclude-path").value.trim();
  state.logKw = logKw || null;
  state.maxMatches = /^[0-9]+$/.test(maxRaw) && Number(maxRaw) > 0 ? Number(maxRaw) : null;
  state.pathKw = pathKw || null;
  state.excludePath = exclude || null;
}

function writeFilterInputs(): void {
  el<HTMLInputElement>("log-kw").value = state.logKw ?? "";
  el<HTMLInputElement>("max-matches").value =
    state.maxMatches === null ? "" : String(state.maxMatches);
  el<HTMLInputElement>("path-kw").value = state.pathKw ?? "";
  el<HTMLInputElement>("exclude-path").value = state.excludePath ?? "";
}

function bindEvents(): void {
  for (const id of ["log-kw", "max-matches", "path-kw", "exclude-path"]) {
    el(id).addEventListener("input", () => {
      readFilterInputs();
      void refreshAll();
    });
  }
  el("file-list-slot").addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>("li.file");
    if (!item || !item.dataset.path) return;
    state.file = item.dataset.path;
    state.psbp = null;
    void refreshAll();
  });
  el("pattern-slot").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const header = target.closest<HTMLElement>("th.sortable");
    if (header && header.dataset.sort) {
      const key = header.dataset.sort as MetricKey;
      if (state.sort === key) {
        state.sortDir = state.sortDir === "desc" ? "asc" : "desc";
      } else {
        state.sort = key;
        state.sortDir = "desc";
      }
      syncUrl();
      el("pattern-slot").innerHTML = renderPatternTable(
        filePatterns,
        state.psbp,
        state.sort,
        state.sortDir,
      );
      return;
    }
    const row = target.closest<HTMLElement>("tr.pattern");
    if (!row || !row.dataset.psbp) return;
    state.psbp = Number(row.dataset.psbp);
    syncUrl();
    el("pattern-slot").innerHTML = renderPatternTable(
      filePatterns,
      state.psbp,
      state.sort,
      state.sortDir,
    );
    void refreshSource();
    void refreshChanges();
  });
}

export function boot(): void {
  writeFilterInputs();
  bindEvents();
  void refreshAll();
}

boot();
