/** View state and its query-string encoding (deep links). */

import { METRIC_KEYS, MetricKey, PatternEntry } from "./types.js";

export type SortDirection = "asc" | "desc";

export interface ViewState {
  logKw: string | null;
  maxMatches: number | null;
  pathKw: string | null;
  excludePath: string | null;
  file: string | null;
  psbp: number | null;
  sort: MetricKey | null;
  sortDir: SortDirection;
}

export function emptyState(): ViewState {
  return {
    logKw: null,
    maxMatches: null,
    pathKw: null,
    excludePath: null,
    file: null,
    psbp: null,
    sort: null,
    sortDir: "desc",
  };
}

/** Encode into a query string; filter keys match the API's parameters. */
export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.logKw) params.set("log_kw", state.logKw);
  if (state.maxMatches !== null) params.set("max_matches", String(state.maxMatches));
  if (state.pathKw) params.set("path_kw", state.pathKw);
  if (state.excludePath) params.set("exclude_path", state.excludePath);
  if (state.file) params.set("file", state.file);
  if (state.psbp !== null) params.set("psbp", String(state.psbp));
  if (state.sort) {
    params.set("sort", state.sort);
    params.set("dir", state.sortDir);
  }
  return params.toString();
}

export function decodeViewState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = emptyState();
  state.logKw = params.get("log_kw");
  state.pathKw = params.get("path_kw");
  state.excludePath = params.get("exclude_path");
  state.file = params.get("file");
  const max = params.get("max_matches");
  if (max !== null && /^[0-9]+$/.test(max) && Number(max) > 0) {
    state.maxMatches = Number(max);
  }
  const psbp = params.get("psbp");
  if (psbp !== null && /^[0-9]+$/.test(psbp)) {
    state.psbp = Number(psbp);
  }
  const sort = params.get("sort");
  if (sort !== null && (METRIC_KEYS as string[]).includes(sort)) {
    state.sort = sort as MetricKey;
    state.sortDir = params.get("dir") === "asc" ? "asc" : "desc";
  }
  return state;
}

/**
 * Enforce the selection invariant: the selected pattern must be one of
 * the selected file's patterns. Returns the corrected pattern id.
 */
export function reconcileSelection(
  state: ViewState,
  patterns: PatternEntry[],
): number | null {
  if (state.psbp === null) return null;
  return patterns.some((p) => p.id === state.psbp) ? state.psbp : null;
}
