/** Thin fetch client for the triage API; all numbers come from here. */

import {
  ChangeEntry,
  FileEntry,
  PatternEntry,
  SourcePayload,
} from "./types.js";
import { ViewState } from "./state.js";

export interface Filters {
  logKw?: string | null;
  maxMatches?: number | null;
  pathKw?: string | null;
  excludePath?: string | null;
}

/** The exact query parameters the server's filter endpoints accept. */
export function filterParams(filters: Filters): URLSearchParams {
  const params = new URLSearchParams();
  if (filters.logKw) params.set("log_kw", filters.logKw);
  if (filters.maxMatches !== null && filters.maxMatches !== undefined) {
    params.set("max_matches", String(filters.maxMatches));
  }
  if (filters.pathKw) params.set("path_kw", filters.pathKw);
  if (filters.excludePath) params.set("exclude_path", filters.excludePath);
  return params;
}

export function filtersOf(state: ViewState): Filters {
  return {
    logKw: state.logKw,
    maxMatches: state.maxMatches,
    pathKw: state.pathKw,
    excludePath: state.excludePath,
  };
}

function withQuery(path: string, params: URLSearchParams): string {
  const query = params.toString();
  return query ? `${path}?${query}` : path;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw new Error(`${path}: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  filesUrl(filters: Filters): string {
    return withQuery("/api/files", filterParams(filters));
  }

  patternsUrl(filters: Filters, file?: string | null): string {
    const params = filterParams(filters);
    if (file) params.set("file", file);
    return withQuery("/api/patterns", params);
  }

  files(filters: Filters): Promise<FileEntry[]> {
    return this.getJson(this.filesUrl(filters));
  }

  patterns(filters: Filters, file?: string | null): Promise<PatternEntry[]> {
    return this.getJson(this.patternsUrl(filters, file));
  }

  changes(patternId: number): Promise<ChangeEntry[]> {
    return this.getJson(`/api/patterns/${patternId}/changes`);
  }

  source(path: string): Promise<SourcePayload> {
    const params = new URLSearchParams({ path });
    return this.getJson(withQuery("/api/source", params));
  }
}
