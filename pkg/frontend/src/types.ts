/** Payload shapes of the triage HTTP API. */

export interface FileEntry {
  path: string;
  match_count: number;
}

export interface Metrics {
  size: number;
  files: number;
  commits: number;
  authors: number;
  support: number;
  matched: number;
}

export interface MatchInfo {
  path: string;
  start_index: number;
  end_index: number;
  start_line: number;
  end_line: number;
}

export interface PatternEntry {
  id: number;
  before_text: string;
  after_text: string;
  metrics: Metrics;
  matches: MatchInfo[];
}

export interface ChangeEntry {
  commit_id: string;
  author: string;
  timestamp: number;
  log: string;
  is_bugfix: boolean;
  path: string;
  kind: string;
  before_text: string;
  after_text: string;
}

export interface SourcePayload {
  path: string;
  text: string;
}

export type MetricKey = keyof Metrics;

export const METRIC_KEYS: MetricKey[] = [
  "size",
  "files",
  "commits",
  "authors",
  "support",
  "matched",
];
