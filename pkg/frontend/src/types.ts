/** Wire types mirroring the query API's JSON documents. */

export interface MetricPointDoc {
  "window-start": string;
  "window-end": string;
  value: number | Record<string, number>;
  "sample-size": number;
  "computed-at": string;
}

export interface SeriesResponse {
  "metric-id": string;
  scope: string;
  granularity: string;
  points: MetricPointDoc[];
  "last-updated": string | null;
}

/** A series plus the response headers the UI must surface. */
export interface SeriesResult {
  body: SeriesResponse;
  /** Server-reported freshness (X-Last-Updated); never the client clock. */
  lastUpdated: string | null;
  cache: string | null;
}

export interface ThresholdDoc {
  "rule-id": string;
  comparator: string;
  threshold: number;
}

export interface CatalogEntry {
  "metric-id": string;
  title: string;
  unit: string;
  area: string;
  "value-kind": "number" | "distribution" | "status-triple";
  thresholds: ThresholdDoc[];
}

export interface CatalogDoc {
  "schema-version": number;
  metrics: CatalogEntry[];
}

export interface DrilldownRecord {
  "source-id": string;
  "natural-key": string;
  version: number;
  "fetched-at": string;
  event: Record<string, unknown>;
}

export interface DrilldownResponse {
  "metric-id": string;
  scope: string;
  "window-start": string;
  "window-end": string;
  value: number | Record<string, number>;
  "sample-size": number;
  records: DrilldownRecord[];
}

export type Visualization = "single-value" | "trend" | "distribution" | "overlay-pair";

export interface PanelConfig {
  "metric-id": string;
  scope: string;
  visualization: Visualization;
  /** Second metric for overlay-pair panels. */
  "overlay-metric-id"?: string;
  granularity?: string;
}

export interface BoardConfig {
  board: string;
  panels: PanelConfig[];
}

export interface BoardsDoc {
  boards: BoardConfig[];
}
