/** Shared fixtures: a fetch mock plus series data matching the backend's
 * incident-scenario output. */

import type { FetchLike } from "../src/api.js";
import type {
  BoardConfig,
  CatalogDoc,
  DrilldownRecord,
  DrilldownResponse,
  MetricPointDoc,
} from "../src/types.js";

export interface Route {
  status?: number;
  body: unknown;
  headers?: Record<string, string>;
}

export interface MockFetch {
  fetch: FetchLike;
  calls: string[];
}

export function mockFetch(routes: Record<string, Route>): MockFetch {
  const calls: string[] = [];
  const fetch: FetchLike = async (url, init) => {
    calls.push(url);
    void init;
    const path = url.split("?")[0]!;
    const route = routes[path];
    if (!route) {
      return new Response(JSON.stringify({ detail: `no route ${path}` }), { status: 404 });
    }
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json", ...(route.headers ?? {}) },
    });
  };
  return { fetch, calls };
}

export const FAIL_RATES = [4, 5, 4, 6, 15, 20, 18, 16, 7, 5, 4, 5, 4, 4];
export const CYCLE_TIMES = [28, 26, 29, 31, 45, 52, 55, 48, 32, 29, 28, 27, 28, 26];

export function dayStart(dayNo: number): string {
  const day = String(3 + dayNo).padStart(2, "0");
  return `2024-03-${day}T00:00:00Z`;
}

export function series(values: number[], sampleSizes?: number[]): MetricPointDoc[] {
  return values.map((value, i) => ({
    "window-start": dayStart(i + 1),
    "window-end": dayStart(i + 2),
    value,
    "sample-size": sampleSizes?.[i] ?? 25,
    "computed-at": "2024-03-20T00:00:00Z",
  }));
}

export const CATALOG: CatalogDoc = {
  "schema-version": 1,
  metrics: [
    {
      "metric-id": "main-fail-rate",
      title: "Main Fail Rate",
      unit: "percent",
      area: "operations",
      "value-kind": "number",
      thresholds: [{ "rule-id": "fail-high", comparator: "gt", threshold: 10 }],
    },
    {
      "metric-id": "pr-cycle-time",
      title: "PR Cycle Time",
      unit: "hours",
      area: "productivity",
      "value-kind": "number",
      thresholds: [],
    },
    {
      "metric-id": "user-crash-rate",
      title: "User Crash Rate",
      unit: "percent",
      area: "quality",
      "value-kind": "number",
      thresholds: [{ "rule-id": "crash-above-5", comparator: "gt", threshold: 5 }],
    },
    {
      "metric-id": "bug-mix",
      title: "Bug Mix",
      unit: "count-by-priority",
      area: "quality",
      "value-kind": "distribution",
      thresholds: [],
    },
  ],
};

/** The 25 main builds behind the 20% incident-peak point (5 failures). */
export function peakDayRecords(): DrilldownRecord[] {
  const records: DrilldownRecord[] = [];
  for (let i = 0; i < 25; i += 1) {
    records.push({
      "source-id": "splunk",
      "natural-key": `android-main-06-${String(i).padStart(3, "0")}`,
      version: 1,
      "fetched-at": "2024-03-20T00:00:00Z",
      event: {
        "event-kind": "build",
        "build-id": `android-main-06-${String(i).padStart(3, "0")}`,
        outcome: i % 5 === 0 ? "failure" : "success",
        branch: "main",
      },
    });
  }
  return records;
}

export function peakDrilldown(): DrilldownResponse {
  return {
    "metric-id": "main-fail-rate",
    scope: "platform:android",
    "window-start": dayStart(6),
    "window-end": dayStart(7),
    value: 20.0,
    "sample-size": 25,
    records: peakDayRecords(),
  };
}

export const INCIDENT_BOARD: BoardConfig = {
  board: "operations",
  panels: [
    {
      "metric-id": "main-fail-rate",
      scope: "platform:android",
      visualization: "trend",
    },
    {
      "metric-id": "pr-cycle-time",
      scope: "platform:android",
      visualization: "overlay-pair",
      "overlay-metric-id": "main-fail-rate",
    },
    {
      "metric-id": "user-crash-rate",
      scope: "platform:android",
      visualization: "trend",
    },
  ],
};
