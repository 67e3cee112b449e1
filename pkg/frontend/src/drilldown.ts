/** Drill-down table: the raw records behind one metric point. */

import { escapeHtml } from "./charts.js";
import type { DrilldownRecord, DrilldownResponse } from "./types.js";

function eventSummary(record: DrilldownRecord): string {
  const event = record.event;
  const parts: string[] = [];
  for (const key of ["outcome", "state", "status", "priority", "branch", "value"]) {
    const value = event[key];
    if (typeof value === "string" || typeof value === "number") {
      parts.push(`${key}=${value}`);
    }
  }
  return parts.join(" ");
}

function isFailure(record: DrilldownRecord): boolean {
  return record.event["outcome"] === "failure";
}

/** Failed records sort first so incident drill-downs surface the culprits. */
export function orderedRecords(records: DrilldownRecord[]): DrilldownRecord[] {
  return [...records].sort((a, b) => {
    const failDelta = Number(isFailure(b)) - Number(isFailure(a));
    if (failDelta !== 0) return failDelta;
    return a["natural-key"] < b["natural-key"] ? -1 : 1;
  });
}

export function renderDrilldown(doc: DrilldownResponse): string {
  const heading =
    `<h3>${escapeHtml(doc["metric-id"])} · ${escapeHtml(doc.scope)} · ` +
    `${escapeHtml(doc["window-start"].slice(0, 10))}</h3>` +
    `<p class="drill-value">value ${
      typeof doc.value === "number" ? doc.value : escapeHtml(JSON.stringify(doc.value))
    } · sample ${doc["sample-size"]}</p>`;
  if (doc.records.length === 0) {
    return `${heading}<p class="placeholder empty">no contributing records</p>`;
  }
  const rows = orderedRecords(doc.records)
    .map(
      (record) =>
        `<tr class="${isFailure(record) ? "failed" : ""}">` +
        `<td>${escapeHtml(record["source-id"])}</td>` +
        `<td>${escapeHtml(record["natural-key"])}</td>` +
        `<td>${record.version}</td>` +
        `<td>${escapeHtml(String(record.event["event-kind"] ?? ""))}</td>` +
        `<td>${escapeHtml(eventSummary(record))}</td></tr>`,
    )
    .join("");
  return (
    heading +
    `<table class="drilldown"><thead><tr>` +
    `<th>source</th><th>natural key</th><th>version</th><th>kind</th><th>details</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderDrilldownDenied(message: string): string {
  return (
    `<div class="placeholder access-denied">drill-down not permitted` +
    `<span class="detail">${escapeHtml(message)}</span></div>`
  );
}
