/** Board and panel rendering: config validation plus HTML for each panel state.
 *
 * Panels a principal cannot read render as explicit access-denied
 * placeholders, never as silently empty charts; every panel footer shows
 * the server-reported freshness stamp.
 */

import { escapeHtml, overlayChart, stackedBarChart, trendChart } from "./charts.js";
import type {
  BoardConfig,
  CatalogDoc,
  CatalogEntry,
  MetricPointDoc,
  PanelConfig,
  ThresholdDoc,
} from "./types.js";

export type PanelState =
  | { kind: "loading" }
  | {
      kind: "data";
      points: MetricPointDoc[];
      overlayPoints?: MetricPointDoc[];
      lastUpdated: string | null;
    }
  | { kind: "access-denied"; message: string }
  | { kind: "error"; message: string };

export function catalogEntry(catalog: CatalogDoc, metricId: string): CatalogEntry | undefined {
  return catalog.metrics.find((m) => m["metric-id"] === metricId);
}

/** Threshold bands come from the catalog so UI and alerting share one source. */
export function thresholdsFor(catalog: CatalogDoc, metricId: string): ThresholdDoc[] {
  return catalogEntry(catalog, metricId)?.thresholds ?? [];
}

export function validateBoard(board: BoardConfig, catalog: CatalogDoc): string[] {
  const problems: string[] = [];
  board.panels.forEach((panel, index) => {
    const label = `panel ${index} (${panel["metric-id"]})`;
    if (panel.visualization === "overlay-pair") {
      const other = panel["overlay-metric-id"];
      if (!other) {
        problems.push(`${label}: overlay-pair needs overlay-metric-id`);
        return;
      }
      if (other === panel["metric-id"]) {
        problems.push(`${label}: overlay-pair must reference two different metrics`);
      }
      for (const metricId of [panel["metric-id"], other]) {
        const entry = catalogEntry(catalog, metricId);
        if (entry && entry["value-kind"] !== "number") {
          problems.push(`${label}: overlay metric ${metricId} is not numeric`);
        }
      }
    }
  });
  return problems;
}

function freshnessFooter(lastUpdated: string | null): string {
  const text = lastUpdated ? `last updated ${escapeHtml(lastUpdated)}` : "never computed";
  return `<footer class="freshness">${text}</footer>`;
}

function singleValue(points: MetricPointDoc[]): string {
  const latest = points[points.length - 1];
  if (!latest || typeof latest.value !== "number") {
    return `<div class="big-number none">–</div>`;
  }
  const rendered = Number.isInteger(latest.value)
    ? String(latest.value)
    : latest.value.toFixed(1);
  return (
    `<div class="big-number" data-window="${escapeHtml(latest["window-start"])}">` +
    `${rendered}</div>`
  );
}

export function renderPanel(
  panel: PanelConfig,
  state: PanelState,
  catalog: CatalogDoc,
  panelIndex: number,
): string {
  const entry = catalogEntry(catalog, panel["metric-id"]);
  const title = entry?.title ?? panel["metric-id"];
  const unit = entry ? ` <span class="unit">(${escapeHtml(entry.unit)})</span>` : "";
  const head =
    `<header>${escapeHtml(title)}${unit}` +
    ` <span class="scope">${escapeHtml(panel.scope)}</span></header>`;

  let body: string;
  let footer = "";
  switch (state.kind) {
    case "loading":
      body = `<div class="placeholder loading">loading…</div>`;
      break;
    case "access-denied":
      body =
        `<div class="placeholder access-denied">access denied` +
        `<span class="detail">${escapeHtml(state.message)}</span></div>`;
      break;
    case "error":
      body = `<div class="placeholder error">${escapeHtml(state.message)}</div>`;
      break;
    case "data": {
      footer = freshnessFooter(state.lastUpdated);
      if (state.points.length === 0) {
        body = `<div class="placeholder empty">no data in range</div>`;
        break;
      }
      const thresholds = thresholdsFor(catalog, panel["metric-id"]);
      switch (panel.visualization) {
        case "single-value":
          body = singleValue(state.points);
          break;
        case "distribution":
          body = stackedBarChart(state.points);
          break;
        case "overlay-pair":
          body = overlayChart(
            { metricId: panel["metric-id"], points: state.points },
            {
              metricId: panel["overlay-metric-id"] ?? "",
              points: state.overlayPoints ?? [],
            },
          );
          break;
        default:
          body = trendChart(state.points, thresholds);
      }
      break;
    }
  }
  return (
    `<section class="panel state-${state.kind}" data-panel="${panelIndex}">` +
    head +
    body +
    footer +
    `</section>`
  );
}

export function renderBoard(
  board: BoardConfig,
  states: PanelState[],
  catalog: CatalogDoc,
): string {
  const panels = board.panels
    .map((panel, index) =>
      renderPanel(panel, states[index] ?? { kind: "loading" }, catalog, index),
    )
    .join("");
  return `<h2>${escapeHtml(board.board)}</h2><div class="board">${panels}</div>`;
}
