/** Dependency-free SVG chart construction.
 *
 * Pure functions from series data to SVG markup; chart points carry
 * data-window attributes so the app layer can resolve clicks back to
 * metric windows.
 */

import type { MetricPointDoc, ThresholdDoc } from "./types.js";

export interface ChartSize {
  width: number;
  height: number;
  margin: number;
}

export const DEFAULT_SIZE: ChartSize = { width: 640, height: 240, margin: 42 };

export interface XY {
  x: number;
  y: number;
}

export function linearScale(
  domainMin: number,
  domainMax: number,
  rangeMin: number,
  rangeMax: number,
): (value: number) => number {
  const span = domainMax - domainMin;
  if (span === 0) {
    return () => (rangeMin + rangeMax) / 2;
  }
  return (value) => rangeMin + ((value - domainMin) / span) * (rangeMax - rangeMin);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function numericValues(points: MetricPointDoc[]): number[] {
  return points.map((p) => (typeof p.value === "number" ? p.value : 0));
}

export function seriesExtent(values: number[], thresholds: number[] = []): [number, number] {
  const all = [...values, ...thresholds];
  let min = Math.min(...all);
  let max = Math.max(...all);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const pad = (max - min) * 0.08;
  return [min - pad, max + pad];
}

export function pointPositions(points: MetricPointDoc[], size: ChartSize, extent: [number, number]): XY[] {
  const xs = linearScale(0, Math.max(points.length - 1, 1), size.margin, size.width - size.margin);
  const ys = linearScale(extent[0], extent[1], size.height - size.margin, size.margin);
  return numericValues(points).map((value, index) => ({ x: xs(index), y: ys(value) }));
}

export function linePath(positions: XY[]): string {
  return positions
    .map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(1)},${p.y.toFixed(1)}`)
    .join(" ");
}

function axisLabels(points: MetricPointDoc[]): string {
  if (points.length === 0) return "";
  const first = points[0]!["window-start"].slice(0, 10);
  const last = points[points.length - 1]!["window-start"].slice(0, 10);
  return `<text class="axis" x="6" y="14">${escapeHtml(first)} … ${escapeHtml(last)}</text>`;
}

function thresholdLines(
  thresholds: ThresholdDoc[],
  size: ChartSize,
  extent: [number, number],
): string {
  const ys = linearScale(extent[0], extent[1], size.height - size.margin, size.margin);
  return thresholds
    .map((t) => {
      const y = ys(t.threshold).toFixed(1);
      return (
        `<line class="threshold" x1="${size.margin}" y1="${y}"` +
        ` x2="${size.width - size.margin}" y2="${y}"></line>` +
        `<text class="threshold-label" x="${size.width - size.margin + 4}" y="${y}">` +
        `${t.comparator} ${t.threshold}</text>`
      );
    })
    .join("");
}

function clickablePoints(
  positions: XY[],
  points: MetricPointDoc[],
  series: string,
): string {
  return positions
    .map((pos, i) => {
      const point = points[i]!;
      const value = typeof point.value === "number" ? point.value : 0;
      return (
        `<circle class="pt" data-series="${escapeHtml(series)}"` +
        ` data-window="${escapeHtml(point["window-start"])}"` +
        ` cx="${pos.x.toFixed(1)}" cy="${pos.y.toFixed(1)}" r="4">` +
        `<title>${escapeHtml(point["window-start"].slice(0, 10))}: ${value}</title></circle>`
      );
    })
    .join("");
}

/** Single-metric trend chart with optional threshold guides. */
export function trendChart(
  points: MetricPointDoc[],
  thresholds: ThresholdDoc[] = [],
  size: ChartSize = DEFAULT_SIZE,
): string {
  if (points.length === 0) {
    return `<svg class="chart" viewBox="0 0 ${size.width} ${size.height}"></svg>`;
  }
  const extent = seriesExtent(numericValues(points), thresholds.map((t) => t.threshold));
  const positions = pointPositions(points, size, extent);
  return (
    `<svg class="chart" viewBox="0 0 ${size.width} ${size.height}">` +
    axisLabels(points) +
    thresholdLines(thresholds, size, extent) +
    `<path class="line primary" d="${linePath(positions)}"></path>` +
    clickablePoints(positions, points, "primary") +
    `</svg>`
  );
}

export interface OverlaySeries {
  metricId: string;
  points: MetricPointDoc[];
}

/** Window range shared by both overlay series (intersection, by window-start). */
export function clampToSharedRange(
  a: MetricPointDoc[],
  b: MetricPointDoc[],
): [MetricPointDoc[], MetricPointDoc[]] {
  if (a.length === 0 || b.length === 0) return [[], []];
  const start = [a[0]!, b[0]!].map((p) => p["window-start"]).sort()[1]!;
  const end = [a[a.length - 1]!, b[b.length - 1]!].map((p) => p["window-start"]).sort()[0]!;
  const inRange = (p: MetricPointDoc) =>
    p["window-start"] >= start && p["window-start"] <= end;
  return [a.filter(inRange), b.filter(inRange)];
}

/** Dual-axis chart correlating two metrics over a shared window range. */
export function overlayChart(
  left: OverlaySeries,
  right: OverlaySeries,
  size: ChartSize = DEFAULT_SIZE,
): string {
  const [a, b] = clampToSharedRange(left.points, right.points);
  if (a.length === 0 || b.length === 0) {
    return `<svg class="chart overlay" viewBox="0 0 ${size.width} ${size.height}"></svg>`;
  }
  const leftExtent = seriesExtent(numericValues(a));
  const rightExtent = seriesExtent(numericValues(b));
  const leftPositions = pointPositions(a, size, leftExtent);
  const rightPositions = pointPositions(b, size, rightExtent);
  return (
    `<svg class="chart overlay" viewBox="0 0 ${size.width} ${size.height}">` +
    axisLabels(a) +
    `<text class="axis-name left" x="${size.margin}" y="${size.height - 8}">` +
    `${escapeHtml(left.metricId)}</text>` +
    `<text class="axis-name right" x="${size.width - size.margin}" y="${size.height - 8}"` +
    ` text-anchor="end">${escapeHtml(right.metricId)}</text>` +
    `<path class="line primary" d="${linePath(leftPositions)}"></path>` +
    `<path class="line secondary" d="${linePath(rightPositions)}"></path>` +
    clickablePoints(leftPositions, a, "primary") +
    clickablePoints(rightPositions, b, "secondary") +
    `</svg>`
  );
}

/** Stacked bars for distribution/status values (one bar per window). */
export function stackedBarChart(
  points: MetricPointDoc[],
  size: ChartSize = DEFAULT_SIZE,
): string {
  if (points.length === 0) {
    return `<svg class="chart stacked" viewBox="0 0 ${size.width} ${size.height}"></svg>`;
  }
  const categories = [
    ...new Set(points.flatMap((p) => (typeof p.value === "object" ? Object.keys(p.value) : []))),
  ].sort();
  const totals = points.map((p) =>
    typeof p.value === "object" ? Object.values(p.value).reduce((s, v) => s + v, 0) : 0,
  );
  const maxTotal = Math.max(...totals, 1);
  const ys = linearScale(0, maxTotal, size.height - size.margin, size.margin);
  const slot = (size.width - 2 * size.margin) / points.length;
  const barWidth = Math.max(slot * 0.6, 2);
  const bars: string[] = [];
  points.forEach((point, index) => {
    if (typeof point.value !== "object") return;
    let cumulative = 0;
    const x = (size.margin + index * slot + (slot - barWidth) / 2).toFixed(1);
    categories.forEach((category, catIndex) => {
      const count = point.value && typeof point.value === "object" ? (point.value[category] ?? 0) : 0;
      if (count === 0) return;
      const yTop = ys(cumulative + count);
      const height = ys(cumulative) - yTop;
      cumulative += count;
      bars.push(
        `<rect class="seg seg-${catIndex}" data-window="${escapeHtml(point["window-start"])}"` +
          ` x="${x}" y="${yTop.toFixed(1)}" width="${barWidth.toFixed(1)}"` +
          ` height="${height.toFixed(1)}"><title>${escapeHtml(category)}: ${count}</title></rect>`,
      );
    });
  });
  const legend = categories
    .map(
      (category, i) =>
        `<text class="legend seg-${i}" x="${DEFAULT_SIZE.margin + i * 110}" y="14">` +
        `${escapeHtml(category)}</text>`,
    )
    .join("");
  return (
    `<svg class="chart stacked" viewBox="0 0 ${size.width} ${size.height}">` +
    legend +
    bars.join("") +
    `</svg>`
  );
}
