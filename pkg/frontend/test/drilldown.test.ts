import { describe, expect, it } from "vitest";

import { orderedRecords, renderDrilldown, renderDrilldownDenied } from "../src/drilldown.js";
import { peakDayRecords, peakDrilldown } from "./helpers.js";

describe("orderedRecords", () => {
  it("puts failed records first", () => {
    const ordered = orderedRecords(peakDayRecords());
    const failures = ordered.filter((r) => r.event["outcome"] === "failure");
    expect(failures).toHaveLength(5);
    expect(ordered.slice(0, 5)).toEqual(failures);
  });
});

describe("renderDrilldown", () => {
  it("lists source ids and natural keys for every contributing record", () => {
    const html = renderDrilldown(peakDrilldown());
    expect(html.match(/<tr class/g)).toHaveLength(25);
    expect(html.match(/class="failed"/g)).toHaveLength(5);
    expect(html).toContain("splunk");
    expect(html).toContain("android-main-06-000");
    expect(html).toContain("value 20");
  });

  it("says so when nothing contributed", () => {
    const doc = { ...peakDrilldown(), records: [], value: 0, "sample-size": 0 };
    expect(renderDrilldown(doc)).toContain("no contributing records");
  });

  it("renders permission failures as a message, not a table", () => {
    const html = renderDrilldownDenied("raw drill-down not permitted for this principal");
    expect(html).toContain("drill-down not permitted");
    expect(html).not.toContain("<table");
  });
});
