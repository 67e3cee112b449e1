/** Navigation state machine: board -> focused panel -> drill-down.
 *
 * A drill-down is always exactly two interactions from the board: click a
 * panel (focus), then click a chart point. The machine is pure apart from
 * the injected API client, so the flow is testable without a DOM.
 */

import { PermissionDeniedError } from "./api.js";
import type { QueryApiClient } from "./api.js";
import type { PanelState } from "./board.js";
import type {
  BoardConfig,
  CatalogDoc,
  DrilldownResponse,
  PanelConfig,
} from "./types.js";

export type View =
  | { kind: "board" }
  | { kind: "panel-focus"; panelIndex: number }
  | {
      kind: "drilldown";
      panelIndex: number;
      doc: DrilldownResponse | null;
      denied: string | null;
    };

export class DashboardApp {
  view: View = { kind: "board" };
  panelStates: PanelState[] = [];
  /** Interactions since the board was shown; drill-down must sit at 2. */
  clicksFromBoard = 0;

  constructor(
    private readonly api: QueryApiClient,
    readonly board: BoardConfig,
    readonly catalog: CatalogDoc,
  ) {
    this.panelStates = board.panels.map(() => ({ kind: "loading" }));
  }

  private async loadSeries(panel: PanelConfig): Promise<PanelState> {
    try {
      const result = await this.api.series(panel["metric-id"], {
        scope: panel.scope,
        granularity: panel.granularity ?? "daily",
      });
      const state: PanelState = {
        kind: "data",
        points: result.body.points,
        lastUpdated: result.lastUpdated,
      };
      if (panel.visualization === "overlay-pair" && panel["overlay-metric-id"]) {
        const overlay = await this.api.series(panel["overlay-metric-id"], {
          scope: panel.scope,
          granularity: panel.granularity ?? "daily",
        });
        state.overlayPoints = overlay.body.points;
      }
      return state;
    } catch (error) {
      if (error instanceof PermissionDeniedError) {
        return { kind: "access-denied", message: error.message };
      }
      return { kind: "error", message: error instanceof Error ? error.message : String(error) };
    }
  }

  async loadBoard(): Promise<PanelState[]> {
    this.view = { kind: "board" };
    this.clicksFromBoard = 0;
    this.panelStates = await Promise.all(
      this.board.panels.map((panel) => this.loadSeries(panel)),
    );
    return this.panelStates;
  }

  /** First interaction: focus one panel for point-level inspection. */
  clickPanel(panelIndex: number): View {
    if (panelIndex < 0 || panelIndex >= this.board.panels.length) {
      throw new RangeError(`no panel ${panelIndex}`);
    }
    this.clicksFromBoard += 1;
    this.view = { kind: "panel-focus", panelIndex };
    return this.view;
  }

  /** Second interaction: a chart point resolves to its drill-down table. */
  async clickPoint(windowStart: string): Promise<View> {
    if (this.view.kind !== "panel-focus") {
      throw new Error("a point can only be clicked on a focused panel");
    }
    const panelIndex = this.view.panelIndex;
    const panel = this.board.panels[panelIndex]!;
    this.clicksFromBoard += 1;
    try {
      const doc = await this.api.drilldown(
        panel["metric-id"],
        panel.scope,
        windowStart,
        panel.granularity ?? "daily",
      );
      this.view = { kind: "drilldown", panelIndex, doc, denied: null };
    } catch (error) {
      if (error instanceof PermissionDeniedError) {
        this.view = { kind: "drilldown", panelIndex, doc: null, denied: error.message };
      } else {
        throw error;
      }
    }
    return this.view;
  }

  backToBoard(): View {
    this.view = { kind: "board" };
    this.clicksFromBoard = 0;
    return this.view;
  }
}
