/** Browser bootstrap: token login, board selection, event delegation. */

import { AuthRequiredError, QueryApiClient } from "./api.js";
import { renderBoard, renderPanel, validateBoard } from "./board.js";
import { DashboardApp } from "./app.js";
import { renderDrilldown, renderDrilldownDenied } from "./drilldown.js";
import { escapeHtml } from "./charts.js";
import type { BoardConfig, CatalogDoc } from "./types.js";

const root = document.getElementById("root")!;

function loginForm(message = ""): void {
  root.innerHTML =
    `<div class="login"><h1>devlens</h1>` +
    (message ? `<p class="error">${escapeHtml(message)}</p>` : "") +
    `<label>API token <input id="token" type="password" autofocus></label>` +
    `<button id="enter">open dashboard</button></div>`;
  document.getElementById("enter")!.addEventListener("click", () => {
    const token = (document.getElementById("token") as HTMLInputElement).value.trim();
    if (token) {
      sessionStorage.setItem("devlens-token", token);
      void start(token);
    }
  });
}

function boardPicker(boards: BoardConfig[], onPick: (b: BoardConfig) => void): void {
  root.innerHTML =
    `<h1>devlens boards</h1><ul class="boards">` +
    boards
      .map((b, i) => `<li><button data-board="${i}">${escapeHtml(b.board)}</button></li>`)
      .join("") +
    `</ul>`;
  root.querySelectorAll("button[data-board]").forEach((button) =>
    button.addEventListener("click", () => {
      const index = Number((button as HTMLElement).dataset["board"]);
      onPick(boards[index]!);
    }),
  );
}

async function runBoard(
  api: QueryApiClient,
  board: BoardConfig,
  catalog: CatalogDoc,
): Promise<void> {
  const problems = validateBoard(board, catalog);
  if (problems.length > 0) {
    root.innerHTML = `<p class="error">invalid board: ${escapeHtml(problems.join("; "))}</p>`;
    return;
  }
  const app = new DashboardApp(api, board, catalog);

  const paint = (): void => {
    if (app.view.kind === "board") {
      root.innerHTML =
        renderBoard(board, app.panelStates, catalog) +
        `<p class="hint">click a panel, then a point, to reach the raw records</p>`;
    } else if (app.view.kind === "panel-focus") {
      const index = app.view.panelIndex;
      root.innerHTML =
        `<button id="back">← board</button>` +
        `<div class="focus">` +
        renderPanel(board.panels[index]!, app.panelStates[index]!, catalog, index) +
        `</div><p class="hint">click a point for its contributing records</p>`;
    } else {
      const view = app.view;
      root.innerHTML =
        `<button id="back">← board</button>` +
        `<div class="drill">` +
        (view.denied !== null
          ? renderDrilldownDenied(view.denied)
          : view.doc
            ? renderDrilldown(view.doc)
            : "") +
        `</div>`;
    }
    document.getElementById("back")?.addEventListener("click", () => {
      app.backToBoard();
      void app.loadBoard().then(paint);
    });
    root.querySelectorAll(".panel").forEach((panel) =>
      panel.addEventListener("click", (event) => {
        if (app.view.kind !== "board") return;
        const index = Number((panel as HTMLElement).dataset["panel"]);
        app.clickPanel(index);
        paint();
        event.stopPropagation();
      }),
    );
    root.querySelectorAll(".pt, .seg, .big-number").forEach((node) =>
      node.addEventListener("click", (event) => {
        if (app.view.kind !== "panel-focus") return;
        const windowStart = (node as HTMLElement).dataset["window"];
        if (!windowStart) return;
        event.stopPropagation();
        void app.clickPoint(windowStart).then(paint);
      }),
    );
  };

  await app.loadBoard();
  paint();
}

async function start(token: string): Promise<void> {
  const api = new QueryApiClient("", token);
  try {
    const [catalog, boardsDoc] = await Promise.all([api.catalog(), api.boards()]);
    if (boardsDoc.boards.length === 1) {
      await runBoard(api, boardsDoc.boards[0]!, catalog);
    } else {
      boardPicker(boardsDoc.boards, (board) => void runBoard(api, board, catalog));
    }
  } catch (error) {
    if (error instanceof AuthRequiredError) {
      sessionStorage.removeItem("devlens-token");
      loginForm("token rejected");
      return;
    }
    root.innerHTML = `<p class="error">${escapeHtml(String(error))}</p>`;
  }
}

const saved = sessionStorage.getItem("devlens-token");
if (saved) {
  void start(saved);
} else {
  loginForm();
}
