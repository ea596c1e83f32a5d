/**
 * DOM rendering: heatmap, card row, history chain, contradiction banner.
 *
 * Rendering is a full redraw from TableState; interaction handlers are
 * attached by the controller through the returned elements.
 */

import { historyChain, type TableState } from "./state.js";

export interface RenderHooks {
  onFlip?: (position: number) => void;
}

function heatColor(value: number): string {
  // color scale pinned to [0, 1]
  const clamped = Math.max(0, Math.min(1, value));
  const hue = 215;
  const light = 97 - clamped * 55;
  return `hsl(${hue}, 85%, ${light}%)`;
}

export function render(root: HTMLElement, state: TableState, hooks: RenderHooks = {}): void {
  root.replaceChildren();

  const banner = document.createElement("div");
  banner.id = "banner";
  banner.className = state.nonClassicalEvents.length > 0 ? "banner active" : "banner";
  if (state.nonClassicalEvents.length > 0) {
    const last = state.nonClassicalEvents[state.nonClassicalEvents.length - 1];
    banner.textContent =
      `Non-classical event: position ${last.position} changed to ` +
      `${last.outcome} on a re-flip (${state.nonClassicalEvents.length} so far)`;
  } else {
    banner.textContent = "";
  }
  root.appendChild(banner);

  const cardsRow = document.createElement("div");
  cardsRow.id = "cards";
  cardsRow.className = "cards";
  state.cards.forEach((face, index) => {
    const card = document.createElement("button");
    card.className = face === null ? "card down" : "card up";
    card.dataset.position = String(index + 1);
    card.dataset.outcome = face === null ? "" : String(face);
    card.textContent = face === null ? "?" : String(face);
    card.title =
      face === null
        ? `flip position ${index + 1}`
        : `position ${index + 1} last showed ${face}; flip again`;
    card.addEventListener("click", () => hooks.onFlip?.(index + 1));
    cardsRow.appendChild(card);
  });
  root.appendChild(cardsRow);

  const heatmap = document.createElement("table");
  heatmap.id = "heatmap";
  heatmap.className = "heatmap";
  for (let i = 0; i < state.n; i++) {
    const row = document.createElement("tr");
    for (let j = 0; j < state.n; j++) {
      const value = state.slice[i][j];
      const cell = document.createElement("td");
      cell.dataset.i = String(i + 1);
      cell.dataset.j = String(j + 1);
      cell.dataset.value = String(value);
      cell.style.backgroundColor = heatColor(value);
      cell.title = `P[φ(${j + 1})=${i + 1}] = ${value}`;
      cell.textContent = value.toFixed(3);
      row.appendChild(cell);
    }
    heatmap.appendChild(row);
  }
  root.appendChild(heatmap);

  const history = document.createElement("div");
  history.id = "history";
  history.className = "history";
  history.textContent = historyChain(state.history);
  root.appendChild(history);
}
