/**
 * Table controller: glues the API client, the pure state, and the renderer.
 *
 * Flips are serialized (the client queue plus a local busy flag that also
 * disables the UI), and a 409 null event disables the offending card
 * rather than crashing the table.
 */

import { ApiClient, ApiError, type GroupSpec, type MeasureResponse, type StateSpec } from "./api.js";
import { applyMeasurement, initialTable, resetTable, type TableState } from "./state.js";
import { render } from "./render.js";

export interface TableController {
  newTable(group: GroupSpec, state: StateSpec, seed: number): Promise<TableState>;
  flip(position: number): Promise<MeasureResponse | null>;
  reset(): Promise<TableState>;
  getState(): TableState | null;
  lastError(): string | null;
}

export function createTable(root: HTMLElement, client: ApiClient): TableController {
  let state: TableState | null = null;
  let busy = false;
  let errorText: string | null = null;
  const disabledPositions = new Set<number>();

  function redraw(): void {
    if (state === null) return;
    render(root, state, {
      onFlip: (position) => {
        void controller.flip(position);
      },
    });
    if (busy) root.classList.add("busy");
    else root.classList.remove("busy");
    for (const card of root.querySelectorAll<HTMLButtonElement>("#cards .card")) {
      const position = Number(card.dataset.position);
      card.disabled = busy || disabledPositions.has(position);
    }
  }

  const controller: TableController = {
    async newTable(group, stateSpec, seed) {
      const created = await client.createSession(group, stateSpec, seed);
      state = initialTable(created.id, created.n, created.slice);
      disabledPositions.clear();
      errorText = null;
      redraw();
      return state;
    },

    async flip(position) {
      if (state === null || busy || disabledPositions.has(position)) return null;
      busy = true;
      redraw();
      try {
        const response = await client.measure(state.sessionId, position);
        state = applyMeasurement(state, position, response);
        errorText = null;
        return response;
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          disabledPositions.add(position);
          errorText = `position ${position}: null event, flip disabled`;
          return null;
        }
        errorText = error instanceof Error ? error.message : String(error);
        throw error;
      } finally {
        busy = false;
        redraw();
      }
    },

    async reset() {
      if (state === null) throw new Error("no active table");
      const restored = await client.reset(state.sessionId);
      state = resetTable(state, restored.slice);
      disabledPositions.clear();
      errorText = null;
      redraw();
      return state;
    },

    getState: () => state,
    lastError: () => errorText,
  };
  return controller;
}
