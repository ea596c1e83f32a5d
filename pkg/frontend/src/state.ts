/**
 * Pure table state: what the player has seen so far.
 *
 * The state never recomputes probabilities; every slice stored here came
 * verbatim from a server response.
 */

import type { MeasureResponse } from "./api.js";

export interface Flip {
  position: number;
  outcome: number;
  probability: number;
  nonClassical: boolean;
}

export interface TableState {
  sessionId: string;
  n: number;
  /** last seen outcome per position (1-based outcomes), null = face down */
  cards: (number | null)[];
  slice: number[][];
  history: Flip[];
  nonClassicalEvents: Flip[];
}

export function initialTable(sessionId: string, n: number, slice: number[][]): TableState {
  checkSlice(slice, n);
  return {
    sessionId,
    n,
    cards: Array.from({ length: n }, () => null),
    slice,
    history: [],
    nonClassicalEvents: [],
  };
}

export function applyMeasurement(
  state: TableState,
  position: number,
  response: MeasureResponse,
): TableState {
  checkSlice(response.slice, state.n);
  const flip: Flip = {
    position,
    outcome: response.outcome,
    probability: response.probability,
    nonClassical: response.nonClassicalFlag,
  };
  const cards = state.cards.slice();
  cards[position - 1] = response.outcome;
  return {
    ...state,
    cards,
    slice: response.slice,
    history: [...state.history, flip],
    nonClassicalEvents: flip.nonClassical
      ? [...state.nonClassicalEvents, flip]
      : state.nonClassicalEvents,
  };
}

export function resetTable(state: TableState, slice: number[][]): TableState {
  return initialTable(state.sessionId, state.n, slice);
}

/** rows and columns of a slice must sum to one within display tolerance */
export function checkSlice(slice: number[][], n: number, tol = 1e-6): void {
  if (slice.length !== n) throw new Error(`slice must be ${n} x ${n}`);
  for (let i = 0; i < n; i++) {
    let row = 0;
    let col = 0;
    for (let j = 0; j < n; j++) {
      row += slice[i][j];
      col += slice[j][i];
    }
    if (Math.abs(row - 1) > tol || Math.abs(col - 1) > tol) {
      throw new Error(`slice is not doubly stochastic (line ${i + 1})`);
    }
  }
}

/** Event chain in measurement notation, latest event leftmost. */
export function historyChain(history: Flip[]): string {
  if (history.length === 0) return "(no flips yet)";
  return history
    .map((flip) => `[φ(${flip.position})=${flip.outcome}]`)
    .reverse()
    .join(" ≻ ");
}
