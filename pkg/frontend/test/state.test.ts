/** Pure table-state logic; no server needed. */

import { describe, expect, it } from "vitest";

import type { MeasureResponse } from "../src/api.js";
import {
  applyMeasurement,
  checkSlice,
  historyChain,
  initialTable,
  resetTable,
} from "../src/state.js";

const uniform = [
  [0.25, 0.25, 0.25, 0.25],
  [0.25, 0.25, 0.25, 0.25],
  [0.25, 0.25, 0.25, 0.25],
  [0.25, 0.25, 0.25, 0.25],
];

const collapsed = [
  [0, 0, 0.5, 0.5],
  [0, 0, 0.5, 0.5],
  [1, 0, 0, 0],
  [0, 1, 0, 0],
];

function measurement(outcome: number, flag = false): MeasureResponse {
  return { outcome, probability: 0.25, slice: collapsed, nonClassicalFlag: flag };
}

describe("table state", () => {
  it("starts face down with the served slice", () => {
    const table = initialTable("s1", 4, uniform);
    expect(table.cards).toEqual([null, null, null, null]);
    expect(table.history).toHaveLength(0);
    expect(table.slice).toBe(uniform);
  });

  it("applies measurements immutably and tracks history length", () => {
    const table = initialTable("s1", 4, uniform);
    const next = applyMeasurement(table, 1, measurement(3));
    expect(table.cards[0]).toBeNull();
    expect(next.cards[0]).toBe(3);
    expect(next.history).toHaveLength(1);
    expect(next.slice).toBe(collapsed);
  });

  it("collects non-classical events", () => {
    let table = initialTable("s1", 4, uniform);
    table = applyMeasurement(table, 1, measurement(3));
    table = applyMeasurement(table, 1, measurement(4, true));
    expect(table.nonClassicalEvents).toHaveLength(1);
    expect(table.nonClassicalEvents[0].outcome).toBe(4);
  });

  it("reset clears the faces and history", () => {
    let table = initialTable("s1", 4, uniform);
    table = applyMeasurement(table, 2, measurement(1));
    const fresh = resetTable(table, uniform);
    expect(fresh.cards).toEqual([null, null, null, null]);
    expect(fresh.history).toHaveLength(0);
  });

  it("renders the event chain latest first", () => {
    let table = initialTable("s1", 4, uniform);
    table = applyMeasurement(table, 1, measurement(3));
    table = applyMeasurement(table, 3, measurement(1));
    expect(historyChain(table.history)).toBe("[φ(3)=1] ≻ [φ(1)=3]");
  });

  it("rejects slices that are not doubly stochastic", () => {
    expect(() => checkSlice([[1, 0], [1, 0]], 2)).toThrow(/doubly stochastic/);
    expect(() => checkSlice(uniform, 4)).not.toThrow();
  });
});
