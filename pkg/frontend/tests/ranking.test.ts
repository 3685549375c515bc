import { describe, expect, it } from "vitest";

import { RankingState } from "../src/ranking.js";

describe("RankingState", () => {
  it("assigns ranks in click order", () => {
    const state = new RankingState();
    state.toggle("gold");
    state.toggle("lemon");
    state.toggle("sun");
    expect(state.rankOf("gold")).toBe(1);
    expect(state.rankOf("lemon")).toBe(2);
    expect(state.rankOf("sun")).toBe(3);
    expect(state.rankOf("rock")).toBeNull();
  });

  it("caps selection at four words", () => {
    const state = new RankingState();
    for (const word of ["a", "b", "c", "d", "e"]) state.toggle(word);
    expect(state.ranks).toEqual(["a", "b", "c", "d"]);
    expect(state.rankOf("e")).toBeNull();
  });

  it("toggling a selected word deselects it", () => {
    const state = new RankingState();
    state.toggle("a");
    state.toggle("a");
    expect(state.ranks).toEqual([]);
  });

  it("deselecting the third of four promotes the fourth to rank 3", () => {
    const state = new RankingState();
    for (const word of ["a", "b", "c", "d"]) state.toggle(word);
    state.toggle("c");
    expect(state.rankOf("d")).toBe(3);
    expect(state.ranks).toEqual(["a", "b", "d"]);
  });

  it("requires two ranks before submit", () => {
    const state = new RankingState();
    expect(state.canSubmit()).toBe(false);
    state.toggle("a");
    expect(state.canSubmit()).toBe(false);
    state.toggle("b");
    expect(state.canSubmit()).toBe(true);
  });

  it("offers stop-early only between two and three picks", () => {
    const state = new RankingState();
    expect(state.canStopEarly()).toBe(false);
    state.toggle("a");
    state.toggle("b");
    expect(state.canStopEarly()).toBe(true);
    state.toggle("c");
    expect(state.canStopEarly()).toBe(true);
    state.toggle("d");
    expect(state.canStopEarly()).toBe(false);
  });

  it("builds a response with null optional ranks", () => {
    const state = new RankingState();
    state.toggle("gold");
    state.toggle("lemon");
    expect(state.toResponse("t1", "p1")).toEqual({
      trialId: "t1",
      rank1: "gold",
      rank2: "lemon",
      rank3: null,
      rank4: null,
      responderId: "p1",
    });
  });

  it("refuses to build an incomplete response", () => {
    const state = new RankingState();
    state.toggle("gold");
    expect(() => state.toResponse("t1", "p1")).toThrow();
  });

  it("reset clears everything", () => {
    const state = new RankingState();
    state.toggle("a");
    state.toggle("b");
    state.reset();
    expect(state.ranks).toEqual([]);
    expect(state.canSubmit()).toBe(false);
  });
});
