import { describe, expect, it } from "vitest";

import { StripChart } from "../src/charts.js";

describe("strip chart buffer", () => {
  it("windows out old samples", () => {
    const chart = new StripChart(5);
    const idx = chart.addSeries("x", "#fff");
    for (let t = 0; t <= 20; t += 1) chart.push(idx, t, t * 2);
    const s = chart.series[idx];
    expect(Math.min(...s.t)).toBeGreaterThanOrEqual(15);
    expect(s.t.length).toBe(s.v.length);
  });

  it("keeps series independent", () => {
    const chart = new StripChart(10);
    const a = chart.addSeries("a", "#fff");
    const b = chart.addSeries("b", "#000");
    chart.push(a, 1, 10);
    chart.push(b, 2, 20);
    expect(chart.series[a].t).toEqual([1]);
    expect(chart.series[b].t).toEqual([2]);
  });
});
