import { describe, expect, it } from "vitest";

import { formatPercent, tooltipText } from "../src/format.js";

describe("formatPercent", () => {
  it("uses one decimal place", () => {
    expect(formatPercent(0.873)).toBe("87.3%");
    expect(formatPercent(0.5)).toBe("50.0%");
    expect(formatPercent(0.0)).toBe("0.0%");
  });

  it("handles the endpoint", () => {
    expect(formatPercent(1.0)).toBe("100.0%");
  });
});

describe("tooltipText", () => {
  it("shows title, timestamp, and percentage", () => {
    const text = tooltipText("Clip 7", 3, 0.873);
    expect(text).toContain("Clip 7");
    expect(text).toContain("t=3s");
    expect(text).toContain("87.3%");
  });
});
