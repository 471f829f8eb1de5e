import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { boot, type App } from "../src/app.js";
import { installFetchStub, rankFixture } from "./fixtures.js";
import type { SortKey } from "../src/types.js";

let app: App;
let calls: string[];

beforeEach(async () => {
  calls = installFetchStub().calls;
  document.body.innerHTML = "<div id='app'></div>";
  app = await boot(document.getElementById("app") as HTMLElement, {
    baseUrl: "http://service.test",
  });
});

afterEach(() => {
  vi.unstubAllGlobals();
});

function cellOrder(): string[] {
  return Array.from(document.querySelectorAll(".cell")).map(
    (c) => (c as HTMLElement).dataset.videoId as string,
  );
}

describe("App", () => {
  it("initial load fetches once and renders in response order", () => {
    expect(app.api.fetchCount).toBe(1);
    expect(cellOrder()).toEqual(rankFixture(0, "positive_fraction").map((v) => v.video_id));
  });

  it("threshold moves re-render without refetching", () => {
    const before = app.api.fetchCount;
    const renders = app.renderCount;
    const slider = document.getElementById("threshold") as HTMLInputElement;
    slider.value = "25";
    slider.dispatchEvent(new Event("input", { bubbles: true }));
    expect(app.api.fetchCount).toBe(before); // no network traffic
    expect(app.renderCount).toBe(renders + 1); // exactly one re-render
    expect(app.state.threshold).toBeCloseTo(0.25, 12);
    const grey = document.querySelectorAll(".segment.grey").length;
    expect(grey).toBeGreaterThan(0);
  });

  it("sort change fetches exactly once and reorders to match the service", async () => {
    for (const sortKey of ["positive_count", "max_score"] as SortKey[]) {
      const before = app.api.fetchCount;
      await app.setSortKey(sortKey);
      expect(app.api.fetchCount).toBe(before + 1);
      expect(cellOrder()).toEqual(
        rankFixture(app.state.threshold, sortKey).map((v) => v.video_id),
      );
    }
  });

  it("sort select element is wired to the same path", async () => {
    const select = document.getElementById("sort") as HTMLSelectElement;
    select.value = "max_score";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await vi.waitFor(() => {
      expect(cellOrder()).toEqual(rankFixture(0, "max_score").map((v) => v.video_id));
    });
    expect(app.state.sortKey).toBe("max_score");
  });

  it("raising the threshold only shrinks the colored set", () => {
    const coloredSet = () =>
      new Set(
        Array.from(document.querySelectorAll(".segment.colored")).map((s) => {
          const el = s as HTMLElement;
          const cell = el.closest(".cell") as HTMLElement;
          return `${cell.dataset.videoId}#${el.dataset.frameIndex}`;
        }),
      );
    app.setThreshold(0.2);
    const low = coloredSet();
    app.setThreshold(0.6);
    const high = coloredSet();
    for (const key of high) {
      expect(low.has(key)).toBe(true);
    }
    expect(high.size).toBeLessThanOrEqual(low.size);
  });

  it("hover state tracks the hovered frame", () => {
    const segment = document.querySelector(
      `[data-video-id="v_alpha"] .segment`,
    ) as HTMLElement;
    segment.dispatchEvent(new MouseEvent("mouseenter"));
    expect(app.state.hovered).toEqual({ videoId: "v_alpha", frameIndex: 0 });
    segment.dispatchEvent(new MouseEvent("mouseleave"));
    expect(app.state.hovered).toBeNull();
  });
});
