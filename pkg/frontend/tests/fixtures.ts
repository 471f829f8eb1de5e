import { vi } from "vitest";

import type { SortKey, TimelinesResponse, TimelineView } from "../src/types.js";

export function makeVideo(
  id: string,
  scores: number[],
  title?: string,
): TimelineView {
  return {
    video_id: id,
    title: title ?? `Video ${id}`,
    duration_s: scores.length,
    frames: scores.map((score, i) => ({
      frame_index: i,
      t_seconds: i,
      label: "target",
      score,
    })),
    positive_fraction: scores.length ? scores.filter((s) => s >= 0).length / scores.length : 0,
    positive_count: scores.length,
    max_score: scores.length ? Math.max(...scores) : 0,
  };
}

export const FIXTURE_VIDEOS: TimelineView[] = [
  makeVideo("v_alpha", [0.873, 0.1, 0.1, 0.1]),
  makeVideo("v_beta", [0.3, 0.3, 0.3, 0.1]),
  makeVideo("v_gamma", [0.5, 0.45]),
];

function metric(video: TimelineView, threshold: number, sort: SortKey): number {
  const positives = video.frames.filter((f) => f.score >= threshold).length;
  if (sort === "positive_count") return positives;
  if (sort === "max_score") return video.max_score;
  return video.frames.length ? positives / video.frames.length : 0;
}

export function rankFixture(threshold: number, sort: SortKey): TimelineView[] {
  return [...FIXTURE_VIDEOS].sort((a, b) => {
    const diff = metric(b, threshold, sort) - metric(a, threshold, sort);
    return diff !== 0 ? diff : a.video_id.localeCompare(b.video_id);
  });
}

// A stand-in for the timeline service that honors threshold/sort params,
// so app tests exercise the real client code path.
export function installFetchStub(): { calls: string[] } {
  const calls: string[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string) => {
      calls.push(String(url));
      const parsed = new URL(String(url));
      const threshold = Number(parsed.searchParams.get("threshold") ?? "0");
      const sort = (parsed.searchParams.get("sort") ?? "positive_fraction") as SortKey;
      const body: TimelinesResponse = {
        threshold,
        sort,
        videos: rankFixture(threshold, sort),
      };
      return new Response(JSON.stringify(body), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      });
    }),
  );
  return { calls };
}
