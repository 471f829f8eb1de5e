import type { SortKey, TimelinesResponse } from "./types.js";

// Thin client over the timeline service. Concurrent requests for the same
// (sort, limit) pair share one in-flight fetch; the threshold rides along as
// a query parameter but never forces a refetch on its own (display filtering
// is client-side).
export class TimelineApi {
  private inflight = new Map<string, Promise<TimelinesResponse>>();
  fetchCount = 0;

  constructor(private baseUrl: string) {}

  fetchTimelines(
    threshold: number,
    sort: SortKey,
    limit?: number,
  ): Promise<TimelinesResponse> {
    const key = `${sort}|${limit ?? "all"}`;
    const existing = this.inflight.get(key);
    if (existing) {
      return existing;
    }
    const params = new URLSearchParams({ threshold: String(threshold), sort });
    if (limit !== undefined) {
      params.set("limit", String(limit));
    }
    this.fetchCount += 1;
    const promise = fetch(`${this.baseUrl}/api/timelines?${params.toString()}`)
      .then((resp) => {
        if (!resp.ok) {
          throw new Error(`timeline service responded ${resp.status}`);
        }
        return resp.json() as Promise<TimelinesResponse>;
      })
      .finally(() => {
        this.inflight.delete(key);
      });
    this.inflight.set(key, promise);
    return promise;
  }
}
