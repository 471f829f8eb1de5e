// Wire types for the timeline service (GET /api/timelines).

export interface FrameView {
  frame_index: number;
  t_seconds: number;
  label: string;
  score: number;
}

export interface TimelineView {
  video_id: string;
  title: string;
  duration_s: number;
  frames: FrameView[];
  positive_fraction: number;
  positive_count: number;
  max_score: number;
  source_url?: string;
}

export interface TimelinesResponse {
  threshold: number;
  sort: SortKey;
  videos: TimelineView[];
}

export type SortKey = "positive_fraction" | "positive_count" | "max_score";

export const SORT_KEYS: SortKey[] = ["positive_fraction", "positive_count", "max_score"];

export interface Hovered {
  videoId: string;
  frameIndex: number;
}

export interface DisplayState {
  threshold: number;
  sortKey: SortKey;
  hovered: Hovered | null;
}

export function initialState(): DisplayState {
  return { threshold: 0.0, sortKey: "positive_fraction", hovered: null };
}
