import { colorFor, GREY, isColored } from "./color.js";
import { formatPercent, tooltipText } from "./format.js";
import type { DisplayState, Hovered, TimelineView } from "./types.js";

export interface GridHooks {
  onHover?: (hovered: Hovered | null) => void;
}

// One cell per video in the given order; inside each cell, one segment per
// frame laid out proportionally to its timestamp over the video duration
// (equal widths when sampling was uniform).
export function renderGrid(
  container: HTMLElement,
  videos: TimelineView[],
  state: DisplayState,
  hooks: GridHooks = {},
): void {
  container.textContent = "";
  if (videos.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-state";
    empty.textContent = "No timelines in this batch.";
    container.appendChild(empty);
    return;
  }
  const tooltip = ensureTooltip(container);
  for (const video of videos) {
    container.appendChild(renderCell(video, state, tooltip, hooks));
  }
}

function segmentWidthPercent(video: TimelineView, index: number): number {
  const frames = video.frames;
  if (video.duration_s <= 0) {
    return 100 / frames.length;
  }
  const start = frames[index].t_seconds;
  const end = index + 1 < frames.length ? frames[index + 1].t_seconds : video.duration_s;
  return Math.max(0, ((end - start) / video.duration_s) * 100);
}

export function displayedPositiveFraction(video: TimelineView, threshold: number): number {
  if (video.frames.length === 0) {
    return 0;
  }
  const colored = video.frames.filter((f) => isColored(f.score, threshold)).length;
  return colored / video.frames.length;
}

function renderCell(
  video: TimelineView,
  state: DisplayState,
  tooltip: HTMLElement,
  hooks: GridHooks,
): HTMLElement {
  const cell = document.createElement("div");
  cell.className = "cell";
  cell.dataset.videoId = video.video_id;

  const header = document.createElement("div");
  header.className = "cell-header";
  const title = document.createElement("span");
  title.className = "cell-title";
  title.textContent = video.title;
  header.appendChild(title);
  if (video.source_url) {
    const link = document.createElement("a");
    link.className = "cell-source";
    link.href = video.source_url;
    link.target = "_blank";
    link.rel = "noopener";
    link.textContent = "source";
    header.appendChild(link);
  }
  const stats = document.createElement("span");
  stats.className = "cell-stats";
  stats.textContent = formatPercent(displayedPositiveFraction(video, state.threshold));
  header.appendChild(stats);
  cell.appendChild(header);

  const bar = document.createElement("div");
  bar.className = "timeline";
  video.frames.forEach((frame, i) => {
    const segment = document.createElement("div");
    segment.className = "segment";
    const colored = isColored(frame.score, state.threshold);
    segment.classList.add(colored ? "colored" : "grey");
    segment.style.width = `${segmentWidthPercent(video, i)}%`;
    segment.style.backgroundColor = colored ? colorFor(frame.score, state.threshold) : GREY;
    segment.dataset.frameIndex = String(frame.frame_index);
    segment.dataset.score = String(frame.score);
    segment.addEventListener("mouseenter", (event) => {
      tooltip.textContent = tooltipText(video.title, frame.t_seconds, frame.score);
      tooltip.classList.add("visible");
      positionTooltip(tooltip, event);
      hooks.onHover?.({ videoId: video.video_id, frameIndex: frame.frame_index });
    });
    segment.addEventListener("mouseleave", () => {
      tooltip.classList.remove("visible");
      hooks.onHover?.(null);
    });
    bar.appendChild(segment);
  });
  cell.appendChild(bar);
  return cell;
}

function ensureTooltip(container: HTMLElement): HTMLElement {
  const doc = container.ownerDocument;
  let tooltip = doc.getElementById("tooltip");
  if (!tooltip) {
    tooltip = doc.createElement("div");
    tooltip.id = "tooltip";
    doc.body.appendChild(tooltip);
  }
  return tooltip;
}

function positionTooltip(tooltip: HTMLElement, event: MouseEvent): void {
  tooltip.style.left = `${event.pageX + 12}px`;
  tooltip.style.top = `${event.pageY + 12}px`;
}
