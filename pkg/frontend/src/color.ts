// Frame segment coloring. Below the display threshold a segment is neutral
// grey; at or above it, the red channel ramps linearly in lightness from dark
// red at score == threshold to bright red at score == 1.

export const GREY = "hsl(0, 0%, 42%)";

const DARK_LIGHTNESS = 22; // percent, score at the threshold
const BRIGHT_LIGHTNESS = 56; // percent, score 1.0

export function colorFor(score: number, threshold: number): string {
  if (score < 0 || score > 1 || threshold < 0 || threshold > 1) {
    throw new RangeError(`score and threshold must be in [0,1]: ${score}, ${threshold}`);
  }
  if (score < threshold) {
    return GREY;
  }
  // Degenerate threshold == 1: the only displayable score is 1, shown bright.
  const span = 1 - threshold;
  const t = span === 0 ? 1 : (score - threshold) / span;
  const lightness = DARK_LIGHTNESS + t * (BRIGHT_LIGHTNESS - DARK_LIGHTNESS);
  return `hsl(0, 85%, ${round2(lightness)}%)`;
}

export function isColored(score: number, threshold: number): boolean {
  return score >= threshold;
}

function round2(x: number): number {
  return Math.round(x * 100) / 100;
}
