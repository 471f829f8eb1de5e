// Text formatting for tooltips and stats.

export function formatPercent(score: number): string {
  return `${(score * 100).toFixed(1)}%`;
}

export function formatSeconds(t: number): string {
  return Number.isInteger(t) ? `${t}s` : `${t.toFixed(2)}s`;
}

export function tooltipText(title: string, tSeconds: number, score: number): string {
  return `${title} | t=${formatSeconds(tSeconds)} | ${formatPercent(score)}`;
}
