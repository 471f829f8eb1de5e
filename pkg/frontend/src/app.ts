import { TimelineApi } from "./api.js";
import { renderGrid } from "./grid.js";
import { initialState, SORT_KEYS, type SortKey, type TimelineView } from "./types.js";

export interface AppOptions {
  baseUrl: string;
}

// The application shell: threshold slider and sort selector on the right,
// timeline grid filling the rest. Threshold moves re-render from data already
// in memory; only a sort-key change (or initial load) talks to the service.
export class App {
  readonly api: TimelineApi;
  readonly state = initialState();
  videos: TimelineView[] = [];
  renderCount = 0;

  private grid!: HTMLElement;
  private thresholdInput!: HTMLInputElement;
  private thresholdLabel!: HTMLElement;
  private sortSelect!: HTMLSelectElement;

  constructor(private root: HTMLElement, options: AppOptions) {
    this.api = new TimelineApi(options.baseUrl);
  }

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <div class="layout">
        <main class="grid" id="grid"></main>
        <aside class="controls">
          <h1>triage viewer</h1>
          <label for="threshold">threshold <span id="threshold-label">0%</span></label>
          <input type="range" id="threshold" min="0" max="100" step="1" value="0" />
          <label for="sort">rank by</label>
          <select id="sort">
            ${SORT_KEYS.map((k) => `<option value="${k}">${k.replace("_", " ")}</option>`).join("")}
          </select>
        </aside>
      </div>`;
    const doc = this.root.ownerDocument;
    this.grid = doc.getElementById("grid") as HTMLElement;
    this.thresholdInput = doc.getElementById("threshold") as HTMLInputElement;
    this.thresholdLabel = doc.getElementById("threshold-label") as HTMLElement;
    this.sortSelect = doc.getElementById("sort") as HTMLSelectElement;

    this.thresholdInput.addEventListener("input", () => {
      this.setThreshold(Number(this.thresholdInput.value) / 100);
    });
    this.sortSelect.addEventListener("change", () => {
      void this.setSortKey(this.sortSelect.value as SortKey);
    });

    await this.refetch();
  }

  // Display-only: recolor from loaded frames, no network.
  setThreshold(threshold: number): void {
    this.state.threshold = threshold;
    this.thresholdLabel.textContent = `${Math.round(threshold * 100)}%`;
    this.render();
  }

  // Ranking change: one fetch, then one re-render in response order.
  async setSortKey(sortKey: SortKey): Promise<void> {
    this.state.sortKey = sortKey;
    await this.refetch();
  }

  private async refetch(): Promise<void> {
    const response = await this.api.fetchTimelines(this.state.threshold, this.state.sortKey);
    this.videos = response.videos;
    this.render();
  }

  private render(): void {
    this.renderCount += 1;
    renderGrid(this.grid, this.videos, this.state, {
      onHover: (hovered) => {
        this.state.hovered = hovered;
      },
    });
  }
}

export async function boot(root: HTMLElement, options: AppOptions): Promise<App> {
  const app = new App(root, options);
  await app.mount();
  return app;
}
