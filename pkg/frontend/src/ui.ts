/** DOM wiring for the prompt console. No synthesis logic lives here: the page
 * is a pure client of /synthesize and /health. */

import { ApiError, audioBlob, SynthesisClient, type SynthesizeResponse } from "./api.js";
import { computeDeltas, formatDelta } from "./compare.js";
import { HistoryStore, type AttemptEntry } from "./history.js";

export interface AppOptions {
  client: SynthesisClient;
  history: HistoryStore;
  /** Injectable for tests; jsdom has no URL.createObjectURL. */
  createAudioUrl?: (blob: Blob) => string;
}

interface FactorRow {
  factor: string;
  predicted: string;
  measured: string;
}

export function factorRows(response: SynthesizeResponse): FactorRow[] {
  const m = response.measurement;
  const p = response.predicted_factors;
  const rows: FactorRow[] = [
    { factor: "gender", predicted: p.gender, measured: "—" },
    {
      factor: "pitch",
      predicted: p.pitch,
      measured: m.f0_mean === null ? "unvoiced" : `${m.f0_mean.toFixed(1)} Hz`,
    },
    { factor: "speed", predicted: p.speed, measured: `${m.rate.toFixed(2)} ph/s` },
    { factor: "volume", predicted: p.volume, measured: `rms ${m.rms.toFixed(4)}` },
  ];
  if (p.emotion !== undefined) {
    rows.push({ factor: "emotion", predicted: p.emotion, measured: "—" });
  }
  return rows;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private readonly client: SynthesisClient;
  private readonly history: HistoryStore;
  private readonly createAudioUrl: (blob: Blob) => string;
  private pending = false;

  private styleInput!: HTMLInputElement;
  private contentInput!: HTMLInputElement;
  private submitButton!: HTMLButtonElement;
  private banner!: HTMLElement;
  private resultPanel!: HTMLElement;
  private historyList!: HTMLElement;
  private compareA!: HTMLSelectElement;
  private compareB!: HTMLSelectElement;
  private compareView!: HTMLElement;
  private validation!: HTMLElement;

  constructor(private readonly root: HTMLElement, options: AppOptions) {
    this.client = options.client;
    this.history = options.history;
    this.createAudioUrl =
      options.createAudioUrl ?? ((blob) => URL.createObjectURL(blob));
    this.render();
    for (const entry of this.history.all()) {
      this.appendHistoryItem(entry);
    }
    this.refreshCompareOptions();
  }

  private render(): void {
    const form = el("form", { "data-testid": "prompt-form" });
    this.styleInput = el("input", {
      type: "text",
      placeholder: "Style prompt, e.g. A lady whispers to her friend slowly",
      "data-testid": "style-input",
    });
    this.contentInput = el("input", {
      type: "text",
      placeholder: "Content prompt, e.g. Everything will go fine, right?",
      "data-testid": "content-input",
    });
    this.submitButton = el("button", { type: "submit", "data-testid": "submit-button" },
      "Synthesize");
    this.validation = el("p", { class: "validation", "data-testid": "validation" });
    form.append(this.styleInput, this.contentInput, this.submitButton, this.validation);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    this.banner = el("div", { class: "banner hidden", "data-testid": "error-banner" });
    const dismiss = el("button", { type: "button" }, "dismiss");
    dismiss.addEventListener("click", () => this.banner.classList.add("hidden"));
    this.banner.append(el("span", { "data-testid": "error-text" }), dismiss);

    this.resultPanel = el("section", { "data-testid": "result" });
    this.historyList = el("ol", { "data-testid": "history-list" });
    const clear = el("button", { type: "button", "data-testid": "clear-history" },
      "Clear history");
    clear.addEventListener("click", () => {
      this.history.clear();
      this.historyList.replaceChildren();
      this.refreshCompareOptions();
    });

    this.compareA = el("select", { "data-testid": "compare-a" });
    this.compareB = el("select", { "data-testid": "compare-b" });
    const compareButton = el("button", { type: "button", "data-testid": "compare-button" },
      "Compare");
    compareButton.addEventListener("click", () => this.renderCompare());
    this.compareView = el("section", { "data-testid": "compare-view" });

    this.root.append(
      el("h1", {}, "Prompt console"),
      this.banner,
      form,
      this.resultPanel,
      el("h2", {}, "History"),
      this.historyList,
      clear,
      el("h2", {}, "Compare attempts"),
      this.compareA,
      this.compareB,
      compareButton,
      this.compareView,
    );
  }

  get isPending(): boolean {
    return this.pending;
  }

  async submit(): Promise<void> {
    if (this.pending) return;
    const style = this.styleInput.value.trim();
    const content = this.contentInput.value.trim();
    this.validation.textContent = "";
    if (!style || !content) {
      this.validation.textContent = "Both the style and content prompts are required.";
      return;
    }
    this.pending = true;
    this.submitButton.disabled = true;
    try {
      const response = await this.client.synthesize(style, content);
      const entry = this.history.add({
        stylePrompt: style,
        contentPrompt: content,
        measurement: response.measurement,
        predictedFactors: response.predicted_factors,
        audio: response.audio,
      });
      this.renderResult(response);
      this.appendHistoryItem(entry);
      this.refreshCompareOptions();
      this.banner.classList.add("hidden");
    } catch (error) {
      const message =
        error instanceof ApiError
          ? `Service error (${error.status}): ${error.message}`
          : `Service unreachable: ${String(error)}`;
      this.showError(message);
    } finally {
      this.pending = false;
      this.submitButton.disabled = false;
    }
  }

  private showError(message: string): void {
    const text = this.banner.querySelector('[data-testid="error-text"]');
    if (text) text.textContent = message;
    this.banner.classList.remove("hidden");
  }

  private renderResult(response: SynthesizeResponse): void {
    const audio = el("audio", { controls: "", "data-testid": "audio-player" });
    audio.src = this.createAudioUrl(audioBlob(response));
    const table = el("table", { "data-testid": "factor-table" });
    const head = el("tr");
    head.append(el("th", {}, "factor"), el("th", {}, "predicted"), el("th", {}, "measured"));
    table.append(head);
    for (const row of factorRows(response)) {
      const tr = el("tr", { "data-factor": row.factor });
      tr.append(el("td", {}, row.factor), el("td", {}, row.predicted),
        el("td", {}, row.measured));
      table.append(tr);
    }
    this.resultPanel.replaceChildren(audio, table);
  }

  private appendHistoryItem(entry: AttemptEntry): void {
    const item = el("li", { "data-entry-id": entry.id });
    item.textContent =
      `${new Date(entry.timestamp).toISOString()}  "${entry.stylePrompt}: ` +
      `${entry.contentPrompt}"`;
    this.historyList.append(item);
  }

  private refreshCompareOptions(): void {
    for (const select of [this.compareA, this.compareB]) {
      select.replaceChildren();
      for (const entry of this.history.all()) {
        select.append(el("option", { value: entry.id }, entry.stylePrompt));
      }
    }
  }

  renderCompare(): void {
    const a = this.history.get(this.compareA.value);
    const b = this.history.get(this.compareB.value);
    if (!a || !b) {
      this.compareView.replaceChildren(
        el("p", {}, "Pick two attempts to compare."));
      return;
    }
    const deltas = computeDeltas(a, b);
    const block = el("div");
    for (const [label, entry] of [["A", a], ["B", b]] as const) {
      const m = entry.measurement;
      block.append(el("p", { "data-testid": `compare-${label}` },
        `${label}: "${entry.stylePrompt}" — f0 ${m.f0_mean === null ? "unvoiced" : m.f0_mean.toFixed(1)} Hz, ` +
        `rate ${m.rate.toFixed(2)} ph/s, rms ${m.rms.toFixed(4)}`));
    }
    const deltaLine = el("p", { "data-testid": "compare-deltas" },
      `Δf0 ${formatDelta(deltas.f0, "Hz", 1)}, ` +
      `Δrate ${formatDelta(deltas.rate, "ph/s")}, ` +
      `Δrms ${formatDelta(deltas.rms, "", 4)}`);
    block.append(deltaLine);
    this.compareView.replaceChildren(block);
  }
}

export function mountApp(root: HTMLElement, options: AppOptions): App {
  return new App(root, options);
}
