/** Attempt history with local persistence; entries are immutable once recorded. */

import type { Measurement, PredictedFactors } from "./api.js";

export interface AttemptEntry {
  id: string;
  stylePrompt: string;
  contentPrompt: string;
  measurement: Measurement;
  predictedFactors: PredictedFactors;
  /** Base64 WAV as returned by the service. */
  audio: string;
  timestamp: number;
}

const STORAGE_KEY = "prompttts-history-v1";

export class HistoryStore {
  private entries: AttemptEntry[] = [];

  constructor(private readonly storage: Storage) {
    this.entries = this.read();
  }

  private read(): AttemptEntry[] {
    try {
      const raw = this.storage.getItem(STORAGE_KEY);
      if (!raw) return [];
      const parsed = JSON.parse(raw) as AttemptEntry[];
      return Array.isArray(parsed) ? parsed : [];
    } catch {
      return [];
    }
  }

  private write(): void {
    this.storage.setItem(STORAGE_KEY, JSON.stringify(this.entries));
  }

  /** Entries ordered by time (oldest first). */
  all(): readonly AttemptEntry[] {
    return this.entries;
  }

  get(id: string): AttemptEntry | undefined {
    return this.entries.find((e) => e.id === id);
  }

  add(entry: Omit<AttemptEntry, "id" | "timestamp">, now: number = Date.now()): AttemptEntry {
    const record: AttemptEntry = {
      ...entry,
      id: `attempt-${now}-${this.entries.length}`,
      timestamp: now,
    };
    this.entries = [...this.entries, record];
    this.write();
    return record;
  }

  /** Clearing is explicit; nothing else removes entries. */
  clear(): void {
    this.entries = [];
    this.storage.removeItem(STORAGE_KEY);
  }
}
