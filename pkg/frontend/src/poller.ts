import type { ApiClient } from "./api.js";
import type { StateDoc } from "./types.js";
import { changedCardKeys } from "./model.js";

export type PollUpdate = {
  state: StateDoc;
  changedKeys: Set<string>;
};

export type PollerOptions = {
  intervalMs?: number;
  onUpdate: (update: PollUpdate) => void;
  onConnectionChange?: (lost: boolean) => void;
};

export const DEFAULT_POLL_INTERVAL_MS = 2000;

// Polls GET /state; reports which device cards changed so the view layer
// re-renders only those. Keeps the last snapshot through outages and
// never runs two polls concurrently.
export class StatePoller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;
  private lost = false;
  private snapshot: StateDoc | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly options: PollerOptions,
  ) {}

  get lastSnapshot(): StateDoc | null {
    return this.snapshot;
  }

  get connectionLost(): boolean {
    return this.lost;
  }

  async tick(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const state = await this.client.getState();
      this.setLost(false);
      const changedKeys = changedCardKeys(this.snapshot, state);
      const firstLoad = this.snapshot === null;
      this.snapshot = state;
      if (firstLoad || changedKeys.size > 0) {
        this.options.onUpdate({ state, changedKeys });
      }
    } catch {
      this.setLost(true); // keep the previous snapshot
    } finally {
      this.inFlight = false;
    }
  }

  start(): void {
    if (this.timer !== null) return;
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.options.intervalMs ?? DEFAULT_POLL_INTERVAL_MS);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private setLost(lost: boolean): void {
    if (lost !== this.lost) {
      this.lost = lost;
      this.options.onConnectionChange?.(lost);
    }
  }
}
