import { changedCardKeys } from "./model.js";
export const DEFAULT_POLL_INTERVAL_MS = 2000;
// Polls GET /state; reports which device cards changed so the view layer
// re-renders only those. Keeps the last snapshot through outages and
// never runs two polls concurrently.
export class StatePoller {
    constructor(client, options) {
        this.client = client;
        this.options = options;
        this.timer = null;
        this.inFlight = false;
        this.lost = false;
        this.snapshot = null;
    }
    get lastSnapshot() {
        return this.snapshot;
    }
    get connectionLost() {
        return this.lost;
    }
    async tick() {
        if (this.inFlight)
            return;
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
        }
        catch {
            this.setLost(true); // keep the previous snapshot
        }
        finally {
            this.inFlight = false;
        }
    }
    start() {
        if (this.timer !== null)
            return;
        void this.tick();
        this.timer = setInterval(() => void this.tick(), this.options.intervalMs ?? DEFAULT_POLL_INTERVAL_MS);
    }
    stop() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
    setLost(lost) {
        if (lost !== this.lost) {
            this.lost = lost;
            this.options.onConnectionChange?.(lost);
        }
    }
}
