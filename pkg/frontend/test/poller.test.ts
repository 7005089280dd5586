import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { PollUpdate } from "../src/poller.js";
import { StatePoller } from "../src/poller.js";
import type { StateDoc } from "../src/types.js";

const stateA: StateDoc = {
  user: { location: "den" },
  devices: { den: { lights: { lamp: { state: "off" } } } },
};

const stateB: StateDoc = {
  user: { location: "den" },
  devices: { den: { lights: { lamp: { state: "on" } } } },
};

function clientReturning(snapshots: (StateDoc | Error)[]): ApiClient {
  let index = 0;
  const fetchFn = async (): Promise<Response> => {
    const item = snapshots[Math.min(index, snapshots.length - 1)]!;
    index += 1;
    if (item instanceof Error) throw item;
    return new Response(JSON.stringify(item), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return new ApiClient("http://service.test", fetchFn);
}

describe("StatePoller", () => {
  it("reports the first snapshot and then only changes", async () => {
    const updates: PollUpdate[] = [];
    const poller = new StatePoller(clientReturning([stateA, stateA, stateB]), {
      onUpdate: (u) => updates.push(u),
    });
    await poller.tick(); // first load
    await poller.tick(); // identical -> suppressed
    await poller.tick(); // lamp flipped
    expect(updates).toHaveLength(2);
    expect(updates[1]!.changedKeys).toEqual(new Set(["den/lights/lamp"]));
  });

  it("keeps the last snapshot through an outage and flags the connection", async () => {
    const lostFlags: boolean[] = [];
    const poller = new StatePoller(
      clientReturning([stateA, new Error("boom"), stateA]),
      { onUpdate: () => undefined, onConnectionChange: (lost) => lostFlags.push(lost) },
    );
    await poller.tick();
    expect(poller.lastSnapshot).toEqual(stateA);
    await poller.tick(); // outage
    expect(poller.connectionLost).toBe(true);
    expect(poller.lastSnapshot).toEqual(stateA);
    await poller.tick(); // recovery
    expect(poller.connectionLost).toBe(false);
    expect(lostFlags).toEqual([true, false]);
  });

  it("never runs two polls at once", async () => {
    let inFlight = 0;
    let peak = 0;
    const fetchFn = async (): Promise<Response> => {
      inFlight += 1;
      peak = Math.max(peak, inFlight);
      await new Promise((resolve) => setTimeout(resolve, 10));
      inFlight -= 1;
      return new Response(JSON.stringify(stateA), { status: 200 });
    };
    const poller = new StatePoller(new ApiClient("http://service.test", fetchFn), {
      onUpdate: () => undefined,
    });
    await Promise.all([poller.tick(), poller.tick(), poller.tick()]);
    expect(peak).toBe(1);
  });
});
