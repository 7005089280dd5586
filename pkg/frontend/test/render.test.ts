import { describe, expect, it } from "vitest";

import type { ProposalCard } from "../src/model.js";
import {
  escapeHtml,
  renderConnectionBanner,
  renderDeviceCard,
  renderHistory,
  renderProposalCard,
} from "../src/render.js";

const card: ProposalCard = {
  id: "p-0002",
  command: "get ready for a party",
  status: "pending",
  latencyText: "0.01s",
  changes: [
    {
      path: "living_room.lights.hue_group_1",
      property: "effect",
      oldText: "none",
      newText: "colorloop",
    },
  ],
  dropped: [{ path: "living_room.plugs.stereo_plug.genre", kind: "InventedField" }],
  error: null,
  pending: true,
  noChanges: false,
};

describe("escapeHtml", () => {
  it("neutralizes markup in untrusted text", () => {
    expect(escapeHtml(`<img src=x onerror="pwn()">&'`)).toBe(
      "&lt;img src=x onerror=&quot;pwn()&quot;&gt;&amp;&#39;",
    );
  });
});

describe("renderDeviceCard", () => {
  it("shows name, type, and one badge per property", () => {
    const html = renderDeviceCard({
      key: "living_room/lights/hue_group_1",
      room: "living_room",
      deviceType: "lights",
      name: "hue_group_1",
      badges: [
        { property: "state", value: "on", on: true },
        { property: "effect", value: "colorloop", on: null },
      ],
    });
    expect(html).toContain("hue_group_1");
    expect(html).toContain("badge badge-on");
    expect(html).toContain("effect: colorloop");
  });

  it("escapes device names", () => {
    const html = renderDeviceCard({
      key: "a/b/<script>",
      room: "a",
      deviceType: "b",
      name: "<script>alert(1)</script>",
      badges: [],
    });
    expect(html).not.toContain("<script>alert");
  });
});

describe("renderProposalCard", () => {
  it("shows old -> new rows and violation badges", () => {
    const html = renderProposalCard(card);
    expect(html).toContain("colorloop");
    expect(html).toContain('class="old"');
    expect(html).toContain('class="new"');
    expect(html).toContain("violation-badge");
    expect(html).toContain("InventedField");
    expect(html).toContain("living_room.plugs.stereo_plug.genre");
  });

  it("offers approve and reject only while pending", () => {
    const pendingHtml = renderProposalCard(card);
    expect(pendingHtml).toContain('class="approve"');
    expect(pendingHtml).toContain('data-id="p-0002"');
    const resolved = renderProposalCard({ ...card, pending: false, status: "applied" });
    expect(resolved).not.toContain('class="approve"');
  });

  it("labels empty change sets", () => {
    const html = renderProposalCard({ ...card, changes: [], dropped: [], noChanges: true });
    expect(html).toContain("no changes proposed");
  });

  it("surfaces proposal errors", () => {
    const html = renderProposalCard({ ...card, error: "TransportError: bridge down" });
    expect(html).toContain("TransportError: bridge down");
  });
});

describe("renderHistory", () => {
  it("lists proposals with status and latency", () => {
    const html = renderHistory([card, { ...card, id: "p-0001", status: "applied" }]);
    expect(html).toContain("p-0002");
    expect(html).toContain("p-0001");
    expect(html).toContain("0.01s");
  });

  it("has an empty placeholder", () => {
    expect(renderHistory([])).toContain("no proposals yet");
  });
});

describe("renderConnectionBanner", () => {
  it("only renders when the connection is lost", () => {
    expect(renderConnectionBanner(true)).toContain("connection lost");
    expect(renderConnectionBanner(false)).toBe("");
  });
});
