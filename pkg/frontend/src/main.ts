import { ApiClient, ApiError } from "./api.js";
import { buildProposalCard, buildRoomViews } from "./model.js";
import { StatePoller } from "./poller.js";
import {
  renderConnectionBanner,
  renderDeviceCard,
  renderHistory,
  renderProposalCard,
  renderRooms,
} from "./render.js";
import type { StateDoc } from "./types.js";

const client = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const roomsEl = el<HTMLDivElement>("rooms");
const proposalEl = el<HTMLDivElement>("proposal");
const historyEl = el<HTMLUListElement>("history");
const bannerEl = el<HTMLDivElement>("banner");
const inputEl = el<HTMLInputElement>("command-input");
const submitEl = el<HTMLButtonElement>("command-submit");
const errorEl = el<HTMLDivElement>("command-error");
const modeEl = el<HTMLSpanElement>("mode");

function updateRooms(state: StateDoc, changedKeys: Set<string>): void {
  const rooms = buildRoomViews(state);
  const known = new Set(
    [...roomsEl.querySelectorAll<HTMLElement>("[data-key]")].map((n) => n.dataset.key),
  );
  const structureChanged =
    rooms.flatMap((r) => r.cards).some((c) => !known.has(c.key)) ||
    known.size !== rooms.reduce((n, r) => n + r.cards.length, 0);
  if (!roomsEl.childElementCount || structureChanged) {
    roomsEl.innerHTML = renderRooms(rooms);
    return;
  }
  // Same device set: swap only the cards whose values moved.
  for (const room of rooms) {
    for (const card of room.cards) {
      if (!changedKeys.has(card.key)) continue;
      const node = roomsEl.querySelector<HTMLElement>(
        `[data-key="${CSS.escape(card.key)}"]`,
      );
      if (node) node.outerHTML = renderDeviceCard(card);
    }
  }
}

const poller = new StatePoller(client, {
  onUpdate: ({ state, changedKeys }) => updateRooms(state, changedKeys),
  onConnectionChange: (lost) => {
    bannerEl.innerHTML = renderConnectionBanner(lost);
  },
});

function syncSubmitDisabled(): void {
  submitEl.disabled = inputEl.value.trim().length === 0;
}

async function refreshHistory(): Promise<void> {
  try {
    const proposals = await client.getProposals(20);
    historyEl.innerHTML = renderHistory(proposals.map(buildProposalCard));
  } catch {
    // the connection banner already covers outages
  }
}

function showProposal(cardHtml: string): void {
  proposalEl.innerHTML = cardHtml;
}

async function submitCommand(): Promise<void> {
  const text = inputEl.value.trim();
  if (!text) return;
  submitEl.disabled = true;
  errorEl.textContent = "";
  try {
    const proposal = await client.submitCommand(text);
    showProposal(renderProposalCard(buildProposalCard(proposal)));
    inputEl.value = "";
    await Promise.all([poller.tick(), refreshHistory()]);
  } catch (err) {
    // Keep the input so the user can retry or edit.
    errorEl.textContent = err instanceof ApiError ? err.message : String(err);
  } finally {
    syncSubmitDisabled();
  }
}

async function resolveProposal(id: string, decision: "approve" | "reject"): Promise<void> {
  try {
    const proposal =
      decision === "approve" ? await client.approve(id) : await client.reject(id);
    showProposal(renderProposalCard(buildProposalCard(proposal)));
    await Promise.all([poller.tick(), refreshHistory()]);
  } catch (err) {
    errorEl.textContent = err instanceof ApiError ? err.message : String(err);
  }
}

proposalEl.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const id = target.dataset.id;
  if (!id) return;
  if (target.classList.contains("approve")) void resolveProposal(id, "approve");
  if (target.classList.contains("reject")) void resolveProposal(id, "reject");
});

submitEl.addEventListener("click", () => void submitCommand());
inputEl.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void submitCommand();
});
inputEl.addEventListener("input", syncSubmitDisabled);

async function start(): Promise<void> {
  syncSubmitDisabled();
  try {
    const info = await client.getInfo();
    modeEl.textContent = `${info.mode} mode / ${info.backend_kind} backend`;
  } catch {
    modeEl.textContent = "";
  }
  poller.start();
  await refreshHistory();
}

void start();
