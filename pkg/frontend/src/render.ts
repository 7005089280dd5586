import type { DeviceCard, ProposalCard, RoomView } from "./model.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderDeviceCard(card: DeviceCard): string {
  const badges = card.badges
    .map((badge) => {
      const cls =
        badge.on === null ? "badge" : badge.on ? "badge badge-on" : "badge badge-off";
      return `<span class="${cls}">${escapeHtml(badge.property)}: ${escapeHtml(badge.value)}</span>`;
    })
    .join(" ");
  return `
    <article class="device-card" data-key="${escapeHtml(card.key)}">
      <header>
        <h3>${escapeHtml(card.name)}</h3>
        <span class="device-type">${escapeHtml(card.deviceType)}</span>
      </header>
      <div class="badges">${badges}</div>
    </article>`;
}

export function renderRooms(rooms: RoomView[]): string {
  return rooms
    .map(
      (room) => `
    <section class="room" data-room="${escapeHtml(room.name)}">
      <h2>${escapeHtml(room.name)}</h2>
      <div class="cards">${room.cards.map(renderDeviceCard).join("")}</div>
    </section>`,
    )
    .join("");
}

export function renderProposalCard(card: ProposalCard): string {
  const changes = card.changes
    .map(
      (row) => `
        <li class="change-row">
          <code>${escapeHtml(row.path)}.${escapeHtml(row.property)}</code>
          <span class="old">${escapeHtml(row.oldText)}</span>
          <span class="arrow">&rarr;</span>
          <span class="new">${escapeHtml(row.newText)}</span>
        </li>`,
    )
    .join("");
  // Rejected fields stay visible on the card: failures are surfaced, not hidden.
  const dropped = card.dropped
    .map(
      (d) => `
        <li class="dropped-row">
          <span class="violation-badge">${escapeHtml(d.kind)}</span>
          <code>${escapeHtml(d.path)}</code>
        </li>`,
    )
    .join("");
  const body = card.noChanges
    ? `<p class="no-changes">no changes proposed</p>`
    : `<ul class="changes">${changes}</ul>`;
  const droppedBlock = card.dropped.length
    ? `<div class="dropped"><h4>rejected by validation</h4><ul>${dropped}</ul></div>`
    : "";
  const actions = card.pending
    ? `<div class="actions">
         <button class="approve" data-id="${escapeHtml(card.id)}">Approve</button>
         <button class="reject" data-id="${escapeHtml(card.id)}">Reject</button>
       </div>`
    : "";
  const errorBlock = card.error
    ? `<p class="proposal-error">${escapeHtml(card.error)}</p>`
    : "";
  return `
    <article class="proposal-card status-${escapeHtml(card.status)}" data-proposal="${escapeHtml(card.id)}">
      <header>
        <span class="proposal-id">${escapeHtml(card.id)}</span>
        <span class="status">${escapeHtml(card.status)}</span>
        <span class="latency">${escapeHtml(card.latencyText)}</span>
      </header>
      <p class="command">&ldquo;${escapeHtml(card.command)}&rdquo;</p>
      ${body}${droppedBlock}${errorBlock}${actions}
    </article>`;
}

export function renderHistory(cards: ProposalCard[]): string {
  if (!cards.length) return `<p class="empty">no proposals yet</p>`;
  return cards
    .map(
      (card) => `
    <li class="history-row status-${escapeHtml(card.status)}">
      <span class="proposal-id">${escapeHtml(card.id)}</span>
      <span class="command">${escapeHtml(card.command)}</span>
      <span class="status">${escapeHtml(card.status)}</span>
      <span class="latency">${escapeHtml(card.latencyText)}</span>
    </li>`,
    )
    .join("");
}

export function renderConnectionBanner(lost: boolean): string {
  return lost
    ? `<div class="banner banner-error">connection lost &mdash; showing last known state</div>`
    : "";
}
