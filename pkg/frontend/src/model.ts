import type { ChangeDto, ProposalDto, PropertyValue, StateDoc } from "./types.js";

// View models derive entirely from server responses; device values are
// never mutated on the client.

export type DeviceCard = {
  key: string; // room/type/device, stable across renders
  room: string;
  deviceType: string;
  name: string;
  badges: { property: string; value: string; on: boolean | null }[];
};

export type RoomView = {
  name: string;
  cards: DeviceCard[];
};

export type ChangeRow = {
  path: string;
  property: string;
  oldText: string;
  newText: string;
};

export type ProposalCard = {
  id: string;
  command: string;
  status: string;
  latencyText: string;
  changes: ChangeRow[];
  dropped: { path: string; kind: string }[];
  error: string | null;
  pending: boolean;
  noChanges: boolean;
};

export function formatValue(value: PropertyValue | null): string {
  if (value === null) return "(unset)";
  return String(value);
}

export function deviceKey(room: string, deviceType: string, name: string): string {
  return `${room}/${deviceType}/${name}`;
}

export function buildRoomViews(state: StateDoc): RoomView[] {
  const rooms: RoomView[] = [];
  for (const [roomName, types] of Object.entries(state.devices)) {
    const cards: DeviceCard[] = [];
    for (const [typeName, devices] of Object.entries(types)) {
      for (const [deviceName, props] of Object.entries(devices)) {
        cards.push({
          key: deviceKey(roomName, typeName, deviceName),
          room: roomName,
          deviceType: typeName,
          name: deviceName,
          badges: Object.entries(props).map(([property, value]) => ({
            property,
            value: formatValue(value),
            on: property === "state" ? value === "on" : null,
          })),
        });
      }
    }
    rooms.push({ name: roomName, cards });
  }
  return rooms;
}

function changeRow(change: ChangeDto): ChangeRow {
  return {
    path: `${change.room}.${change.device_type}.${change.device}`,
    property: change.property,
    oldText: formatValue(change.old),
    newText: formatValue(change.new),
  };
}

export function buildProposalCard(proposal: ProposalDto): ProposalCard {
  return {
    id: proposal.id,
    command: proposal.command,
    status: proposal.status,
    latencyText: `${proposal.latency.toFixed(2)}s`,
    changes: proposal.changeset.changes.map(changeRow),
    dropped: proposal.changeset.dropped.map((d) => ({ path: d.path, kind: d.kind })),
    error: proposal.error,
    pending: proposal.status === "pending",
    noChanges: proposal.changeset.changes.length === 0,
  };
}

// Cards whose rendered content differs between two states; used to
// re-render only what changed on each poll.
export function changedCardKeys(previous: StateDoc | null, next: StateDoc): Set<string> {
  const changed = new Set<string>();
  const prevCards = new Map<string, string>();
  if (previous) {
    for (const room of buildRoomViews(previous)) {
      for (const card of room.cards) prevCards.set(card.key, JSON.stringify(card));
    }
  }
  const nextKeys = new Set<string>();
  for (const room of buildRoomViews(next)) {
    for (const card of room.cards) {
      nextKeys.add(card.key);
      if (prevCards.get(card.key) !== JSON.stringify(card)) changed.add(card.key);
    }
  }
  for (const key of prevCards.keys()) {
    if (!nextKeys.has(key)) changed.add(key); // removed devices force a render
  }
  return changed;
}
