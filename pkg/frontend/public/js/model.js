export function formatValue(value) {
    if (value === null)
        return "(unset)";
    return String(value);
}
export function deviceKey(room, deviceType, name) {
    return `${room}/${deviceType}/${name}`;
}
export function buildRoomViews(state) {
    const rooms = [];
    for (const [roomName, types] of Object.entries(state.devices)) {
        const cards = [];
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
function changeRow(change) {
    return {
        path: `${change.room}.${change.device_type}.${change.device}`,
        property: change.property,
        oldText: formatValue(change.old),
        newText: formatValue(change.new),
    };
}
export function buildProposalCard(proposal) {
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
export function changedCardKeys(previous, next) {
    const changed = new Set();
    const prevCards = new Map();
    if (previous) {
        for (const room of buildRoomViews(previous)) {
            for (const card of room.cards)
                prevCards.set(card.key, JSON.stringify(card));
        }
    }
    const nextKeys = new Set();
    for (const room of buildRoomViews(next)) {
        for (const card of room.cards) {
            nextKeys.add(card.key);
            if (prevCards.get(card.key) !== JSON.stringify(card))
                changed.add(card.key);
        }
    }
    for (const key of prevCards.keys()) {
        if (!nextKeys.has(key))
            changed.add(key); // removed devices force a render
    }
    return changed;
}
