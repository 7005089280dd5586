// Wire types for the controller service endpoints.

export type PropertyValue = string | number | boolean;

export type DeviceProps = Record<string, PropertyValue>;

export type StateDoc = {
  user: Record<string, PropertyValue>;
  devices: Record<string, Record<string, Record<string, DeviceProps>>>;
};

export type ChangeDto = {
  room: string;
  device_type: string;
  device: string;
  property: string;
  old: PropertyValue | null;
  new: PropertyValue;
};

export type DroppedDto = {
  path: string;
  kind: string;
};

export type ProposalDto = {
  id: string;
  command: string;
  changeset: { changes: ChangeDto[]; dropped: DroppedDto[] };
  latency: number;
  status: string;
  created_at: string;
  error: string | null;
};

export type ServiceInfoDto = {
  mode: string;
  backend_kind: string;
  proposals: number;
  events: number;
};
