import type { ProposalDto, ServiceInfoDto, StateDoc } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
  }
}

// Thin typed client over the service endpoints. The dashboard never
// builds or edits change sets itself; it only submits command text and
// references proposal ids, so the server stays the single authority.
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  getState(): Promise<StateDoc> {
    return this.request<StateDoc>("/state");
  }

  getInfo(): Promise<ServiceInfoDto> {
    return this.request<ServiceInfoDto>("/info");
  }

  submitCommand(text: string): Promise<ProposalDto> {
    return this.request<ProposalDto>("/command", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  getProposals(limit?: number): Promise<ProposalDto[]> {
    const query = limit === undefined ? "" : `?limit=${limit}`;
    return this.request<ProposalDto[]>(`/proposals${query}`);
  }

  approve(id: string): Promise<ProposalDto> {
    return this.request<ProposalDto>(`/proposals/${id}/approve`, { method: "POST" });
  }

  reject(id: string): Promise<ProposalDto> {
    return this.request<ProposalDto>(`/proposals/${id}/reject`, { method: "POST" });
  }
}
