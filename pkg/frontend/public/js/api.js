export class ApiError extends Error {
    constructor(message, status = null) {
        super(message);
        this.status = status;
    }
}
// Thin typed client over the service endpoints. The dashboard never
// builds or edits change sets itself; it only submits command text and
// references proposal ids, so the server stays the single authority.
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchFn(this.baseUrl + path, init);
        }
        catch (err) {
            throw new ApiError(`service unreachable: ${String(err)}`);
        }
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const body = (await response.json());
                if (body.detail)
                    detail = body.detail;
            }
            catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(detail, response.status);
        }
        return (await response.json());
    }
    getState() {
        return this.request("/state");
    }
    getInfo() {
        return this.request("/info");
    }
    submitCommand(text) {
        return this.request("/command", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ text }),
        });
    }
    getProposals(limit) {
        const query = limit === undefined ? "" : `?limit=${limit}`;
        return this.request(`/proposals${query}`);
    }
    approve(id) {
        return this.request(`/proposals/${id}/approve`, { method: "POST" });
    }
    reject(id) {
        return this.request(`/proposals/${id}/reject`, { method: "POST" });
    }
}
