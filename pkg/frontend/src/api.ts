import type { ItemView, Progress, Verdict, VerdictAck } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

/** Thin typed client over the annotation service HTTP API. */
export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      const body = await response.text().catch(() => "");
      throw new ApiError(`${path} answered ${response.status}: ${body}`, response.status);
    }
    return (await response.json()) as T;
  }

  nextItem(annotator: string): Promise<ItemView> {
    return this.request<ItemView>(`/api/next?annotator=${encodeURIComponent(annotator)}`);
  }

  submitVerdict(itemId: number, verdict: Verdict, annotator: string): Promise<VerdictAck> {
    return this.request<VerdictAck>("/api/verdict", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ item_id: itemId, verdict, annotator }),
    });
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/api/progress");
  }
}
