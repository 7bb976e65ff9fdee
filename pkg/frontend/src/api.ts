import type { ForceParams, ProfileResponse, Scene, SessionInfo } from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class TuneApi {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) throw new Error(`${path}: HTTP ${resp.status}`);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw new Error(`${path}: HTTP ${resp.status}`);
    return (await resp.json()) as T;
  }

  getProfile(A: number, B: number, samples = 101): Promise<ProfileResponse> {
    return this.getJson(`/profile?A=${A}&B=${B}&samples=${samples}`);
  }

  getScene(): Promise<Scene> {
    return this.getJson("/scene");
  }

  createSession(params?: Partial<ForceParams>): Promise<SessionInfo> {
    return this.postJson("/session", params ? { params } : {});
  }

  setParams(
    id: string,
    params: Partial<ForceParams>,
  ): Promise<{ ok: boolean; params: ForceParams }> {
    return this.postJson(`/session/${id}/params`, params);
  }

  streamUrl(id: string): string {
    return this.base.replace(/^http/, "ws") + `/session/${id}/stream`;
  }
}
