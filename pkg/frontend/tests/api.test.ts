import { describe, expect, it } from "vitest";

import { TuneApi } from "../src/api.js";

function fakeFetch(payload: unknown, status = 200) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => payload,
    } as Response;
  };
  return { fn, calls };
}

describe("TuneApi", () => {
  it("builds the profile query and returns the payload untouched", async () => {
    const payload = { rows: [{ x: 0, f_decay: 0.0576, f_mag: 1 }], ranges: {} };
    const { fn, calls } = fakeFetch(payload);
    const api = new TuneApi("http://h:1", fn);
    const got = await api.getProfile(3, 2, 11);
    expect(calls[0].url).toBe("http://h:1/profile?A=3&B=2&samples=11");
    expect(got).toEqual(payload);
  });

  it("posts params as JSON", async () => {
    const { fn, calls } = fakeFetch({ ok: true, params: {} });
    const api = new TuneApi("http://h:1", fn);
    await api.setParams("abc", { amplitude_A: 4.5 });
    expect(calls[0].url).toBe("http://h:1/session/abc/params");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ amplitude_A: 4.5 });
  });

  it("raises on HTTP errors", async () => {
    const { fn } = fakeFetch({ detail: "stale session id" }, 404);
    const api = new TuneApi("http://h:1", fn);
    await expect(api.setParams("gone", {})).rejects.toThrow("HTTP 404");
  });

  it("derives the websocket URL from the base", () => {
    const api = new TuneApi("http://127.0.0.1:8787");
    expect(api.streamUrl("xyz")).toBe("ws://127.0.0.1:8787/session/xyz/stream");
  });
});
