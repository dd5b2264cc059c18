// Polling loop behavior against a scripted fetch.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, JobServiceClient, pollJob } from "../src/api";
import type { JobRecord } from "../src/types";

const BASE = "http://test.host:1234";

function record(status: JobRecord["status"]): JobRecord {
  return {
    job_id: "abc123",
    status,
    document_hash: "d" .repeat(64),
    name: "t",
    submitted_at: 0,
    started_at: null,
    finished_at: null,
    seeds: [],
    error: status === "failed" ? "boom" : null,
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("pollJob", () => {
  it("polls until a terminal status and reports updates", async () => {
    const sequence = ["queued", "running", "running", "succeeded"] as const;
    let call = 0;
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, record(sequence[call++]))));

    const seen: string[] = [];
    const result = await pollJob(new JobServiceClient(BASE), "abc123", {
      intervalMs: 1,
      onUpdate: (r) => seen.push(r.status),
      sleep: async () => {},
    });
    expect(result.status).toBe("succeeded");
    expect(seen).toEqual(["queued", "running", "running", "succeeded"]);
  });

  it("backs off while the server is unreachable and then recovers", async () => {
    let call = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        call += 1;
        if (call <= 3) throw new TypeError("fetch failed");
        return jsonResponse(200, record("succeeded"));
      }),
    );
    const delays: number[] = [];
    const retries: unknown[] = [];
    const result = await pollJob(new JobServiceClient(BASE), "abc123", {
      intervalMs: 100,
      maxIntervalMs: 250,
      onRetry: (e) => retries.push(e),
      sleep: async (ms) => void delays.push(ms),
    });
    expect(result.status).toBe("succeeded");
    expect(retries).toHaveLength(3);
    expect(delays).toEqual([100, 200, 250]);
  });

  it("gives up immediately on 404", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(404, { code: "E_NOT_FOUND", message: "no job", details: [] })),
    );
    await expect(
      pollJob(new JobServiceClient(BASE), "missing", { sleep: async () => {} }),
    ).rejects.toThrowError(ApiError);
  });
});

describe("JobServiceClient", () => {
  it("surfaces 422 envelopes with details", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse(422, {
          code: "E_VALIDATION",
          message: "document failed validation",
          details: [{ code: "E_ROLE_UNKNOWN", path: "/protocol_groups/0", message: "unknown" }],
        }),
      ),
    );
    const client = new JobServiceClient(BASE);
    try {
      await client.submit(new TextEncoder().encode("{}"));
      expect.unreachable();
    } catch (error) {
      const apiError = error as ApiError;
      expect(apiError.status).toBe(422);
      expect(apiError.envelope.details[0].code).toBe("E_ROLE_UNKNOWN");
    }
  });

  it("builds versioned urls", () => {
    const client = new JobServiceClient("http://h:1/");
    expect(client.downloadUrl("xyz")).toBe("http://h:1/api/v1/experiments/xyz/download");
  });
});
