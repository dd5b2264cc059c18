// End-to-end against a real job service: the document built in the editor
// runs to a succeeded experiment whose artifact is downloadable, and the
// server's canonical bytes agree with ours exactly.

import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { JobServiceClient, pollJob } from "../src/api";
import { canonicalText } from "../src/canonical";
import { toDocument } from "../src/state";
import { buildTwoNodeDemo } from "./document.test";

const PORT = 18_000 + Math.floor(Math.random() * 10_000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "qndk-ui-test-"));
  server = spawn(
    "python3",
    ["-m", "qndk.cli", "serve", "--port", String(PORT), "--data-dir", dataDir, "--workers", "2"],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  const client = new JobServiceClient(BASE);
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await client.health();
      return;
    } catch {
      if (Date.now() > deadline) throw new Error("job service did not come up");
      await new Promise((r) => setTimeout(r, 200));
    }
  }
});

afterAll(() => {
  server?.kill();
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

describe("editor against a live job service", () => {
  it("runs the golden-path document to a succeeded, downloadable experiment", async () => {
    const client = new JobServiceClient(BASE);

    const { roles } = await client.roles();
    expect(roles.map((r) => r.name)).toContain("bb84_sender");

    const state = buildTwoNodeDemo();
    const document = toDocument(state);
    const bytes = new TextEncoder().encode(canonicalText(document));

    const { job_id } = await client.submit(bytes);
    const final = await pollJob(client, job_id, { intervalMs: 200 });
    expect(final.status).toBe("succeeded");

    const report = await client.results(job_id);
    expect(report.runs[0].results).toHaveLength(4);
    for (const result of report.runs[0].results) {
      expect(result.status).toBe("completed");
    }
    const sender = report.runs[0].results.find((r) => r.role === "bb84_sender")!;
    expect(sender.metrics.qber_estimate).toBe(0);

    const { experiments } = await client.experiments();
    expect(experiments.some((e) => e.experiment_id === job_id && e.status === "succeeded")).toBe(true);

    // the downloadable artifact exists and carries a digest header
    const download = await fetch(client.downloadUrl(job_id));
    expect(download.status).toBe(200);
    expect(download.headers.get("content-digest")).toMatch(/^sha-256=:/);
    const bundle = new Uint8Array(await download.arrayBuffer());
    expect(bundle.length).toBeGreaterThan(0);

    // cross-language canonical agreement: the stored document hash equals
    // the SHA-256 of the exact bytes this editor produced
    const record = await client.job(job_id);
    const ourHash = Buffer.from(
      await crypto.subtle.digest("SHA-256", bytes as BufferSource),
    ).toString("hex");
    expect(record.document_hash).toBe(ourHash);
  }, 120_000);

  it("surfaces validation failures as a 422 envelope", async () => {
    const client = new JobServiceClient(BASE);
    const state = buildTwoNodeDemo();
    state.groups[0].stages[0][0].role = "bb85_sender";
    const bytes = new TextEncoder().encode(canonicalText(toDocument(state)));
    await expect(client.submit(bytes)).rejects.toMatchObject({
      status: 422,
      envelope: { code: "E_VALIDATION" },
    });
  });
});
