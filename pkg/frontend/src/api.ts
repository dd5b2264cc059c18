// Typed client for the job service, plus polling with backoff.

import type {
  ApiErrorEnvelope,
  ExperimentEntry,
  HealthInfo,
  JobRecord,
  RoleSchema,
  RunReport,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly envelope: ApiErrorEnvelope,
  ) {
    super(envelope.message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = await resp.text();
  let parsed: unknown = null;
  try {
    parsed = body ? JSON.parse(body) : null;
  } catch {
    parsed = null;
  }
  if (!resp.ok) {
    const envelope = (parsed as ApiErrorEnvelope) ?? {
      code: "E_HTTP",
      message: `${resp.status} ${resp.statusText}`,
      details: [],
    };
    throw new ApiError(resp.status, envelope);
  }
  return parsed as T;
}

export class JobServiceClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}/api/v1${path}`;
  }

  health(): Promise<HealthInfo> {
    return request<HealthInfo>(this.url("/health"));
  }

  roles(): Promise<{ roles: RoleSchema[] }> {
    return request<{ roles: RoleSchema[] }>(this.url("/roles"));
  }

  submit(documentBytes: Uint8Array): Promise<{ job_id: string }> {
    return request<{ job_id: string }>(this.url("/simulations"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: documentBytes as unknown as BodyInit,
    });
  }

  job(jobId: string): Promise<JobRecord> {
    return request<JobRecord>(this.url(`/jobs/${jobId}`));
  }

  results(jobId: string): Promise<RunReport> {
    return request<RunReport>(this.url(`/jobs/${jobId}/results`));
  }

  experiments(limit = 50, offset = 0): Promise<{ total: number; experiments: ExperimentEntry[] }> {
    return request(this.url(`/experiments?limit=${limit}&offset=${offset}`));
  }

  downloadUrl(experimentId: string): string {
    return this.url(`/experiments/${experimentId}/download`);
  }
}

export interface PollOptions {
  intervalMs?: number; // base interval (default 1000)
  maxIntervalMs?: number; // backoff ceiling (default 10000)
  onUpdate?: (record: JobRecord) => void;
  onRetry?: (error: unknown) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

// Poll 1 s at a time; unreachable servers back the interval off exponentially
// (capped) and polling resumes where it left off once the server answers.
export async function pollJob(
  client: JobServiceClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobRecord> {
  const base = options.intervalMs ?? 1000;
  const ceiling = options.maxIntervalMs ?? 10_000;
  const sleep = options.sleep ?? defaultSleep;
  let interval = base;
  for (;;) {
    let record: JobRecord;
    try {
      record = await client.job(jobId);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) throw error;
      options.onRetry?.(error);
      await sleep(interval);
      interval = Math.min(interval * 2, ceiling);
      continue;
    }
    interval = base;
    options.onUpdate?.(record);
    if (record.status === "succeeded" || record.status === "failed") {
      return record;
    }
    await sleep(interval);
  }
}
