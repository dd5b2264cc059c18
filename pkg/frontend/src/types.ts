// Shared shapes for simulation documents and the job-service API.

export interface NodeParams {
  id: string;
  label?: string;
  memory_slots?: number;
  t1?: number;
  t2?: number;
  source_fidelity?: number;
  emission_frequency?: number;
}

export interface ConnectionParams {
  id: string;
  endpoint_a: string;
  endpoint_b: string;
  length_km?: number;
  attenuation_db_per_km?: number;
  noise_depolarizing_p?: number;
  classical_latency?: number | "auto";
}

export interface RoleBinding {
  node: string;
  role: string;
  params: Record<string, number>;
}

export interface ProtocolGroup {
  name: string;
  stages: RoleBinding[][];
}

export interface RunConfig {
  seed: number;
  runs?: number;
  max_sim_time?: number | null;
}

export interface SimulationDocument {
  schema_version: "1";
  name: string;
  engine: string;
  topology: { nodes: NodeParams[]; connections: ConnectionParams[] };
  protocol_groups: ProtocolGroup[];
  run_config: RunConfig;
  extensions?: Record<string, unknown>;
}

// -- job service ------------------------------------------------------------

export interface ParamSchema {
  name: string;
  type: "int" | "float";
  default: number;
  minimum?: number;
  maximum?: number;
}

export interface RoleSchema {
  name: string;
  params: ParamSchema[];
}

export interface JobRecord {
  job_id: string;
  status: "queued" | "running" | "succeeded" | "failed";
  document_hash: string;
  name: string;
  submitted_at: number;
  started_at: number | null;
  finished_at: number | null;
  seeds: number[];
  error: string | null;
}

export interface RoleResult {
  instance_id: string;
  node: string;
  role: string;
  status: "completed" | "aborted" | "failed";
  metrics: Record<string, number>;
  outputs: Record<string, unknown>;
  error: string | null;
  started_at: number;
  finished_at: number;
}

export interface RunReport {
  report_version: string;
  name: string;
  engine: string;
  plan_hash: string;
  seeds: number[];
  runs: { seed: number; sim_time_end: number; results: RoleResult[] }[];
  wall_clock?: { started_at_unix: number; duration_s: number };
}

export interface ExperimentEntry {
  experiment_id: string;
  name: string;
  status: string;
  submitted_at: number;
  finished_at: number | null;
  document_hash: string;
  seeds: number[];
  error: string | null;
}

export interface ValidationIssue {
  code: string;
  path: string;
  message: string;
}

export interface ApiErrorEnvelope {
  code: string;
  message: string;
  details: ValidationIssue[];
}

export interface HealthInfo {
  status: string;
  version: string;
  queue_depth: number;
}
