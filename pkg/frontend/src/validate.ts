// Inline field validation mirroring the server's error codes. The server
// stays authoritative; this exists so mistakes surface while typing and the
// Run button can be held back without a round trip.

import type { EditorState } from "./state";
import type { RoleSchema, ValidationIssue } from "./types";

export function validateDraft(state: EditorState, roles: RoleSchema[]): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  const add = (code: string, path: string, message: string) =>
    issues.push({ code, path, message });

  const seenNodes = new Set<string>();
  state.nodes.forEach((node, i) => {
    const path = `/topology/nodes/${i}`;
    if (!node.id) add("E_STRUCTURE", `${path}/id`, "node id is required");
    if (seenNodes.has(node.id)) add("E_DUPLICATE_ID", `${path}/id`, `duplicate node id ${node.id}`);
    seenNodes.add(node.id);
    if (node.memory_slots !== undefined && (node.memory_slots < 0 || !Number.isInteger(node.memory_slots))) {
      add("E_NODE_PARAM", `${path}/memory_slots`, "memory slots must be a whole number ≥ 0");
    }
    if (node.t1 !== undefined && node.t1 <= 0) {
      add("E_NODE_PARAM", `${path}/t1`, "T1 must be positive");
    }
    if (node.t2 !== undefined && node.t2 <= 0) {
      add("E_NODE_PARAM", `${path}/t2`, "T2 must be positive");
    }
    const t1 = node.t1 ?? 1.0;
    const t2 = node.t2 ?? 1.0;
    if (t1 > 0 && t2 > 2 * t1) {
      add("E_NODE_PARAM", `${path}/t2`, `T2 (${t2}) cannot exceed 2·T1 (${2 * t1})`);
    }
    if (node.source_fidelity !== undefined && (node.source_fidelity <= 0.5 || node.source_fidelity > 1)) {
      add("E_NODE_PARAM", `${path}/source_fidelity`, "fidelity must lie in (0.5, 1]");
    }
    if (node.emission_frequency !== undefined && node.emission_frequency <= 0) {
      add("E_NODE_PARAM", `${path}/emission_frequency`, "emission frequency must be positive");
    }
  });

  const seenConns = new Set<string>();
  state.connections.forEach((conn, i) => {
    const path = `/topology/connections/${i}`;
    if (seenConns.has(conn.id)) add("E_DUPLICATE_ID", `${path}/id`, `duplicate connection id ${conn.id}`);
    seenConns.add(conn.id);
    if (!seenNodes.has(conn.endpoint_a)) {
      add("E_TOPOLOGY", `${path}/endpoint_a`, `${conn.endpoint_a} is not a node`);
    }
    if (!seenNodes.has(conn.endpoint_b)) {
      add("E_TOPOLOGY", `${path}/endpoint_b`, `${conn.endpoint_b} is not a node`);
    }
    if (conn.endpoint_a === conn.endpoint_b) {
      add("E_TOPOLOGY", `${path}/endpoint_b`, "endpoints must be distinct");
    }
    if (conn.length_km !== undefined && conn.length_km < 0) {
      add("E_CONNECTION_PARAM", `${path}/length_km`, "fiber length cannot be negative");
    }
    if (conn.attenuation_db_per_km !== undefined && conn.attenuation_db_per_km < 0) {
      add("E_CONNECTION_PARAM", `${path}/attenuation_db_per_km`, "attenuation cannot be negative");
    }
    if (
      conn.noise_depolarizing_p !== undefined &&
      (conn.noise_depolarizing_p < 0 || conn.noise_depolarizing_p > 1)
    ) {
      add("E_CONNECTION_PARAM", `${path}/noise_depolarizing_p`, "noise level must lie in [0, 1]");
    }
    if (
      conn.classical_latency !== undefined &&
      conn.classical_latency !== "auto" &&
      (typeof conn.classical_latency !== "number" || conn.classical_latency < 0)
    ) {
      add("E_CONNECTION_PARAM", `${path}/classical_latency`, 'latency must be ≥ 0 or "auto"');
    }
  });

  const schemas = new Map(roles.map((r) => [r.name, r]));
  state.groups.forEach((group, gi) => {
    group.stages.forEach((stage, si) => {
      stage.forEach((binding, bi) => {
        const path = `/protocol_groups/${gi}/stages/${si}/${bi}`;
        if (!seenNodes.has(binding.node)) {
          add("E_ROLE_NODE", `${path}/node`, `${binding.node} is not a node`);
        }
        const schema = schemas.get(binding.role);
        if (roles.length > 0 && !schema) {
          add("E_ROLE_UNKNOWN", `${path}/role`, `unknown role ${binding.role}`);
          return;
        }
        if (!schema) return;
        const byName = new Map(schema.params.map((p) => [p.name, p]));
        for (const [name, value] of Object.entries(binding.params ?? {})) {
          const spec = byName.get(name);
          if (!spec) {
            add("E_ROLE_PARAM", `${path}/params/${name}`, `${binding.role} has no parameter ${name}`);
            continue;
          }
          if (spec.type === "int" && !Number.isInteger(value)) {
            add("E_ROLE_PARAM", `${path}/params/${name}`, `${name} must be an integer`);
          }
          if (spec.minimum !== undefined && value < spec.minimum) {
            add("E_ROLE_PARAM", `${path}/params/${name}`, `${name} must be ≥ ${spec.minimum}`);
          }
          if (spec.maximum !== undefined && value > spec.maximum) {
            add("E_ROLE_PARAM", `${path}/params/${name}`, `${name} must be ≤ ${spec.maximum}`);
          }
        }
      });
    });
  });

  const rc = state.runConfig;
  if (!Number.isInteger(rc.seed) || rc.seed < 0) {
    add("E_RUN_CONFIG", "/run_config/seed", "seed must be a non-negative integer");
  }
  if (rc.runs !== undefined && (!Number.isInteger(rc.runs) || rc.runs < 1)) {
    add("E_RUN_CONFIG", "/run_config/runs", "runs must be an integer ≥ 1");
  }
  if (rc.max_sim_time !== undefined && rc.max_sim_time !== null && rc.max_sim_time <= 0) {
    add("E_RUN_CONFIG", "/run_config/max_sim_time", "time limit must be positive");
  }
  if (state.nodes.length === 0) {
    add("E_STRUCTURE", "/topology/nodes", "place at least one node");
  }
  return issues;
}
