// Editor state and its transitions, kept free of DOM concerns so the
// document-building logic is directly testable. The canvas graph always
// serializes to a SimulationDocument; node positions travel in the
// document's "extensions.layout" key, which the server validator ignores.

import type {
  ConnectionParams,
  NodeParams,
  ProtocolGroup,
  RoleBinding,
  RunConfig,
  SimulationDocument,
} from "./types";

export interface NodePlacement {
  x: number;
  y: number;
}

export interface EditorState {
  name: string;
  engine: string;
  nodes: NodeParams[];
  connections: ConnectionParams[];
  groups: ProtocolGroup[];
  runConfig: RunConfig;
  layout: Record<string, NodePlacement>;
  extensions: Record<string, unknown>;
  selection: { kind: "node" | "connection"; id: string } | null;
}

export function emptyState(): EditorState {
  return {
    name: "untitled-simulation",
    engine: "native",
    nodes: [],
    connections: [],
    groups: [],
    runConfig: { seed: 42, runs: 1, max_sim_time: null },
    layout: {},
    extensions: {},
    selection: null,
  };
}

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

// -- undo ---------------------------------------------------------------------

export class UndoStack {
  private past: EditorState[] = [];
  private future: EditorState[] = [];

  remember(state: EditorState): void {
    this.past.push(clone(state));
    if (this.past.length > 100) this.past.shift();
    this.future = [];
  }

  undo(current: EditorState): EditorState | null {
    const previous = this.past.pop();
    if (!previous) return null;
    this.future.push(clone(current));
    return previous;
  }

  redo(current: EditorState): EditorState | null {
    const next = this.future.pop();
    if (!next) return null;
    this.past.push(clone(current));
    return next;
  }

  get canUndo(): boolean {
    return this.past.length > 0;
  }
}

// -- topology edits --------------------------------------------------------------

export function nextNodeId(state: EditorState): string {
  let i = state.nodes.length + 1;
  while (state.nodes.some((n) => n.id === `N${i}`)) i += 1;
  return `N${i}`;
}

export function addNode(state: EditorState, x: number, y: number, id?: string): string {
  const nodeId = id ?? nextNodeId(state);
  if (state.nodes.some((n) => n.id === nodeId)) {
    throw new Error(`duplicate node id ${nodeId}`);
  }
  state.nodes.push({ id: nodeId });
  state.layout[nodeId] = { x, y };
  return nodeId;
}

export function moveNode(state: EditorState, nodeId: string, x: number, y: number): void {
  state.layout[nodeId] = { x, y };
}

export function removeNode(state: EditorState, nodeId: string): void {
  state.nodes = state.nodes.filter((n) => n.id !== nodeId);
  state.connections = state.connections.filter(
    (c) => c.endpoint_a !== nodeId && c.endpoint_b !== nodeId,
  );
  state.groups = state.groups
    .map((g) => ({
      ...g,
      stages: g.stages
        .map((stage) => stage.filter((b) => b.node !== nodeId))
        .filter((stage) => stage.length > 0),
    }))
    .filter((g) => g.stages.length > 0);
  delete state.layout[nodeId];
  if (state.selection?.kind === "node" && state.selection.id === nodeId) {
    state.selection = null;
  }
}

export function connectNodes(state: EditorState, a: string, b: string, id?: string): string {
  if (a === b) throw new Error("endpoints must be distinct nodes");
  if (connectionBetween(state, a, b)) {
    throw new Error(`nodes ${a} and ${b} are already connected`);
  }
  let i = state.connections.length + 1;
  while (state.connections.some((c) => c.id === `C${i}`)) i += 1;
  const connId = id ?? `C${i}`;
  state.connections.push({ id: connId, endpoint_a: a, endpoint_b: b });
  return connId;
}

export function removeConnection(state: EditorState, connId: string): void {
  state.connections = state.connections.filter((c) => c.id !== connId);
  if (state.selection?.kind === "connection" && state.selection.id === connId) {
    state.selection = null;
  }
}

export function connectionBetween(
  state: EditorState,
  a: string,
  b: string,
): ConnectionParams | undefined {
  return state.connections.find(
    (c) =>
      (c.endpoint_a === a && c.endpoint_b === b) ||
      (c.endpoint_a === b && c.endpoint_b === a),
  );
}

export function updateNodeParams(
  state: EditorState,
  nodeId: string,
  params: Partial<NodeParams>,
): void {
  const node = state.nodes.find((n) => n.id === nodeId);
  if (!node) throw new Error(`no node ${nodeId}`);
  Object.assign(node, params);
  for (const key of Object.keys(node) as (keyof NodeParams)[]) {
    if (node[key] === undefined) delete node[key];
  }
}

export function updateConnectionParams(
  state: EditorState,
  connId: string,
  params: Partial<ConnectionParams>,
): void {
  const conn = state.connections.find((c) => c.id === connId);
  if (!conn) throw new Error(`no connection ${connId}`);
  Object.assign(conn, params);
  for (const key of Object.keys(conn) as (keyof ConnectionParams)[]) {
    if (conn[key] === undefined) delete conn[key];
  }
}

// -- protocol assignment ------------------------------------------------------------

export function assignRole(
  state: EditorState,
  groupIndex: number,
  stageIndex: number,
  nodeId: string,
  role: string,
  params: Record<string, number> = {},
): void {
  while (state.groups.length <= groupIndex) {
    state.groups.push({ name: `group-${state.groups.length + 1}`, stages: [] });
  }
  const group = state.groups[groupIndex];
  while (group.stages.length <= stageIndex) {
    group.stages.push([]);
  }
  group.stages[stageIndex].push({ node: nodeId, role, params });
}

export function removeBinding(
  state: EditorState,
  groupIndex: number,
  stageIndex: number,
  bindingIndex: number,
): void {
  const group = state.groups[groupIndex];
  if (!group) return;
  const stage = group.stages[stageIndex];
  if (!stage) return;
  stage.splice(bindingIndex, 1);
  if (stage.length === 0) group.stages.splice(stageIndex, 1);
  if (group.stages.length === 0) state.groups.splice(groupIndex, 1);
}

export function moveGroup(state: EditorState, from: number, to: number): void {
  if (from === to || from < 0 || from >= state.groups.length) return;
  const bounded = Math.max(0, Math.min(to, state.groups.length - 1));
  const [group] = state.groups.splice(from, 1);
  state.groups.splice(bounded, 0, group);
}

export function moveStage(state: EditorState, groupIndex: number, from: number, to: number): void {
  const group = state.groups[groupIndex];
  if (!group || from === to || from < 0 || from >= group.stages.length) return;
  const bounded = Math.max(0, Math.min(to, group.stages.length - 1));
  const [stage] = group.stages.splice(from, 1);
  group.stages.splice(bounded, 0, stage);
}

export function nodeHasBindings(state: EditorState, nodeId: string): boolean {
  return state.groups.some((g) => g.stages.some((s) => s.some((b) => b.node === nodeId)));
}

export function bindingsOf(state: EditorState, nodeId: string): RoleBinding[] {
  const out: RoleBinding[] = [];
  for (const group of state.groups) {
    for (const stage of group.stages) {
      for (const binding of stage) {
        if (binding.node === nodeId) out.push(binding);
      }
    }
  }
  return out;
}

// -- document round trip ----------------------------------------------------------------

export function toDocument(state: EditorState): SimulationDocument {
  const extensions: Record<string, unknown> = { ...state.extensions };
  if (Object.keys(state.layout).length > 0) {
    extensions.layout = clone(state.layout);
  } else {
    delete extensions.layout;
  }
  const doc: SimulationDocument = {
    schema_version: "1",
    name: state.name,
    engine: state.engine,
    topology: {
      nodes: clone(state.nodes),
      connections: clone(state.connections),
    },
    protocol_groups: clone(state.groups),
    run_config: clone(state.runConfig),
  };
  if (Object.keys(extensions).length > 0) {
    doc.extensions = extensions;
  }
  return doc;
}

export function fromDocument(doc: SimulationDocument): EditorState {
  const state = emptyState();
  state.name = doc.name;
  state.engine = doc.engine;
  state.nodes = clone(doc.topology.nodes);
  state.connections = clone(doc.topology.connections ?? []);
  state.groups = clone(doc.protocol_groups ?? []);
  state.runConfig = clone(doc.run_config);
  state.extensions = clone(doc.extensions ?? {});
  const layout = state.extensions.layout as Record<string, NodePlacement> | undefined;
  if (layout && typeof layout === "object") {
    state.layout = clone(layout);
    delete state.extensions.layout;
  } else {
    // arrange imported nodes on a circle so the canvas is usable
    state.nodes.forEach((node, i) => {
      const angle = (2 * Math.PI * i) / Math.max(state.nodes.length, 1);
      state.layout[node.id] = {
        x: Math.round(400 + 220 * Math.cos(angle)),
        y: Math.round(280 + 180 * Math.sin(angle)),
      };
    });
  }
  return state;
}

// Documents compared with layout and other UI extensions stripped.
export function semanticDocument(doc: SimulationDocument): SimulationDocument {
  const copy = clone(doc);
  delete copy.extensions;
  return copy;
}
