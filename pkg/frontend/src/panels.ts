// Side-panel widgets: parameter menus, protocol assignment, experiments tab.

import type { EditorState } from "./state";
import type {
  ConnectionParams,
  ExperimentEntry,
  NodeParams,
  RoleSchema,
  RunReport,
  ValidationIssue,
} from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function issueFor(issues: ValidationIssue[], suffix: string): ValidationIssue | undefined {
  return issues.find((i) => i.path.endsWith(suffix));
}

interface FieldSpec {
  key: string;
  label: string;
  step?: string;
  placeholder?: string;
}

function numberField(
  spec: FieldSpec,
  value: number | undefined,
  issue: ValidationIssue | undefined,
  onChange: (value: number | undefined) => void,
): HTMLElement {
  const input = el("input", {
    type: "number",
    step: spec.step ?? "any",
    placeholder: spec.placeholder ?? "default",
  }) as HTMLInputElement;
  if (value !== undefined) input.value = String(value);
  input.addEventListener("change", () => {
    onChange(input.value === "" ? undefined : Number(input.value));
  });
  const wrap = el("label", { class: "field" }, el("span", {}, spec.label), input);
  if (issue) {
    input.classList.add("invalid");
    wrap.appendChild(el("span", { class: "field-error" }, issue.message));
  }
  return wrap;
}

// -- node: the Advanced Parameters menu -----------------------------------------

export function renderNodePanel(
  container: HTMLElement,
  node: NodeParams,
  issues: ValidationIssue[],
  onChange: (params: Partial<NodeParams>) => void,
  onDelete: () => void,
): void {
  container.replaceChildren(
    el("h3", {}, `Node ${node.id}`),
    el("p", { class: "panel-hint" }, "Advanced Parameters"),
  );
  const labelInput = el("input", { type: "text", placeholder: "display label" }) as HTMLInputElement;
  labelInput.value = node.label ?? "";
  labelInput.addEventListener("change", () =>
    onChange({ label: labelInput.value === "" ? undefined : labelInput.value }),
  );
  container.appendChild(el("label", { class: "field" }, el("span", {}, "label"), labelInput));

  const fields: [FieldSpec, number | undefined][] = [
    [{ key: "memory_slots", label: "quantum memory slots", step: "1", placeholder: "8" }, node.memory_slots],
    [{ key: "t1", label: "T1 (s)", placeholder: "1" }, node.t1],
    [{ key: "t2", label: "T2 (s)", placeholder: "1" }, node.t2],
    [{ key: "source_fidelity", label: "source fidelity", step: "0.01", placeholder: "1.0" }, node.source_fidelity],
    [{ key: "emission_frequency", label: "emission frequency (Hz)", placeholder: "1e6" }, node.emission_frequency],
  ];
  for (const [spec, value] of fields) {
    container.appendChild(
      numberField(spec, value, issueFor(issues, `/${spec.key}`), (v) =>
        onChange({ [spec.key]: v } as Partial<NodeParams>),
      ),
    );
  }
  const remove = el("button", { class: "danger" }, "delete node");
  remove.addEventListener("click", onDelete);
  container.appendChild(remove);
}

// -- connection menu ---------------------------------------------------------------

export function renderConnectionPanel(
  container: HTMLElement,
  conn: ConnectionParams,
  issues: ValidationIssue[],
  onChange: (params: Partial<ConnectionParams>) => void,
  onDelete: () => void,
): void {
  container.replaceChildren(
    el("h3", {}, `Connection ${conn.id}`),
    el("p", { class: "panel-hint" }, `${conn.endpoint_a} ↔ ${conn.endpoint_b}`),
  );
  const fields: [FieldSpec, number | undefined][] = [
    [{ key: "length_km", label: "fiber length (km)", placeholder: "0" }, conn.length_km],
    [{ key: "attenuation_db_per_km", label: "signal loss (dB/km)", step: "0.01", placeholder: "0.2" }, conn.attenuation_db_per_km],
    [{ key: "noise_depolarizing_p", label: "noise level (depolarizing p)", step: "0.01", placeholder: "0" }, conn.noise_depolarizing_p],
  ];
  for (const [spec, value] of fields) {
    container.appendChild(
      numberField(spec, value, issueFor(issues, `/${spec.key}`), (v) =>
        onChange({ [spec.key]: v } as Partial<ConnectionParams>),
      ),
    );
  }

  const latency = el("input", { type: "text", placeholder: "auto" }) as HTMLInputElement;
  latency.value = conn.classical_latency === undefined ? "" : String(conn.classical_latency);
  latency.addEventListener("change", () => {
    const raw = latency.value.trim();
    if (raw === "") onChange({ classical_latency: undefined });
    else if (raw === "auto") onChange({ classical_latency: "auto" });
    else onChange({ classical_latency: Number(raw) });
  });
  const latencyWrap = el(
    "label",
    { class: "field" },
    el("span", {}, 'classical latency (s or "auto")'),
    latency,
  );
  const latencyIssue = issueFor(issues, "/classical_latency");
  if (latencyIssue) latencyWrap.appendChild(el("span", { class: "field-error" }, latencyIssue.message));
  container.appendChild(latencyWrap);

  const remove = el("button", { class: "danger" }, "delete connection");
  remove.addEventListener("click", onDelete);
  container.appendChild(remove);
}

// -- protocol assignment -----------------------------------------------------------

export interface AssignmentCallbacks {
  onAssign(groupIndex: number, stageIndex: number, role: string): void;
  onRenameGroup(groupIndex: number, name: string): void;
  onRemoveBinding(groupIndex: number, stageIndex: number, bindingIndex: number): void;
  onSetBindingParam(
    groupIndex: number,
    stageIndex: number,
    bindingIndex: number,
    name: string,
    value: number | undefined,
  ): void;
  onMoveGroup(from: number, to: number): void;
  onMoveStage(groupIndex: number, from: number, to: number): void;
  onAddGroup(): void;
  onAddStage(groupIndex: number): void;
}

export function renderAssignmentPanel(
  container: HTMLElement,
  state: EditorState,
  nodeId: string,
  roles: RoleSchema[],
  issues: ValidationIssue[],
  callbacks: AssignmentCallbacks,
): void {
  container.replaceChildren(el("h3", {}, `Protocols on ${nodeId}`));

  state.groups.forEach((group, gi) => {
    const groupBox = el("div", { class: "group-box", draggable: "true", "data-group": String(gi) });
    groupBox.addEventListener("dragstart", (e) => {
      (e as DragEvent).dataTransfer?.setData("text/qndk-group", String(gi));
    });
    groupBox.addEventListener("dragover", (e) => e.preventDefault());
    groupBox.addEventListener("drop", (e) => {
      const from = (e as DragEvent).dataTransfer?.getData("text/qndk-group");
      if (from) {
        e.preventDefault();
        callbacks.onMoveGroup(Number(from), gi);
      }
    });
    const nameInput = el("input", {
      type: "text",
      class: "group-name",
      title: "group name",
    }) as HTMLInputElement;
    nameInput.value = group.name;
    nameInput.addEventListener("change", () => callbacks.onRenameGroup(gi, nameInput.value));
    groupBox.appendChild(el("h4", {}, `${gi + 1}. `, nameInput));

    group.stages.forEach((stage, si) => {
      const stageBox = el("div", { class: "stage-box", draggable: "true" });
      stageBox.addEventListener("dragstart", (e) => {
        (e as DragEvent).dataTransfer?.setData("text/qndk-stage", `${gi}:${si}`);
        e.stopPropagation();
      });
      stageBox.addEventListener("dragover", (e) => e.preventDefault());
      stageBox.addEventListener("drop", (e) => {
        const from = (e as DragEvent).dataTransfer?.getData("text/qndk-stage");
        if (from) {
          const [fg, fs] = from.split(":").map(Number);
          if (fg === gi) {
            e.preventDefault();
            e.stopPropagation();
            callbacks.onMoveStage(gi, fs, si);
          }
        }
      });
      stageBox.appendChild(el("h5", {}, `stage ${si + 1}`));

      stage.forEach((binding, bi) => {
        if (binding.node !== nodeId) {
          stageBox.appendChild(
            el("div", { class: "binding other-node" }, `${binding.role} @ ${binding.node}`),
          );
          return;
        }
        const row = el("div", { class: "binding" });
        row.appendChild(el("span", { class: "binding-role" }, binding.role));
        const remove = el("button", { class: "small" }, "remove");
        remove.addEventListener("click", () => callbacks.onRemoveBinding(gi, si, bi));
        row.appendChild(remove);

        const schema = roles.find((r) => r.name === binding.role);
        for (const param of schema?.params ?? []) {
          const input = el("input", {
            type: "number",
            step: param.type === "int" ? "1" : "any",
            placeholder: String(param.default),
          }) as HTMLInputElement;
          const current = binding.params?.[param.name];
          if (current !== undefined) input.value = String(current);
          input.addEventListener("change", () =>
            callbacks.onSetBindingParam(
              gi, si, bi, param.name,
              input.value === "" ? undefined : Number(input.value),
            ),
          );
          const field = el("label", { class: "field small" }, el("span", {}, param.name), input);
          const issue = issueFor(issues, `/protocol_groups/${gi}/stages/${si}/${bi}/params/${param.name}`);
          if (issue) {
            input.classList.add("invalid");
            field.appendChild(el("span", { class: "field-error" }, issue.message));
          }
          row.appendChild(field);
        }
        stageBox.appendChild(row);
      });

      const assign = el("select", { class: "role-select" }) as HTMLSelectElement;
      assign.appendChild(el("option", { value: "" }, "assign role..."));
      for (const role of roles) {
        assign.appendChild(el("option", { value: role.name }, role.name));
      }
      assign.addEventListener("change", () => {
        if (assign.value) callbacks.onAssign(gi, si, assign.value);
        assign.value = "";
      });
      stageBox.appendChild(assign);
      groupBox.appendChild(stageBox);
    });

    const addStage = el("button", { class: "small" }, "+ stage");
    addStage.addEventListener("click", () => callbacks.onAddStage(gi));
    groupBox.appendChild(addStage);
    container.appendChild(groupBox);
  });

  const addGroup = el("button", {}, "+ protocol group");
  addGroup.addEventListener("click", callbacks.onAddGroup);
  container.appendChild(addGroup);
}

// -- experiments tab ------------------------------------------------------------------

export function renderExperiments(
  container: HTMLElement,
  entries: ExperimentEntry[],
  downloadUrl: (id: string) => string,
  onView: (id: string, into: HTMLElement) => void,
): void {
  container.replaceChildren(el("h3", {}, "Experiments"));
  if (entries.length === 0) {
    container.appendChild(el("p", { class: "panel-hint" }, "No completed runs yet."));
    return;
  }
  for (const entry of entries) {
    const card = el("div", { class: `experiment status-${entry.status}` });
    const when = new Date(entry.submitted_at * 1000).toLocaleTimeString();
    card.appendChild(
      el("div", { class: "experiment-head" },
        el("strong", {}, entry.name || entry.experiment_id.slice(0, 8)),
        el("span", { class: `badge ${entry.status}` }, entry.status),
        el("span", { class: "muted" }, when)),
    );
    if (entry.error) card.appendChild(el("p", { class: "field-error" }, entry.error));
    const actions = el("div", { class: "experiment-actions" });
    const view = el("button", { class: "small" }, "view");
    const detail = el("div", { class: "experiment-detail" });
    view.addEventListener("click", () => onView(entry.experiment_id, detail));
    actions.appendChild(view);
    actions.appendChild(
      el("a", { href: downloadUrl(entry.experiment_id), download: "" }, "download"),
    );
    card.append(actions, detail);
    container.appendChild(card);
  }
}

export function renderReport(container: HTMLElement, report: RunReport): void {
  container.replaceChildren();
  report.runs.forEach((run) => {
    container.appendChild(el("h5", {}, `seed ${run.seed}`));
    const table = el("table", { class: "metrics" });
    table.appendChild(
      el("tr", {}, el("th", {}, "role"), el("th", {}, "node"), el("th", {}, "status"),
        el("th", {}, "metrics")),
    );
    for (const result of run.results) {
      const metrics = Object.entries(result.metrics)
        .map(([k, v]) => `${k}=${Number.isInteger(v) ? v : v.toFixed(4)}`)
        .join("  ");
      table.appendChild(
        el("tr", { class: `row-${result.status}` },
          el("td", {}, result.role),
          el("td", {}, result.node),
          el("td", {}, result.status),
          el("td", { class: "metrics-cell" }, metrics)),
      );
    }
    container.appendChild(table);
  });
}
