// Composition root: canvas + panels + server list + run/experiments flow.

import { ApiError, JobServiceClient, pollJob } from "./api";
import { canonicalBytes, canonicalText } from "./canonical";
import { TopologyCanvas } from "./canvas";
import type { CanvasMode } from "./canvas";
import {
  renderAssignmentPanel,
  renderConnectionPanel,
  renderExperiments,
  renderNodePanel,
  renderReport,
} from "./panels";
import { addServer, loadServers, markSeen, removeServer, saveServers } from "./servers";
import type { ServerEntry } from "./servers";
import {
  EditorState,
  UndoStack,
  addNode,
  assignRole,
  connectNodes,
  emptyState,
  fromDocument,
  moveGroup,
  moveNode,
  moveStage,
  removeBinding,
  removeConnection,
  removeNode,
  toDocument,
  updateConnectionParams,
  updateNodeParams,
} from "./state";
import type { RoleSchema, SimulationDocument, ValidationIssue } from "./types";
import { validateDraft } from "./validate";

export class App {
  state: EditorState = emptyState();
  private undo = new UndoStack();
  private canvas: TopologyCanvas;
  private servers: ServerEntry[] = [];
  private activeServer: string | null = null;
  private roles: RoleSchema[] = [];
  private issues: ValidationIssue[] = [];
  private refs: Record<string, HTMLElement> = {};

  constructor(private root: HTMLElement) {
    this.root.innerHTML = LAYOUT;
    for (const element of this.root.querySelectorAll<HTMLElement>("[data-ref]")) {
      this.refs[element.dataset.ref!] = element;
    }
    this.canvas = new TopologyCanvas(this.refs.canvas, {
      onAddNode: (x, y) => this.mutate((s) => void addNode(s, x, y)),
      onMoveNode: (id, x, y) => {
        moveNode(this.state, id, x, y);
        this.canvas.render(this.state);
      },
      onMoveEnd: () => this.refresh(),
      onConnect: (a, b) =>
        this.mutate((s) => {
          try {
            connectNodes(s, a, b);
          } catch (error) {
            this.banner(String(error instanceof Error ? error.message : error));
          }
        }),
      onSelectNode: (id) => {
        this.state.selection = { kind: "node", id };
        this.refresh();
      },
      onSelectConnection: (id) => {
        this.state.selection = { kind: "connection", id };
        this.refresh();
      },
      onClearSelection: () => {
        this.state.selection = null;
        this.refresh();
      },
    });
    this.wireToolbar();
    this.wireServers();
    this.servers = loadServers();
    this.renderServers();
    this.refresh();
  }

  // -- state plumbing -------------------------------------------------------

  private mutate(edit: (state: EditorState) => void): void {
    this.undo.remember(this.state);
    edit(this.state);
    this.refresh();
  }

  private refresh(): void {
    this.issues = validateDraft(this.state, this.roles);
    this.canvas.render(this.state);
    this.renderSidePanel();
    this.renderRunBar();
  }

  setRoles(roles: RoleSchema[]): void {
    this.roles = roles;
    this.refresh();
  }

  banner(message: string, tone: "error" | "info" = "error"): void {
    const banner = this.refs.banner;
    banner.textContent = message;
    banner.className = `banner ${tone} visible`;
    window.setTimeout(() => banner.classList.remove("visible"), 6000);
  }

  // -- toolbar ----------------------------------------------------------------

  private wireToolbar(): void {
    const byId = (id: string) => this.root.querySelector<HTMLElement>(`#${id}`)!;
    const setMode = (mode: CanvasMode) => {
      this.canvas.setMode(mode);
      for (const button of this.root.querySelectorAll("[data-mode]")) {
        button.classList.toggle("active", button.getAttribute("data-mode") === mode);
      }
    };
    byId("mode-select").addEventListener("click", () => setMode("select"));
    byId("mode-add").addEventListener("click", () => setMode("add-node"));
    byId("mode-connect").addEventListener("click", () => setMode("connect"));
    setMode("select");

    byId("undo").addEventListener("click", () => {
      const previous = this.undo.undo(this.state);
      if (previous) {
        this.state = previous;
        this.refresh();
      }
    });
    byId("redo").addEventListener("click", () => {
      const next = this.undo.redo(this.state);
      if (next) {
        this.state = next;
        this.refresh();
      }
    });

    const nameInput = byId("doc-name") as HTMLInputElement;
    nameInput.value = this.state.name;
    nameInput.addEventListener("change", () => this.mutate((s) => void (s.name = nameInput.value)));

    const seedInput = byId("run-seed") as HTMLInputElement;
    seedInput.value = String(this.state.runConfig.seed);
    seedInput.addEventListener("change", () =>
      this.mutate((s) => void (s.runConfig.seed = Number(seedInput.value))),
    );
    const runsInput = byId("run-count") as HTMLInputElement;
    runsInput.value = String(this.state.runConfig.runs ?? 1);
    runsInput.addEventListener("change", () =>
      this.mutate((s) => void (s.runConfig.runs = Number(runsInput.value))),
    );

    byId("export").addEventListener("click", () => this.exportDocument());
    const importInput = byId("import-file") as HTMLInputElement;
    byId("import").addEventListener("click", () => importInput.click());
    importInput.addEventListener("change", async () => {
      const file = importInput.files?.[0];
      if (!file) return;
      try {
        const doc = JSON.parse(await file.text()) as SimulationDocument;
        this.undo.remember(this.state);
        this.state = fromDocument(doc);
        (byId("doc-name") as HTMLInputElement).value = this.state.name;
        (byId("run-seed") as HTMLInputElement).value = String(this.state.runConfig.seed);
        (byId("run-count") as HTMLInputElement).value = String(this.state.runConfig.runs ?? 1);
        this.refresh();
      } catch (error) {
        this.banner(`import failed: ${error}`);
      }
      importInput.value = "";
    });

    byId("run").addEventListener("click", () => void this.runSimulation());
    byId("refresh-experiments").addEventListener("click", () => void this.refreshExperiments());
  }

  exportDocument(): void {
    const text = canonicalText(toDocument(this.state));
    const blob = new Blob([text], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${this.state.name || "simulation"}.qnsim.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  }

  // -- side panel -----------------------------------------------------------------

  private renderSidePanel(): void {
    const panel = this.refs.sidebar;
    const selection = this.state.selection;
    if (!selection) {
      panel.replaceChildren();
      panel.insertAdjacentHTML(
        "afterbegin",
        `<h3>Topology</h3>
         <p class="panel-hint">select: drag nodes, click to inspect ·
         add node: click empty canvas · connect: click two nodes</p>
         <p class="panel-hint">${this.state.nodes.length} node(s),
         ${this.state.connections.length} connection(s),
         ${this.state.groups.length} protocol group(s)</p>`,
      );
      if (this.issues.length > 0) {
        const list = document.createElement("ul");
        list.className = "issue-list";
        for (const issue of this.issues) {
          const item = document.createElement("li");
          item.textContent = `${issue.code} ${issue.path}: ${issue.message}`;
          list.appendChild(item);
        }
        panel.appendChild(list);
      }
      return;
    }
    if (selection.kind === "node") {
      const node = this.state.nodes.find((n) => n.id === selection.id);
      if (!node) return;
      panel.replaceChildren();
      const nodeBox = document.createElement("div");
      const assignBox = document.createElement("div");
      panel.append(nodeBox, assignBox);
      renderNodePanel(
        nodeBox,
        node,
        this.issues,
        (params) => this.mutate((s) => updateNodeParams(s, node.id, params)),
        () => this.mutate((s) => removeNode(s, node.id)),
      );
      renderAssignmentPanel(assignBox, this.state, node.id, this.roles, this.issues, {
        onAssign: (gi, si, role) => this.mutate((s) => assignRole(s, gi, si, node.id, role)),
        onRenameGroup: (gi, name) => this.mutate((s) => void (s.groups[gi].name = name)),
        onRemoveBinding: (gi, si, bi) => this.mutate((s) => removeBinding(s, gi, si, bi)),
        onSetBindingParam: (gi, si, bi, name, value) =>
          this.mutate((s) => {
            const binding = s.groups[gi].stages[si][bi];
            if (value === undefined) delete binding.params[name];
            else binding.params[name] = value;
          }),
        onMoveGroup: (from, to) => this.mutate((s) => moveGroup(s, from, to)),
        onMoveStage: (gi, from, to) => this.mutate((s) => moveStage(s, gi, from, to)),
        onAddGroup: () =>
          this.mutate((s) =>
            s.groups.push({ name: `group-${s.groups.length + 1}`, stages: [[]] as never }),
          ),
        onAddStage: (gi) => this.mutate((s) => s.groups[gi].stages.push([] as never)),
      });
      return;
    }
    const conn = this.state.connections.find((c) => c.id === selection.id);
    if (!conn) return;
    panel.replaceChildren();
    const box = document.createElement("div");
    panel.appendChild(box);
    renderConnectionPanel(
      box,
      conn,
      this.issues,
      (params) => this.mutate((s) => updateConnectionParams(s, conn.id, params)),
      () => this.mutate((s) => removeConnection(s, conn.id)),
    );
  }

  // -- servers -----------------------------------------------------------------------

  private wireServers(): void {
    const form = this.root.querySelector<HTMLFormElement>("#server-form")!;
    form.addEventListener("submit", (e) => {
      e.preventDefault();
      const url = (form.querySelector("#server-url") as HTMLInputElement).value.trim();
      const label = (form.querySelector("#server-label") as HTMLInputElement).value.trim();
      if (!url) return;
      this.servers = addServer(this.servers, label, url);
      saveServers(this.servers);
      (form.querySelector("#server-url") as HTMLInputElement).value = "";
      (form.querySelector("#server-label") as HTMLInputElement).value = "";
      this.renderServers();
      void this.checkServer(url);
    });
  }

  private renderServers(): void {
    const list = this.refs.servers;
    list.replaceChildren();
    for (const server of this.servers) {
      const row = document.createElement("div");
      row.className = "server-row" + (server.baseUrl === this.activeServer ? " active" : "");
      const pick = document.createElement("input");
      pick.type = "radio";
      pick.name = "active-server";
      pick.checked = server.baseUrl === this.activeServer;
      pick.addEventListener("change", () => {
        this.activeServer = server.baseUrl;
        void this.checkServer(server.baseUrl);
        this.renderServers();
        this.renderRunBar();
        void this.refreshExperiments();
      });
      const text = document.createElement("span");
      text.textContent = `${server.label} — ${server.baseUrl}`;
      const seen = document.createElement("span");
      seen.className = "muted";
      seen.textContent = server.lastSeen ? ` v${server.lastSeen.version}` : " (unchecked)";
      const drop = document.createElement("button");
      drop.className = "small";
      drop.textContent = "remove";
      drop.addEventListener("click", () => {
        this.servers = removeServer(this.servers, server.baseUrl);
        if (this.activeServer === server.baseUrl) this.activeServer = null;
        saveServers(this.servers);
        this.renderServers();
        this.renderRunBar();
      });
      row.append(pick, text, seen, drop);
      list.appendChild(row);
    }
  }

  private async checkServer(baseUrl: string): Promise<void> {
    const client = new JobServiceClient(baseUrl);
    try {
      const health = await client.health();
      this.servers = markSeen(this.servers, baseUrl, health.version);
      saveServers(this.servers);
      const { roles } = await client.roles();
      this.renderServers();
      this.setRoles(roles);
    } catch {
      this.banner(`server ${baseUrl} is unreachable`);
    }
  }

  // -- run + experiments -----------------------------------------------------------------

  private renderRunBar(): void {
    const runButton = this.root.querySelector<HTMLButtonElement>("#run")!;
    const reason = this.runBlockReason();
    runButton.disabled = reason !== null;
    runButton.title = reason ?? "submit to the selected server";
  }

  runBlockReason(): string | null {
    if (!this.activeServer) return "add and select a server first";
    if (this.issues.length > 0) return `fix ${this.issues.length} validation issue(s)`;
    return null;
  }

  async runSimulation(): Promise<void> {
    if (this.runBlockReason()) return;
    const client = new JobServiceClient(this.activeServer!);
    const body = canonicalBytes(toDocument(this.state));
    let jobId: string;
    try {
      ({ job_id: jobId } = await client.submit(body));
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        this.issues = error.envelope.details;
        this.refresh();
        this.banner("the server rejected the document; see the highlighted fields");
      } else {
        this.banner(`submit failed: ${error}`);
      }
      return;
    }
    this.banner(`job ${jobId.slice(0, 8)} submitted`, "info");
    try {
      const record = await pollJob(client, jobId, {
        intervalMs: 1000,
        onRetry: () => this.banner("server unreachable, retrying...", "error"),
      });
      this.banner(`job ${jobId.slice(0, 8)} ${record.status}`,
        record.status === "succeeded" ? "info" : "error");
    } catch (error) {
      this.banner(`polling failed: ${error}`);
    }
    await this.refreshExperiments();
  }

  async refreshExperiments(): Promise<void> {
    if (!this.activeServer) return;
    const client = new JobServiceClient(this.activeServer);
    try {
      const { experiments } = await client.experiments();
      renderExperiments(
        this.refs.experiments,
        experiments,
        (id) => client.downloadUrl(id),
        (id, into) => {
          void client.results(id).then(
            (report) => renderReport(into, report),
            (error) => {
              into.textContent = error instanceof ApiError ? error.message : String(error);
            },
          );
        },
      );
    } catch {
      this.banner("could not load experiments");
    }
  }
}

const LAYOUT = `
  <header class="topbar">
    <strong>QNDK</strong>
    <input id="doc-name" type="text" title="simulation name" />
    <span class="toolbar-group">
      <button id="mode-select" data-mode="select">select</button>
      <button id="mode-add" data-mode="add-node">add node</button>
      <button id="mode-connect" data-mode="connect">connect</button>
    </span>
    <span class="toolbar-group">
      <button id="undo">undo</button>
      <button id="redo">redo</button>
    </span>
    <span class="toolbar-group">
      <button id="import">import</button>
      <button id="export">export</button>
      <input id="import-file" type="file" accept=".json,.qnsim.json" hidden />
    </span>
    <span class="toolbar-group run-group">
      seed <input id="run-seed" type="number" step="1" />
      runs <input id="run-count" type="number" step="1" min="1" />
      <button id="run" class="primary">Run Simulation</button>
    </span>
  </header>
  <div class="banner" data-ref="banner"></div>
  <main class="workspace">
    <section class="canvas-wrap" data-ref="canvas"></section>
    <aside class="panel" data-ref="sidebar"></aside>
    <aside class="panel right">
      <h3>Servers</h3>
      <div data-ref="servers"></div>
      <form id="server-form">
        <input id="server-label" type="text" placeholder="label" />
        <input id="server-url" type="url" placeholder="http://127.0.0.1:8080" />
        <button type="submit" class="small">add server</button>
      </form>
      <div class="experiments-head">
        <button id="refresh-experiments" class="small">refresh</button>
      </div>
      <div data-ref="experiments"></div>
    </aside>
  </main>
`;
