// SVG topology canvas: drag-and-drop nodes, connection edges, selection,
// and the red assignment dot atop nodes that carry protocol roles.

import type { EditorState } from "./state";
import { nodeHasBindings } from "./state";

export type CanvasMode = "select" | "add-node" | "connect";

export interface CanvasCallbacks {
  onAddNode(x: number, y: number): void;
  onMoveNode(nodeId: string, x: number, y: number): void;
  onMoveEnd(): void;
  onConnect(a: string, b: string): void;
  onSelectNode(nodeId: string): void;
  onSelectConnection(connId: string): void;
  onClearSelection(): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RADIUS = 26;

export class TopologyCanvas {
  mode: CanvasMode = "select";
  private svg: SVGSVGElement;
  private dragging: { nodeId: string; dx: number; dy: number } | null = null;
  private pendingConnect: string | null = null;

  constructor(container: HTMLElement, private callbacks: CanvasCallbacks) {
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("class", "topology-canvas");
    this.svg.setAttribute("width", "100%");
    this.svg.setAttribute("height", "100%");
    container.appendChild(this.svg);

    this.svg.addEventListener("pointerdown", (e) => this.pointerDown(e));
    this.svg.addEventListener("pointermove", (e) => this.pointerMove(e));
    this.svg.addEventListener("pointerup", () => this.pointerUp());
    this.svg.addEventListener("pointerleave", () => this.pointerUp());
  }

  setMode(mode: CanvasMode): void {
    this.mode = mode;
    this.pendingConnect = null;
    this.svg.dataset.mode = mode;
  }

  private point(e: PointerEvent): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    return { x: Math.round(e.clientX - rect.left), y: Math.round(e.clientY - rect.top) };
  }

  private pointerDown(e: PointerEvent): void {
    const target = e.target as Element;
    const nodeGroup = target.closest("[data-node-id]");
    const edge = target.closest("[data-conn-id]");
    const { x, y } = this.point(e);

    if (this.mode === "add-node" && !nodeGroup && !edge) {
      this.callbacks.onAddNode(x, y);
      return;
    }
    if (nodeGroup) {
      const nodeId = nodeGroup.getAttribute("data-node-id")!;
      if (this.mode === "connect") {
        if (this.pendingConnect && this.pendingConnect !== nodeId) {
          this.callbacks.onConnect(this.pendingConnect, nodeId);
          this.pendingConnect = null;
        } else {
          this.pendingConnect = nodeId;
          nodeGroup.classList.add("connect-source");
        }
        return;
      }
      this.callbacks.onSelectNode(nodeId);
      const cx = Number(nodeGroup.getAttribute("data-x"));
      const cy = Number(nodeGroup.getAttribute("data-y"));
      this.dragging = { nodeId, dx: cx - x, dy: cy - y };
      return;
    }
    if (edge) {
      this.callbacks.onSelectConnection(edge.getAttribute("data-conn-id")!);
      return;
    }
    this.pendingConnect = null;
    this.callbacks.onClearSelection();
  }

  private pointerMove(e: PointerEvent): void {
    if (!this.dragging) return;
    const { x, y } = this.point(e);
    this.callbacks.onMoveNode(this.dragging.nodeId, x + this.dragging.dx, y + this.dragging.dy);
  }

  private pointerUp(): void {
    if (this.dragging) {
      this.dragging = null;
      this.callbacks.onMoveEnd();
    }
  }

  render(state: EditorState): void {
    this.svg.replaceChildren();

    for (const conn of state.connections) {
      const a = state.layout[conn.endpoint_a];
      const b = state.layout[conn.endpoint_b];
      if (!a || !b) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-conn-id", conn.id);
      group.classList.add("edge");
      if (state.selection?.kind === "connection" && state.selection.id === conn.id) {
        group.classList.add("selected");
      }
      const hit = document.createElementNS(SVG_NS, "line");
      hit.setAttribute("x1", String(a.x));
      hit.setAttribute("y1", String(a.y));
      hit.setAttribute("x2", String(b.x));
      hit.setAttribute("y2", String(b.y));
      hit.setAttribute("class", "edge-hit");
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("class", "edge-line");
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((a.x + b.x) / 2));
      label.setAttribute("y", String((a.y + b.y) / 2 - 8));
      label.setAttribute("class", "edge-label");
      const length = conn.length_km ?? 0;
      label.textContent = `${conn.id} · ${length} km`;
      group.append(hit, line, label);
      this.svg.appendChild(group);
    }

    for (const node of state.nodes) {
      const pos = state.layout[node.id];
      if (!pos) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-node-id", node.id);
      group.setAttribute("data-x", String(pos.x));
      group.setAttribute("data-y", String(pos.y));
      group.classList.add("node");
      if (state.selection?.kind === "node" && state.selection.id === node.id) {
        group.classList.add("selected");
      }
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(pos.x));
      circle.setAttribute("cy", String(pos.y));
      circle.setAttribute("r", String(NODE_RADIUS));
      circle.setAttribute("class", "node-circle");
      group.appendChild(circle);

      const name = document.createElementNS(SVG_NS, "text");
      name.setAttribute("x", String(pos.x));
      name.setAttribute("y", String(pos.y + 5));
      name.setAttribute("class", "node-name");
      name.textContent = node.id;
      group.appendChild(name);

      if (node.label) {
        const label = document.createElementNS(SVG_NS, "text");
        label.setAttribute("x", String(pos.x));
        label.setAttribute("y", String(pos.y + NODE_RADIUS + 16));
        label.setAttribute("class", "node-label");
        label.textContent = node.label;
        group.appendChild(label);
      }

      if (nodeHasBindings(state, node.id)) {
        // the red dot: protocols are assigned to this node
        const dot = document.createElementNS(SVG_NS, "circle");
        dot.setAttribute("cx", String(pos.x + NODE_RADIUS * 0.75));
        dot.setAttribute("cy", String(pos.y - NODE_RADIUS * 0.75));
        dot.setAttribute("r", "6");
        dot.setAttribute("class", "assignment-dot");
        dot.setAttribute("data-assignment-dot", node.id);
        group.appendChild(dot);
      }
      this.svg.appendChild(group);
    }
  }
}
