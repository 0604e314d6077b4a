import type {
  Client,
  EdgeInfo,
  NodeInfo,
  Neighborhood,
  QueryRequest,
  SearchSummary,
  SolutionTree,
} from './api';
import { ApiError } from './api';

export type QueryPhase = 'idle' | 'streaming' | 'done' | 'failed';

/**
 * Client-side session state. Holds the streamed solution list for the
 * current query plus one merged diagram the user builds up by adding
 * solutions and expanding neighborhoods.
 *
 * Everything here is a verbatim copy of server payloads; the model
 * never edits graph data, so any view can be rebuilt from a refetch.
 */
export class SessionModel {
  serverUrl = '';
  keywords: string[] = [];
  phase: QueryPhase = 'idle';
  solutions: SolutionTree[] = [];
  summary: SearchSummary | null = null;
  lastError: string | null = null;
  pinned = new Set<number>();

  // merged diagram, keyed by server ids so nothing is ever duplicated
  private nodes = new Map<number, NodeInfo>();
  private edges = new Map<number, EdgeInfo>();
  private expansions = new Map<number, Neighborhood>();

  onChange: (() => void) | null = null;

  private notify(): void {
    this.onChange?.();
  }

  beginQuery(keywords: string[]): void {
    this.keywords = keywords;
    this.phase = 'streaming';
    this.solutions = [];
    this.summary = null;
    this.lastError = null;
    this.notify();
  }

  addSolution(tree: SolutionTree): void {
    this.solutions.push(tree);
    this.notify();
  }

  finishQuery(stats: SearchSummary): void {
    this.summary = stats;
    this.phase = 'done';
    this.notify();
  }

  failQuery(detail: string): void {
    this.lastError = detail;
    this.phase = 'failed';
    this.notify();
  }

  /** Count shown in the badge: live while streaming, server total after. */
  get badgeCount(): number {
    return this.summary ? this.summary.solutions : this.solutions.length;
  }

  mergeTree(tree: SolutionTree): void {
    for (const n of tree.nodes) {
      if (!this.nodes.has(n.id)) this.nodes.set(n.id, n);
    }
    for (const e of tree.edges) {
      if (!this.edges.has(e.id)) this.edges.set(e.id, e);
    }
    this.notify();
  }

  hasExpansion(nodeId: number): boolean {
    return this.expansions.has(nodeId);
  }

  /**
   * Merge a fetched neighborhood into the diagram. Returns how many
   * nodes and edges were actually new; zero both ways means the click
   * changed nothing (already expanded, or the node has no neighbors).
   */
  mergeNeighborhood(hood: Neighborhood): { newNodes: number; newEdges: number } {
    this.expansions.set(hood.node.id, hood);
    let newNodes = 0;
    let newEdges = 0;
    if (!this.nodes.has(hood.node.id)) {
      this.nodes.set(hood.node.id, hood.node);
      newNodes++;
    }
    for (const row of hood.neighbors) {
      if (!this.nodes.has(row.node.id)) {
        this.nodes.set(row.node.id, row.node);
        newNodes++;
      }
      if (!this.edges.has(row.edge.id)) {
        this.edges.set(row.edge.id, row.edge);
        newEdges++;
      }
    }
    if (newNodes || newEdges) this.notify();
    return { newNodes, newEdges };
  }

  togglePin(nodeId: number): void {
    if (this.pinned.has(nodeId)) this.pinned.delete(nodeId);
    else this.pinned.add(nodeId);
    this.notify();
  }

  clearDiagram(): void {
    this.nodes.clear();
    this.edges.clear();
    this.expansions.clear();
    this.pinned.clear();
    this.notify();
  }

  diagramNodes(): NodeInfo[] {
    return [...this.nodes.values()];
  }

  diagramEdges(): EdgeInfo[] {
    return [...this.edges.values()];
  }

  /** Distinct source ids seen anywhere this session, for the legend. */
  sourcesSeen(): string[] {
    const seen = new Set<string>();
    for (const tree of this.solutions) {
      for (const n of tree.nodes) seen.add(n.source);
    }
    for (const n of this.nodes.values()) seen.add(n.source);
    return [...seen].sort();
  }
}

/**
 * Drives one query stream at a time. Starting a new query aborts the
 * previous connection; the server cancels the old search when the
 * socket drops. A generation counter keeps a superseded stream from
 * writing into state the new query has already reset.
 */
export class QueryRunner {
  private ctrl: AbortController | null = null;
  private generation = 0;

  constructor(private client: Client, private model: SessionModel) {}

  get active(): boolean {
    return this.ctrl !== null;
  }

  cancel(): void {
    this.ctrl?.abort();
    this.ctrl = null;
  }

  async run(req: QueryRequest): Promise<void> {
    this.ctrl?.abort();
    const ctrl = new AbortController();
    this.ctrl = ctrl;
    const gen = ++this.generation;
    const mine = () => gen === this.generation;

    this.model.beginQuery(req.keywords);
    let sawSummary = false;
    try {
      for await (const ev of this.client.query(req, ctrl.signal)) {
        if (!mine()) return;
        if (ev.kind === 'solution') {
          this.model.addSolution(ev);
        } else if (ev.kind === 'summary') {
          sawSummary = true;
          this.model.finishQuery(ev.stats);
        } else {
          sawSummary = true;
          this.model.failQuery(ev.detail);
        }
      }
      if (mine() && !sawSummary && !ctrl.signal.aborted) {
        this.model.failQuery('stream ended before the summary arrived');
      }
    } catch (err) {
      if (!mine() || ctrl.signal.aborted) return;
      if (err instanceof ApiError) {
        this.model.failQuery(err.message);
      } else {
        this.model.failQuery(err instanceof Error ? err.message : String(err));
      }
    } finally {
      if (this.ctrl === ctrl) this.ctrl = null;
    }
  }
}
