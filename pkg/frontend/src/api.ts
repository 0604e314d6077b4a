// Typed client for the graphlens HTTP API. The server streams query
// results as NDJSON, one JSON object per line; everything else is
// plain JSON request/response.

export interface NodeInfo {
  id: number;
  label: string;
  kind: string;
  source: string;
  representative?: number;
}

export interface EdgeInfo {
  id: number;
  source: number;
  target: number;
  kind: string;
  label: string;
  confidence: number;
  specificity: number;
}

export interface SolutionTree {
  root: number;
  size: number;
  sources: number;
  nodes: NodeInfo[];
  edges: EdgeInfo[];
}

export interface SearchSummary {
  keywords: string[];
  workers: number;
  solutions: number;
  trees_built: number;
  total_ms: number;
  t_first_ms: number | null;
  t_last_ms: number | null;
  timed_out: boolean;
  [extra: string]: unknown;
}

export type StreamEvent =
  | ({ kind: 'solution' } & SolutionTree)
  | { kind: 'summary'; stats: SearchSummary }
  | { kind: 'error'; detail: string };

export interface NeighborRow {
  edge: EdgeInfo;
  node: NodeInfo;
}

export interface Neighborhood {
  node: NodeInfo;
  neighbors: NeighborRow[];
  degree: number;
  truncated: boolean;
}

export interface GraphStats {
  nodes: number;
  edges: number;
  sources: number;
  entities: Record<string, number>;
  nodeKinds: Record<string, number>;
}

export interface QueryRequest {
  keywords: string[];
  maxSolutions?: number;
  timeoutMs?: number;
  workers?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === 'string') return body.detail;
  } catch {
    // non-JSON error body, fall through
  }
  return `${res.status} ${res.statusText}`;
}

export class Client {
  constructor(readonly base: string = '') {}

  private url(path: string): string {
    return this.base.replace(/\/$/, '') + path;
  }

  async health(): Promise<{ status: string; graphLoaded: boolean }> {
    const res = await fetch(this.url('/healthz'));
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return res.json();
  }

  async stats(): Promise<GraphStats> {
    const res = await fetch(this.url('/stats'));
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return res.json();
  }

  async neighbors(nodeId: number, limit = 50): Promise<Neighborhood> {
    const res = await fetch(this.url(`/nodes/${nodeId}/neighbors?limit=${limit}`));
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return res.json();
  }

  /**
   * POST /query and yield stream events as they arrive.
   *
   * Lines may be split across network chunks, so bytes are buffered
   * until a newline completes a record. Aborting the signal tears down
   * the connection, which is how the server learns to cancel the search.
   */
  async *query(req: QueryRequest, signal?: AbortSignal): AsyncGenerator<StreamEvent> {
    const res = await fetch(this.url('/query'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
      signal,
    });
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    if (!res.body) throw new ApiError(0, 'response has no body stream');

    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buf = '';
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buf += decoder.decode(value, { stream: true });
        let nl: number;
        while ((nl = buf.indexOf('\n')) >= 0) {
          const line = buf.slice(0, nl);
          buf = buf.slice(nl + 1);
          if (line.trim()) yield JSON.parse(line) as StreamEvent;
        }
      }
      buf += decoder.decode();
      if (buf.trim()) yield JSON.parse(buf) as StreamEvent;
    } finally {
      // releases the connection when the consumer stops early
      reader.cancel().catch(() => {});
    }
  }
}
