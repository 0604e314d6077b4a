import { ApiError, Client } from './api';
import type { GraphStats, QueryRequest } from './api';
import { SessionModel, QueryRunner } from './model';
import { DiagramView, makeSourceColor, renderLegend, renderSolutionCard } from './render';
import './style.css';

// Hard cap on rendered cards; the model still holds every solution,
// only the DOM stops growing. Interactive queries use maxSolutions
// anyway, this just keeps an uncapped run from freezing the tab.
const MAX_CARDS = 300;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const serverInput = $<HTMLInputElement>('server-url');
const connectBtn = $<HTMLButtonElement>('connect');
const statsLine = $('stats-line');
const banner = $('banner');
const form = $<HTMLFormElement>('query-form');
const keywordsInput = $<HTMLInputElement>('keywords');
const maxInput = $<HTMLInputElement>('max-solutions');
const timeoutInput = $<HTMLInputElement>('timeout-ms');
const submitBtn = $<HTMLButtonElement>('submit-query');
const badge = $('count-badge');
const statusLine = $('status-line');
const solutionList = $('solution-list');
const legendBox = $('legend');
const clearBtn = $<HTMLButtonElement>('clear-diagram');
const diagramSvg = document.getElementById('diagram') as unknown as SVGSVGElement;
const toastBox = $('toasts');

let client = new Client(serverInput.value.trim());
const model = new SessionModel();
let runner = new QueryRunner(client, model);
const colorFor = makeSourceColor();
let stats: GraphStats | null = null;
let lastRequest: QueryRequest | null = null;
let renderedCards = 0;

const diagram = new DiagramView(diagramSvg, colorFor, {
  onExpand: (nodeId) => void expand(nodeId),
  onTogglePin: (nodeId) => model.togglePin(nodeId),
});

function toast(message: string): void {
  const el = document.createElement('div');
  el.className = 'toast';
  el.textContent = message;
  toastBox.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

function showBanner(message: string, retry: (() => void) | null): void {
  banner.replaceChildren();
  banner.classList.remove('hidden');
  banner.appendChild(document.createTextNode(message));
  if (retry) {
    const btn = document.createElement('button');
    btn.textContent = 'Retry';
    btn.addEventListener('click', () => {
      hideBanner();
      retry();
    });
    banner.appendChild(btn);
  }
}

function hideBanner(): void {
  banner.classList.add('hidden');
  banner.replaceChildren();
}

async function connect(): Promise<void> {
  client = new Client(serverInput.value.trim());
  runner.cancel();
  runner = new QueryRunner(client, model);
  statsLine.textContent = 'connecting…';
  try {
    stats = await client.stats();
    statsLine.textContent = `${stats.nodes} nodes, ${stats.edges} edges, ${stats.sources} source${stats.sources === 1 ? '' : 's'}`;
    hideBanner();
  } catch (err) {
    stats = null;
    statsLine.textContent = 'not connected';
    if (err instanceof ApiError && err.status === 409) {
      showBanner('The server has no graph loaded. Load a snapshot (serve --snapshot FILE) and retry.', () => void connect());
    } else {
      showBanner(`Cannot reach ${client.base || 'the server'}: ${err instanceof Error ? err.message : err}`, () => void connect());
    }
  }
  refreshLegend();
}

function refreshLegend(): void {
  renderLegend(legendBox, model.sourcesSeen(), stats ? stats.sources : null, colorFor);
}

function refreshStatus(): void {
  badge.textContent = String(model.badgeCount);
  switch (model.phase) {
    case 'idle':
      statusLine.textContent = 'no query yet';
      break;
    case 'streaming':
      statusLine.textContent = `streaming… ${model.solutions.length} so far`;
      break;
    case 'done': {
      const s = model.summary;
      const ms = s && s.t_first_ms !== null ? `, first in ${s.t_first_ms.toFixed(1)} ms` : '';
      const cut = s && s.timed_out ? ' (timed out)' : '';
      statusLine.textContent = `${model.badgeCount} solution${model.badgeCount === 1 ? '' : 's'}${ms}${cut}`;
      break;
    }
    case 'failed':
      statusLine.textContent = `query failed: ${model.lastError}`;
      if (lastRequest) {
        const req = lastRequest;
        showBanner(`Query failed: ${model.lastError}`, () => void runner.run(req));
      }
      break;
  }
}

function refreshSolutions(): void {
  if (model.solutions.length < renderedCards) {
    solutionList.replaceChildren();
    renderedCards = 0;
  }
  while (renderedCards < model.solutions.length && renderedCards < MAX_CARDS) {
    const tree = model.solutions[renderedCards];
    renderSolutionCard(solutionList, tree, renderedCards, colorFor, {
      onAddToDiagram: (t) => {
        model.mergeTree(t);
        toast(`added solution to the diagram (root ${t.root})`);
      },
    });
    renderedCards++;
  }
  if (model.solutions.length > MAX_CARDS && !solutionList.querySelector('.card-overflow')) {
    const note = document.createElement('div');
    note.className = 'card-overflow';
    note.textContent = `showing first ${MAX_CARDS} of the stream`;
    solutionList.appendChild(note);
  }
}

async function expand(nodeId: number): Promise<void> {
  if (model.hasExpansion(nodeId)) {
    // repeat click: the cache says nothing new can arrive
    toast('already expanded');
    return;
  }
  try {
    const hood = await client.neighbors(nodeId);
    const { newNodes, newEdges } = model.mergeNeighborhood(hood);
    if (newNodes === 0 && newEdges === 0) {
      toast(`node ${nodeId} has nothing new to show`);
    } else if (hood.truncated) {
      toast(`showing first ${hood.neighbors.length} of ${hood.degree} neighbors`);
    }
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      toast(`node ${nodeId} is unknown to the server`);
    } else {
      showBanner(`Expansion failed: ${err instanceof Error ? err.message : err}`, null);
    }
  }
}

model.onChange = () => {
  refreshStatus();
  refreshSolutions();
  diagram.update(model.diagramNodes(), model.diagramEdges(), model.pinned);
  refreshLegend();
};

keywordsInput.addEventListener('input', () => {
  submitBtn.disabled = keywordsInput.value.trim() === '';
});

form.addEventListener('submit', (event) => {
  event.preventDefault();
  const keywords = keywordsInput.value
    .split(/[,\s]+/)
    .map((k) => k.trim())
    .filter(Boolean);
  if (keywords.length === 0) return;
  hideBanner();
  const req: QueryRequest = { keywords };
  const max = parseInt(maxInput.value, 10);
  if (Number.isFinite(max) && max > 0) req.maxSolutions = max;
  const timeout = parseInt(timeoutInput.value, 10);
  if (Number.isFinite(timeout) && timeout >= 0) req.timeoutMs = timeout;
  lastRequest = req;
  void runner.run(req);
});

clearBtn.addEventListener('click', () => model.clearDiagram());
connectBtn.addEventListener('click', () => void connect());

submitBtn.disabled = keywordsInput.value.trim() === '';
void connect();
