import * as d3 from 'd3';
import type { EdgeInfo, NodeInfo, SolutionTree } from './api';

// Edge kinds arrive as "structure" / "extraction" / "sameAs" /
// "equivalence"; lowercased they double as CSS class suffixes.
export function edgeClass(kind: string): string {
  return 'edge-' + kind.toLowerCase().replace(/[^a-z]/g, '');
}

export type SourceColor = (source: string) => string;

export function makeSourceColor(): SourceColor {
  const scale = d3.scaleOrdinal<string, string>(d3.schemeTableau10);
  return (source: string) => scale(source);
}

function shortLabel(label: string, max = 18): string {
  if (label === '') return '""';
  return label.length > max ? label.slice(0, max - 1) + '…' : label;
}

interface LayoutDatum {
  node: NodeInfo;
  children: LayoutDatum[];
}

// Solutions are trees, so cards skip the force simulation and use a
// fixed tidy layout rooted at the server-reported root.
function buildHierarchy(tree: SolutionTree): LayoutDatum | null {
  const byId = new Map(tree.nodes.map((n) => [n.id, n]));
  const adj = new Map<number, number[]>();
  for (const e of tree.edges) {
    if (!adj.has(e.source)) adj.set(e.source, []);
    if (!adj.has(e.target)) adj.set(e.target, []);
    adj.get(e.source)!.push(e.target);
    adj.get(e.target)!.push(e.source);
  }
  const rootNode = byId.get(tree.root);
  if (!rootNode) return null;
  const visited = new Set<number>([tree.root]);
  const make = (id: number): LayoutDatum => {
    const datum: LayoutDatum = { node: byId.get(id)!, children: [] };
    for (const next of adj.get(id) ?? []) {
      if (!visited.has(next)) {
        visited.add(next);
        datum.children.push(make(next));
      }
    }
    return datum;
  };
  return make(tree.root);
}

export interface CardCallbacks {
  onAddToDiagram?: (tree: SolutionTree) => void;
}

/** Append one solution card (mini node-link diagram) to the list. */
export function renderSolutionCard(
  list: HTMLElement,
  tree: SolutionTree,
  index: number,
  colorFor: SourceColor,
  callbacks: CardCallbacks = {},
): HTMLElement {
  const width = 210;
  const height = 140;

  const card = document.createElement('div');
  card.className = 'solution-card';
  card.dataset.index = String(index);

  const title = document.createElement('div');
  title.className = 'card-title';
  title.textContent = `#${index + 1} · ${tree.size} edges · ${tree.sources} source${tree.sources === 1 ? '' : 's'}`;
  card.appendChild(title);

  const svg = d3
    .select(card)
    .append('svg')
    .attr('viewBox', `0 0 ${width} ${height}`)
    .attr('width', width)
    .attr('height', height);

  const rootDatum = buildHierarchy(tree);
  if (rootDatum) {
    const hierarchy = d3.hierarchy(rootDatum, (d) => d.children);
    const layout = d3.tree<LayoutDatum>().size([width - 20, height - 30]);
    const laid = layout(hierarchy);
    const pos = new Map<number, { x: number; y: number }>();
    for (const d of laid.descendants()) {
      pos.set(d.data.node.id, { x: d.x + 10, y: d.y + 15 });
    }

    const g = svg.append('g');
    g.selectAll('line')
      .data(tree.edges)
      .join('line')
      .attr('class', (e) => 'edge ' + edgeClass(e.kind))
      .attr('x1', (e) => pos.get(e.source)?.x ?? 0)
      .attr('y1', (e) => pos.get(e.source)?.y ?? 0)
      .attr('x2', (e) => pos.get(e.target)?.x ?? 0)
      .attr('y2', (e) => pos.get(e.target)?.y ?? 0);

    const nodeG = g
      .selectAll('g.card-node')
      .data(tree.nodes)
      .join('g')
      .attr('class', 'card-node')
      .attr('transform', (n) => {
        const p = pos.get(n.id);
        return p ? `translate(${p.x},${p.y})` : 'translate(0,0)';
      });
    nodeG
      .append('circle')
      .attr('r', (n) => (n.id === tree.root ? 6 : 4))
      .attr('fill', (n) => colorFor(n.source))
      .append('title')
      .text((n) => `${n.label} [${n.kind}] from ${n.source}`);
    nodeG
      .append('text')
      .attr('dy', -7)
      .text((n) => shortLabel(n.label, 10));
  }

  card.addEventListener('click', () => callbacks.onAddToDiagram?.(tree));
  list.appendChild(card);
  return card;
}

export interface DiagramCallbacks {
  onExpand?: (nodeId: number) => void;
  onTogglePin?: (nodeId: number) => void;
}

interface SimNode extends d3.SimulationNodeDatum {
  info: NodeInfo;
}

interface SimLink extends d3.SimulationLinkDatum<SimNode> {
  info: EdgeInfo;
}

/**
 * Force-directed view of the merged diagram. Owns its simulation and
 * keeps node positions across updates so expansion grows the picture
 * instead of reshuffling it. Click expands a node's neighborhood,
 * shift-click pins it in place.
 */
export class DiagramView {
  private svg: d3.Selection<SVGSVGElement, unknown, null, undefined>;
  private linkGroup: d3.Selection<SVGGElement, unknown, null, undefined>;
  private nodeGroup: d3.Selection<SVGGElement, unknown, null, undefined>;
  private simulation: d3.Simulation<SimNode, SimLink>;
  private simNodes = new Map<number, SimNode>();
  private width: number;
  private height: number;

  constructor(
    svgElement: SVGSVGElement,
    private colorFor: SourceColor,
    private callbacks: DiagramCallbacks = {},
  ) {
    this.svg = d3.select(svgElement);
    this.width = svgElement.clientWidth || 800;
    this.height = svgElement.clientHeight || 520;
    this.svg.selectAll('*').remove();
    const zoomTarget = this.svg.append('g').attr('class', 'zoom-root');
    this.linkGroup = zoomTarget.append('g').attr('class', 'links');
    this.nodeGroup = zoomTarget.append('g').attr('class', 'nodes');

    this.svg.call(
      d3
        .zoom<SVGSVGElement, unknown>()
        .scaleExtent([0.2, 5])
        .on('zoom', (event) => zoomTarget.attr('transform', event.transform)),
    );

    this.simulation = d3
      .forceSimulation<SimNode, SimLink>()
      .force('charge', d3.forceManyBody().strength(-260))
      .force('center', d3.forceCenter(this.width / 2, this.height / 2))
      .force(
        'link',
        d3
          .forceLink<SimNode, SimLink>()
          .id((d) => String(d.info.id))
          .distance(70),
      )
      .on('tick', () => this.tick());
  }

  update(nodes: NodeInfo[], edges: EdgeInfo[], pinned: Set<number>): void {
    for (const info of nodes) {
      const existing = this.simNodes.get(info.id);
      if (existing) {
        existing.info = info;
      } else {
        this.simNodes.set(info.id, {
          info,
          x: this.width / 2 + (Math.random() - 0.5) * 80,
          y: this.height / 2 + (Math.random() - 0.5) * 80,
        });
      }
    }
    for (const id of [...this.simNodes.keys()]) {
      if (!nodes.some((n) => n.id === id)) this.simNodes.delete(id);
    }
    const simNodes = [...this.simNodes.values()];
    for (const sn of simNodes) {
      if (pinned.has(sn.info.id)) {
        sn.fx = sn.x;
        sn.fy = sn.y;
      } else {
        sn.fx = null;
        sn.fy = null;
      }
    }
    const simLinks: SimLink[] = edges
      .filter((e) => this.simNodes.has(e.source) && this.simNodes.has(e.target))
      .map((e) => ({
        info: e,
        source: String(e.source),
        target: String(e.target),
      }));

    this.linkGroup
      .selectAll<SVGLineElement, SimLink>('line')
      .data(simLinks, (d) => String(d.info.id))
      .join('line')
      .attr('class', (d) => 'edge ' + edgeClass(d.info.kind))
      .select(function () {
        return this;
      });

    const nodeSel = this.nodeGroup
      .selectAll<SVGGElement, SimNode>('g.diagram-node')
      .data(simNodes, (d) => String(d.info.id));
    const entered = nodeSel
      .enter()
      .append('g')
      .attr('class', 'diagram-node')
      .on('click', (event: MouseEvent, d) => {
        if (event.shiftKey) this.callbacks.onTogglePin?.(d.info.id);
        else this.callbacks.onExpand?.(d.info.id);
      })
      .call(
        d3
          .drag<SVGGElement, SimNode>()
          .on('start', (event, d) => {
            if (!event.active) this.simulation.alphaTarget(0.3).restart();
            d.fx = d.x;
            d.fy = d.y;
          })
          .on('drag', (event, d) => {
            d.fx = event.x;
            d.fy = event.y;
          })
          .on('end', (event, d) => {
            if (!event.active) this.simulation.alphaTarget(0);
            if (!pinned.has(d.info.id)) {
              d.fx = null;
              d.fy = null;
            }
          }),
      );
    entered.append('circle').attr('r', 8);
    entered.append('text').attr('dy', -11);
    entered.append('title');

    const merged = entered.merge(nodeSel);
    merged
      .classed('pinned', (d) => pinned.has(d.info.id))
      .select('circle')
      .attr('fill', (d) => this.colorFor(d.info.source));
    merged.select('text').text((d) => shortLabel(d.info.label));
    merged
      .select('title')
      .text((d) => `${d.info.label} [${d.info.kind}] from ${d.info.source}\nclick: expand, shift-click: pin`);
    nodeSel.exit().remove();

    this.simulation.nodes(simNodes);
    this.simulation.force<d3.ForceLink<SimNode, SimLink>>('link')!.links(simLinks);
    this.simulation.alpha(0.6).restart();
  }

  private tick(): void {
    this.linkGroup
      .selectAll<SVGLineElement, SimLink>('line')
      .attr('x1', (d) => (d.source as SimNode).x ?? 0)
      .attr('y1', (d) => (d.source as SimNode).y ?? 0)
      .attr('x2', (d) => (d.target as SimNode).x ?? 0)
      .attr('y2', (d) => (d.target as SimNode).y ?? 0);
    this.nodeGroup
      .selectAll<SVGGElement, SimNode>('g.diagram-node')
      .attr('transform', (d) => `translate(${d.x ?? 0},${d.y ?? 0})`);
  }

  stop(): void {
    this.simulation.stop();
  }
}

/** Swatch list mapping source ids to their node color. */
export function renderLegend(
  container: HTMLElement,
  sources: string[],
  totalSources: number | null,
  colorFor: SourceColor,
): void {
  container.replaceChildren();
  for (const source of sources) {
    const item = document.createElement('span');
    item.className = 'legend-item';
    const dot = document.createElement('span');
    dot.className = 'legend-dot';
    dot.style.backgroundColor = colorFor(source);
    item.appendChild(dot);
    item.appendChild(document.createTextNode(source));
    container.appendChild(item);
  }
  if (totalSources !== null && sources.length < totalSources) {
    const rest = document.createElement('span');
    rest.className = 'legend-item legend-rest';
    rest.textContent = `${totalSources - sources.length} more source${totalSources - sources.length === 1 ? '' : 's'} not on screen`;
    container.appendChild(rest);
  }
}
