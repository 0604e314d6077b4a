// @vitest-environment happy-dom
import { afterEach, describe, expect, it } from 'vitest';
import { SessionModel } from '../src/model';
import { DiagramView, edgeClass, makeSourceColor, renderLegend, renderSolutionCard } from '../src/render';
import { neighborhood, solutionsOf, streamEvents, summaryOf } from './fixtures';

function svgElement(): SVGSVGElement {
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  document.body.appendChild(svg);
  return svg as SVGSVGElement;
}

let view: DiagramView | null = null;

afterEach(() => {
  view?.stop();
  view = null;
  document.body.innerHTML = '';
});

describe('solution cards', () => {
  it('renders the chain_4 stream as 16 cards and the badge total agrees', () => {
    const events = streamEvents('chain4_stream.ndjson');
    const solutions = solutionsOf(events);
    const list = document.createElement('div');
    document.body.appendChild(list);
    const colorFor = makeSourceColor();

    // cards appear one by one, the way the stream hands them over
    solutions.forEach((tree, i) => {
      renderSolutionCard(list, tree, i, colorFor);
      expect(list.querySelectorAll('.solution-card')).toHaveLength(i + 1);
    });

    expect(list.querySelectorAll('.solution-card')).toHaveLength(16);
    expect(summaryOf(events).solutions).toBe(16);
  });

  it('draws every edge and node of a solution', () => {
    const tree = solutionsOf(streamEvents('chain4_stream.ndjson'))[0];
    const list = document.createElement('div');
    document.body.appendChild(list);
    const card = renderSolutionCard(list, tree, 0, makeSourceColor());

    expect(card.querySelectorAll('svg line')).toHaveLength(tree.size);
    expect(card.querySelectorAll('svg circle')).toHaveLength(tree.nodes.length);
    expect(card.querySelector('.card-title')!.textContent).toContain(`${tree.size} edges`);
  });

  it('clicking a card hands the tree to the diagram callback', () => {
    const tree = solutionsOf(streamEvents('chain4_stream.ndjson'))[0];
    const list = document.createElement('div');
    document.body.appendChild(list);
    let got: unknown = null;
    const card = renderSolutionCard(list, tree, 0, makeSourceColor(), {
      onAddToDiagram: (t) => (got = t),
    });
    card.click();
    expect(got).toBe(tree);
  });
});

describe('merged diagram view', () => {
  it('shows the equivalence edges after expanding the star representative', () => {
    const model = new SessionModel();
    model.mergeNeighborhood(neighborhood('star42_neighbors_node0.json'));

    const svg = svgElement();
    view = new DiagramView(svg, makeSourceColor());
    view.update(model.diagramNodes(), model.diagramEdges(), model.pinned);

    const eqLines = svg.querySelectorAll('line.edge-equivalence');
    expect(eqLines).toHaveLength(3);
    expect(svg.querySelectorAll('g.diagram-node')).toHaveLength(model.diagramNodes().length);
  });

  it('re-rendering after a repeat expansion adds nothing', () => {
    const model = new SessionModel();
    model.mergeNeighborhood(neighborhood('star42_neighbors_node0.json'));
    const svg = svgElement();
    view = new DiagramView(svg, makeSourceColor());
    view.update(model.diagramNodes(), model.diagramEdges(), model.pinned);
    const nodeCount = svg.querySelectorAll('g.diagram-node').length;
    const lineCount = svg.querySelectorAll('line').length;

    model.mergeNeighborhood(neighborhood('star42_neighbors_node0.json'));
    view.update(model.diagramNodes(), model.diagramEdges(), model.pinned);
    expect(svg.querySelectorAll('g.diagram-node')).toHaveLength(nodeCount);
    expect(svg.querySelectorAll('line')).toHaveLength(lineCount);
  });

  it('solution trees and expansions merge into one picture without duplicates', () => {
    const model = new SessionModel();
    const starSolution = solutionsOf(streamEvents('star42_stream.ndjson'))[0];
    model.mergeTree(starSolution);
    model.mergeNeighborhood(neighborhood('star42_neighbors_node1.json'));

    const svg = svgElement();
    view = new DiagramView(svg, makeSourceColor());
    view.update(model.diagramNodes(), model.diagramEdges(), model.pinned);

    const rendered = svg.querySelectorAll('g.diagram-node');
    expect(rendered).toHaveLength(12);
    expect(svg.querySelectorAll('line.edge-equivalence').length).toBeGreaterThan(0);
  });
});

describe('legend and styling', () => {
  it('maps edge kinds to stable CSS classes', () => {
    expect(edgeClass('structure')).toBe('edge-structure');
    expect(edgeClass('sameAs')).toBe('edge-sameas');
    expect(edgeClass('equivalence')).toBe('edge-equivalence');
  });

  it('lists seen sources and how many are missing', () => {
    const box = document.createElement('div');
    document.body.appendChild(box);
    renderLegend(box, ['notice.xml', 'report.json'], 4, makeSourceColor());
    expect(box.querySelectorAll('.legend-item')).toHaveLength(3);
    expect(box.textContent).toContain('notice.xml');
    expect(box.textContent).toContain('2 more sources not on screen');
  });

  it('gives distinct sources distinct colors', () => {
    const colorFor = makeSourceColor();
    const a = colorFor('one.xml');
    const b = colorFor('two.json');
    expect(a).not.toBe(b);
    expect(colorFor('one.xml')).toBe(a);
  });
});
