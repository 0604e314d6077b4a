// Loads captured server responses. Every fixture here is verbatim
// output of a real graphlens server (see fixtures/README.md), so the
// tests exercise the exact wire format.
import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import type { Neighborhood, SearchSummary, SolutionTree, StreamEvent } from '../src/api';

// vitest runs with the package root as cwd; import.meta.url is not
// usable here because the DOM test environment rewrites it
function fixturePath(name: string): string {
  return join(process.cwd(), 'tests', 'fixtures', name);
}

export function fixtureText(name: string): string {
  return readFileSync(fixturePath(name), 'utf8');
}

export function fixtureJson<T>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

export function streamEvents(name: string): StreamEvent[] {
  return fixtureText(name)
    .split('\n')
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as StreamEvent);
}

export function solutionsOf(events: StreamEvent[]): SolutionTree[] {
  return events.filter((e): e is Extract<StreamEvent, { kind: 'solution' }> => e.kind === 'solution');
}

export function summaryOf(events: StreamEvent[]): SearchSummary {
  const ev = events.find((e) => e.kind === 'summary');
  if (!ev || ev.kind !== 'summary') throw new Error('fixture has no summary line');
  return ev.stats;
}

export function neighborhood(name: string): Neighborhood {
  return fixtureJson<Neighborhood>(name);
}
