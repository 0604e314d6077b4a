"""Entity extraction over text values.

The default extractor is deliberately simple and deterministic: exact
gazetteer lookups (confidence 1.0) plus a capitalized-sequence heuristic
(confidence 0.6). Anything callable with the same signature can replace it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

PERSON = "Person"
ORGANIZATION = "Organization"
LOCATION = "Location"

GAZETTEER_CONFIDENCE = 1.0
HEURISTIC_CONFIDENCE = 0.6

# Tokens that mark a capitalized sequence as an organization name.
_ORG_MARKERS = {
    "inc", "corp", "corporation", "ltd", "llc", "gmbh", "group", "company",
    "association", "institute", "university", "agency", "laboratories",
}

# Two or more adjacent capitalized words ("ABC Pharma", "Lung Institute").
_CAP_SEQUENCE_RE = re.compile(r"\b[A-Z][A-Za-z]*(?: [A-Z][A-Za-z]*)+\b")


@dataclass(frozen=True)
class ExtractedEntity:
    entity_type: str
    surface: str
    confidence: float


class ExtractionError(Exception):
    """Raised by extractors on unprocessable input."""


Extractor = Callable[[str], "list[ExtractedEntity]"]


class GazetteerExtractor:
    """Gazetteer matches first; heuristic hits that overlap them are dropped."""

    def __init__(self, gazetteers: Mapping[str, Iterable[str]] | None = None,
                 heuristics: bool = True):
        self.heuristics = heuristics
        self._patterns: list[tuple[re.Pattern[str], str]] = []
        for entity_type, surfaces in (gazetteers or {}).items():
            for surface in surfaces:
                surface = surface.strip()
                if not surface:
                    continue
                pattern = re.compile(
                    r"(?<!\w)" + re.escape(surface) + r"(?!\w)", re.IGNORECASE
                )
                self._patterns.append((pattern, entity_type))

    def __call__(self, text: str) -> list[ExtractedEntity]:
        hits: list[tuple[int, int, str, float]] = []
        taken: list[tuple[int, int]] = []
        for pattern, entity_type in self._patterns:
            for match in pattern.finditer(text):
                span = match.span()
                hits.append((span[0], span[1], entity_type, GAZETTEER_CONFIDENCE))
                taken.append(span)
        if self.heuristics:
            for match in _CAP_SEQUENCE_RE.finditer(text):
                start, end = match.span()
                if any(start < t_end and t_start < end for t_start, t_end in taken):
                    continue
                words = {w.lower() for w in match.group().split()}
                kind = ORGANIZATION if words & _ORG_MARKERS else PERSON
                hits.append((start, end, kind, HEURISTIC_CONFIDENCE))
        hits.sort(key=lambda h: (h[0], h[1], h[2]))
        return [
            ExtractedEntity(entity_type, text[start:end], confidence)
            for start, end, entity_type, confidence in hits
        ]


def load_gazetteers(paths: Mapping[str, str]) -> dict[str, list[str]]:
    """Read gazetteer files: one surface form per line, UTF-8."""
    loaded: dict[str, list[str]] = {}
    for entity_type, path in paths.items():
        with open(path, encoding="utf-8") as handle:
            surfaces = [line.strip() for line in handle]
        loaded[entity_type] = [s for s in surfaces if s]
    return loaded
