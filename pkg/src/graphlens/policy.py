"""Extraction policies: rules deciding which text values feed the extractor.

A policy file is line oriented. Each non-empty, non-comment line reads

    <context> force <EntityType>
    <context> skip
    <context> skipAll

where <context> is a data-model path: a rooted dot path for hierarchical
sources (XML, JSON, HTML), ``table.column`` for relational sources, or a
property name for RDF sources. ``#`` starts a comment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

ENTITY_TYPE_NAMES = ("Person", "Organization", "Location")

FORCE = "force"
SKIP = "skip"
SKIP_ALL = "skipAll"
DEFAULT = "default"


class PathModel(enum.Enum):
    HIERARCHICAL = "hierarchical"
    RELATIONAL = "relational"
    RDF = "rdf"


class PolicyParseError(ValueError):
    """Raised with the offending line number on malformed policy text."""


@dataclass(frozen=True)
class PolicyRule:
    context: str
    action: str
    entity_type: str | None
    line: int


@dataclass(frozen=True)
class ResolvedAction:
    action: str  # DEFAULT, SKIP or FORCE
    entity_type: str | None = None


_DEFAULT_ACTION = ResolvedAction(DEFAULT)
_SKIP_ACTION = ResolvedAction(SKIP)


def _parent_path(context: str) -> str:
    head, _, _ = context.rpartition(".")
    return head


class ExtractionPolicy:
    """Compiled rule list with precedence force > skipAll > skip > default."""

    def __init__(self, rules: tuple[PolicyRule, ...]):
        self.rules = rules
        self._force = {}
        self._skip = set()
        self._skip_all = []
        for rule in rules:
            if rule.action == FORCE:
                # A later force line for the same context never wins.
                self._force.setdefault(rule.context, rule.entity_type)
            elif rule.action == SKIP:
                self._skip.add(rule.context)
            else:
                self._skip_all.append(rule.context)

    def resolve(self, path: str, model: PathModel) -> ResolvedAction:
        """Action for the text value at `path` in a source of class `model`."""
        forced = self._force.get(path)
        if forced is not None:
            return ResolvedAction(FORCE, forced)
        for context in self._skip_all:
            if model is PathModel.HIERARCHICAL:
                # skipAll covers the matched node, its siblings and every
                # descendant of the matched node's parent.
                parent = _parent_path(context)
                if not parent or path.startswith(parent + "."):
                    return _SKIP_ACTION
            elif path == context:
                # Non-hierarchical models have no sibling structure to
                # widen over; skipAll degrades to skip.
                return _SKIP_ACTION
        if path in self._skip:
            return _SKIP_ACTION
        return _DEFAULT_ACTION


EMPTY_POLICY = ExtractionPolicy(())


def parse_policy_text(text: str) -> ExtractionPolicy:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise PolicyParseError(f"line {lineno}: expected '<context> <action>', got {raw!r}")
        context, action = parts[0], parts[1]
        if action == FORCE:
            if len(parts) != 3:
                raise PolicyParseError(f"line {lineno}: force requires an entity type")
            entity_type = parts[2]
            if entity_type not in ENTITY_TYPE_NAMES:
                raise PolicyParseError(
                    f"line {lineno}: unknown entity type {entity_type!r}; "
                    f"expected one of {', '.join(ENTITY_TYPE_NAMES)}"
                )
            rules.append(PolicyRule(context, FORCE, entity_type, lineno))
        elif action in (SKIP, SKIP_ALL):
            if len(parts) != 2:
                raise PolicyParseError(f"line {lineno}: {action} takes no arguments")
            rules.append(PolicyRule(context, action, None, lineno))
        else:
            raise PolicyParseError(f"line {lineno}: unknown action {action!r}")
    return ExtractionPolicy(tuple(rules))


def parse_policy_file(path: str) -> ExtractionPolicy:
    with open(path, encoding="utf-8") as handle:
        try:
            return parse_policy_text(handle.read())
        except PolicyParseError as err:
            raise PolicyParseError(f"{path}: {err}") from None
