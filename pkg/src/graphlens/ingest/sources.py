"""Mappers turning raw source content into graph nodes and edges.

Every mapper parses its input completely before touching the builder, so a
parse failure leaves the graph unchanged. Each mapper returns the created
nodes plus the text occurrences that are candidates for entity extraction,
tagged with the policy path and path model of the source.
"""

from __future__ import annotations

import csv
import io
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from html.parser import HTMLParser

from ..policy import PathModel
from ..store import EdgeKind, GraphBuilder, NodeKind


class IngestError(Exception):
    """Unparseable source content; nothing was added to the graph."""


@dataclass(frozen=True)
class TextOccurrence:
    node: int
    text: str
    path: str
    model: PathModel


@dataclass
class MappedSource:
    source_id: str
    model: PathModel
    nodes: list[int] = field(default_factory=list)
    texts: list[TextOccurrence] = field(default_factory=list)


# -- XML ---------------------------------------------------------------------


def _strip_ns(tag: str) -> str:
    # "{uri}local" -> "local"
    return tag.rsplit("}", 1)[-1]


def map_xml(builder: GraphBuilder, source_id: str, content: str) -> MappedSource:
    try:
        root = ET.fromstring(content)
    except ET.ParseError as err:
        raise IngestError(f"{source_id}: XML parse error: {err}") from None
    mapped = MappedSource(source_id, PathModel.HIERARCHICAL)

    def add_text(parent_node: int, text: str | None, path: str) -> None:
        if text is None:
            return
        value = text.strip()
        if not value:
            return
        node = builder.add_node(source_id, NodeKind.XML_TEXT, value)
        builder.add_edge(parent_node, node, EdgeKind.STRUCTURE)
        mapped.nodes.append(node)
        mapped.texts.append(TextOccurrence(node, value, path, mapped.model))

    def walk(element: ET.Element, path: str) -> int:
        tag = _strip_ns(element.tag)
        node = builder.add_node(source_id, NodeKind.XML_ELEMENT, tag)
        mapped.nodes.append(node)
        for name, value in element.attrib.items():
            attr_label = "@" + _strip_ns(name)
            attr_node = builder.add_node(source_id, NodeKind.XML_ELEMENT, attr_label)
            builder.add_edge(node, attr_node, EdgeKind.STRUCTURE)
            mapped.nodes.append(attr_node)
            add_text(attr_node, value, f"{path}.{attr_label}")
        add_text(node, element.text, path)
        for child in element:
            child_node = walk(child, f"{path}.{_strip_ns(child.tag)}")
            builder.add_edge(node, child_node, EdgeKind.STRUCTURE)
            add_text(node, child.tail, path)
        return node

    walk(root, _strip_ns(root.tag))
    return mapped


# -- JSON ---------------------------------------------------------------------


def _scalar_text(value: object) -> str:
    if isinstance(value, str):
        return value
    # json spelling for numbers, booleans and null
    return json.dumps(value)


def map_json(builder: GraphBuilder, source_id: str, content: str) -> MappedSource:
    try:
        document = json.loads(content)
    except json.JSONDecodeError as err:
        raise IngestError(f"{source_id}: JSON parse error: {err}") from None
    mapped = MappedSource(source_id, PathModel.HIERARCHICAL)

    def walk(value: object, path: str) -> int:
        if isinstance(value, dict):
            node = builder.add_node(source_id, NodeKind.JSON_OBJECT, "")
            mapped.nodes.append(node)
            for key, item in value.items():
                child_path = f"{path}.{key}" if path else key
                child = walk(item, child_path)
                builder.add_edge(node, child, EdgeKind.STRUCTURE, key)
        elif isinstance(value, list):
            # Array positions label the edges but stay out of policy paths.
            node = builder.add_node(source_id, NodeKind.JSON_ARRAY, "")
            mapped.nodes.append(node)
            for position, item in enumerate(value):
                child = walk(item, path)
                builder.add_edge(node, child, EdgeKind.STRUCTURE, str(position))
        else:
            text = _scalar_text(value)
            node = builder.add_node(source_id, NodeKind.JSON_VALUE, text)
            mapped.nodes.append(node)
            mapped.texts.append(TextOccurrence(node, text, path, mapped.model))
        return node

    walk(document, "")
    return mapped


# -- HTML -----------------------------------------------------------------------


_VOID_TAGS = {"area", "base", "br", "col", "embed", "hr", "img", "input",
              "link", "meta", "source", "track", "wbr"}
_DROPPED_TAGS = {"script", "style"}


class _DomNode:
    __slots__ = ("tag", "attrs", "children", "chunks")

    def __init__(self, tag: str, attrs: list[tuple[str, str | None]]):
        self.tag = tag
        self.attrs = attrs
        # children mixes _DomNode instances and text chunks in order
        self.children: list[object] = []
        self.chunks: list[str] = []


class _HtmlDomParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = _DomNode("#document", [])
        self._stack = [self.root]
        self._dropping = 0

    def handle_starttag(self, tag, attrs):
        if tag in _DROPPED_TAGS:
            self._dropping += 1
            return
        if self._dropping:
            return
        node = _DomNode(tag, attrs)
        self._stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        if self._dropping or tag in _DROPPED_TAGS:
            return
        self._stack[-1].children.append(_DomNode(tag, attrs))

    def handle_endtag(self, tag):
        if tag in _DROPPED_TAGS:
            self._dropping = max(0, self._dropping - 1)
            return
        if self._dropping or tag in _VOID_TAGS:
            return
        for depth in range(len(self._stack) - 1, 0, -1):
            if self._stack[depth].tag == tag:
                del self._stack[depth:]
                break

    def handle_data(self, data):
        if self._dropping:
            return
        text = data.strip()
        if text:
            self._stack[-1].children.append(text)


def map_html(builder: GraphBuilder, source_id: str, content: str) -> MappedSource:
    parser = _HtmlDomParser()
    try:
        parser.feed(content)
        parser.close()
    except Exception as err:  # html.parser is lenient; be safe anyway
        raise IngestError(f"{source_id}: HTML parse error: {err}") from None
    mapped = MappedSource(source_id, PathModel.HIERARCHICAL)

    def emit(dom: _DomNode, path: str) -> int:
        node = builder.add_node(source_id, NodeKind.HTML_ELEMENT, dom.tag)
        mapped.nodes.append(node)
        for name, value in dom.attrs:
            attr_label = "@" + name
            attr_node = builder.add_node(source_id, NodeKind.HTML_ELEMENT, attr_label)
            builder.add_edge(node, attr_node, EdgeKind.STRUCTURE)
            mapped.nodes.append(attr_node)
            if value:
                text_node = builder.add_node(source_id, NodeKind.XML_TEXT, value)
                builder.add_edge(attr_node, text_node, EdgeKind.STRUCTURE)
                mapped.nodes.append(text_node)
                mapped.texts.append(
                    TextOccurrence(text_node, value, f"{path}.{attr_label}", mapped.model)
                )
        for child in dom.children:
            if isinstance(child, _DomNode):
                child_node = emit(child, f"{path}.{child.tag}")
                builder.add_edge(node, child_node, EdgeKind.STRUCTURE)
            else:
                text_node = builder.add_node(source_id, NodeKind.XML_TEXT, child)
                builder.add_edge(node, text_node, EdgeKind.STRUCTURE)
                mapped.nodes.append(text_node)
                mapped.texts.append(TextOccurrence(text_node, child, path, mapped.model))
        return node

    roots = [c for c in parser.root.children if isinstance(c, _DomNode)]
    if not roots:
        raise IngestError(f"{source_id}: no HTML elements found")
    for dom in roots:
        emit(dom, dom.tag)
    return mapped


# -- RDF (N-Triples subset) -------------------------------------------------------


_TRIPLE_RE = re.compile(r"^(\S+)\s+<([^>]*)>\s+(.+?)\s*\.\s*$")
_LITERAL_RE = re.compile(r'^"((?:[^"\\]|\\.)*)"(?:\^\^<[^>]*>|@[A-Za-z0-9-]+)?$')
_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _unescape_literal(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            out.append(_ESCAPES.get(raw[i + 1], raw[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def map_rdf(builder: GraphBuilder, source_id: str, content: str) -> MappedSource:
    triples: list[tuple[str, str, tuple[str, str]]] = []
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _TRIPLE_RE.match(line)
        if not match:
            raise IngestError(f"{source_id}: line {lineno}: not a triple: {raw!r}")
        subject, predicate, obj = match.groups()
        if not (subject.startswith("<") and subject.endswith(">")):
            raise IngestError(f"{source_id}: line {lineno}: subject must be a URI")
        subject = subject[1:-1]
        if obj.startswith("<") and obj.endswith(">"):
            triples.append((subject, predicate, ("uri", obj[1:-1])))
        else:
            literal = _LITERAL_RE.match(obj)
            if not literal:
                raise IngestError(f"{source_id}: line {lineno}: malformed object: {obj!r}")
            triples.append((subject, predicate, ("literal", _unescape_literal(literal.group(1)))))

    mapped = MappedSource(source_id, PathModel.RDF)
    uri_nodes: dict[str, int] = {}
    literal_nodes: dict[str, int] = {}

    def uri_node(uri: str) -> int:
        node = uri_nodes.get(uri)
        if node is None:
            node = builder.add_node(source_id, NodeKind.RDF_RESOURCE, uri)
            uri_nodes[uri] = node
            mapped.nodes.append(node)
        return node

    for subject, predicate, (obj_kind, obj_value) in triples:
        subject_node = uri_node(subject)
        if obj_kind == "uri":
            object_node = uri_node(obj_value)
        else:
            object_node = literal_nodes.get(obj_value)
            if object_node is None:
                object_node = builder.add_node(source_id, NodeKind.RDF_LITERAL, obj_value)
                literal_nodes[obj_value] = object_node
                mapped.nodes.append(object_node)
                mapped.texts.append(
                    TextOccurrence(object_node, obj_value, predicate, mapped.model)
                )
        builder.add_edge(subject_node, object_node, EdgeKind.STRUCTURE, predicate)
    return mapped


# -- Relational (CSV with header) ----------------------------------------------------


def map_rel(builder: GraphBuilder, source_id: str, content: str,
            table: str) -> MappedSource:
    try:
        rows = list(csv.reader(io.StringIO(content)))
    except csv.Error as err:
        raise IngestError(f"{source_id}: CSV parse error: {err}") from None
    if not rows:
        raise IngestError(f"{source_id}: empty CSV, expected a header row")
    header = rows[0]
    mapped = MappedSource(source_id, PathModel.RELATIONAL)
    for index, row in enumerate(rows[1:]):
        row_node = builder.add_node(source_id, NodeKind.REL_ROW, f"{table}#{index}")
        mapped.nodes.append(row_node)
        for column, cell in zip(header, row):
            if not cell:
                continue
            value_node = builder.add_node(source_id, NodeKind.REL_VALUE, cell)
            builder.add_edge(row_node, value_node, EdgeKind.STRUCTURE, column)
            mapped.nodes.append(value_node)
            mapped.texts.append(
                TextOccurrence(value_node, cell, f"{table}.{column}", mapped.model)
            )
    return mapped
