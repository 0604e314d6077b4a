"""Portable on-disk graph format.

Layout: 8-byte magic (format version baked in), then sections. Each
section is a 4-byte ASCII tag, a u64 payload length, a u32 CRC32 of the
payload, and the payload itself. Everything is little-endian; strings live
in one UTF-8 string table and are referenced by index.

Sections: MANI manifest JSON, STRT string table, SRCS source ids, NODE
node table (source ref, representative), NMET node metadata (kind, label),
EDGE edge table (endpoints, specificity), EMET edge metadata (kind, label,
confidence), KIDX keyword index.

Loading rebuilds the graph through the normal freeze path, so adjacency
slots, specificity and the keyword index are derived exactly as at build
time; the stored specificity column doubles as an integrity check. Node
and edge ids are preserved. Saving a loaded snapshot reproduces every
section byte for byte except the manifest timestamp.
"""

from __future__ import annotations

import json
import struct
import time
import zlib

from .store import DEFAULT_STATIC_SLOTS, EdgeKind, FrozenGraph, GraphBuilder, NodeKind

MAGIC = b"GLSNAP01"
FORMAT_VERSION = 1

_SECTION_ORDER = (b"MANI", b"STRT", b"SRCS", b"NODE", b"NMET",
                  b"EDGE", b"EMET", b"KIDX")

_NODE_KINDS = tuple(NodeKind)
_EDGE_KINDS = tuple(EdgeKind)
_NODE_KIND_ORD = {kind: i for i, kind in enumerate(_NODE_KINDS)}
_EDGE_KIND_ORD = {kind: i for i, kind in enumerate(_EDGE_KINDS)}

_U32 = struct.Struct("<I")
_HEADER = struct.Struct("<8s")
_SECTION_HEADER = struct.Struct("<4sQI")
_NODE_ROW = struct.Struct("<II")
_NMET_ROW = struct.Struct("<BI")
_EDGE_ROW = struct.Struct("<IId")
_EMET_ROW = struct.Struct("<BId")


class SnapshotError(Exception):
    """Unreadable, corrupt, or version-incompatible snapshot."""


class _StringTable:
    def __init__(self):
        self._refs: dict[str, int] = {}
        self._strings: list[str] = []

    def ref(self, value: str) -> int:
        index = self._refs.get(value)
        if index is None:
            index = len(self._strings)
            self._refs[value] = index
            self._strings.append(value)
        return index

    def encode(self) -> bytes:
        out = bytearray(_U32.pack(len(self._strings)))
        for value in self._strings:
            raw = value.encode("utf-8")
            out += _U32.pack(len(raw))
            out += raw
        return bytes(out)


def _encode_sections(graph: FrozenGraph) -> dict[bytes, bytes]:
    strings = _StringTable()

    srcs = bytearray(_U32.pack(len(graph.sources)))
    for source in graph.sources:
        srcs += _U32.pack(strings.ref(source))

    node_rows = bytearray()
    nmet_rows = bytearray()
    for i in range(len(graph.nodes)):
        record = graph.nodes[i]
        node_rows += _NODE_ROW.pack(record.source_ref, record.representative)
        meta = graph.node_meta[i]
        nmet_rows += _NMET_ROW.pack(_NODE_KIND_ORD[meta.kind],
                                    strings.ref(meta.label))

    edge_rows = bytearray()
    emet_rows = bytearray()
    for i in range(len(graph.edges)):
        record = graph.edges[i]
        edge_rows += _EDGE_ROW.pack(record.source, record.target,
                                    record.specificity)
        meta = graph.edge_meta[i]
        emet_rows += _EMET_ROW.pack(_EDGE_KIND_ORD[meta.kind],
                                    strings.ref(meta.label), meta.confidence)

    tokens = list(graph.index_tokens())
    kidx = bytearray(_U32.pack(len(tokens)))
    for token in tokens:
        nodes = sorted(graph.lookup(token))
        kidx += _U32.pack(strings.ref(token))
        kidx += _U32.pack(len(nodes))
        for node in nodes:
            kidx += _U32.pack(node)

    manifest = {
        "format_version": FORMAT_VERSION,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "node_count": len(graph.nodes),
        "edge_count": len(graph.edges),
        "source_count": len(graph.sources),
        "static_slots": graph.static_slots,
    }

    return {
        b"MANI": json.dumps(manifest, sort_keys=True).encode("utf-8"),
        b"STRT": strings.encode(),
        b"SRCS": bytes(srcs),
        b"NODE": bytes(node_rows),
        b"NMET": bytes(nmet_rows),
        b"EDGE": bytes(edge_rows),
        b"EMET": bytes(emet_rows),
        b"KIDX": bytes(kidx),
    }


def save_snapshot(graph: FrozenGraph, path) -> None:
    sections = _encode_sections(graph)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC))
        for tag in _SECTION_ORDER:
            payload = sections[tag]
            fh.write(_SECTION_HEADER.pack(tag, len(payload),
                                          zlib.crc32(payload)))
            fh.write(payload)


class _Reader:
    def __init__(self, payload: bytes, tag: str):
        self.data = payload
        self.pos = 0
        self.tag = tag

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise SnapshotError(f"section {self.tag} ends prematurely")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def done(self) -> None:
        if self.pos != len(self.data):
            raise SnapshotError(f"section {self.tag} has trailing bytes")


def _read_sections(raw: bytes) -> dict[bytes, bytes]:
    if len(raw) < len(MAGIC):
        raise SnapshotError("not a snapshot file (too short)")
    magic = raw[:len(MAGIC)]
    if magic != MAGIC:
        if magic[:6] == MAGIC[:6]:
            raise SnapshotError(
                f"unsupported snapshot version {magic[6:].decode('ascii', 'replace')}")
        raise SnapshotError("not a snapshot file (bad magic)")

    sections: dict[bytes, bytes] = {}
    pos = len(MAGIC)
    while pos < len(raw):
        if pos + _SECTION_HEADER.size > len(raw):
            raise SnapshotError("truncated section header")
        tag, length, crc = _SECTION_HEADER.unpack_from(raw, pos)
        pos += _SECTION_HEADER.size
        if pos + length > len(raw):
            raise SnapshotError(f"truncated section {tag.decode('ascii', 'replace')}")
        payload = raw[pos:pos + length]
        pos += length
        if zlib.crc32(payload) != crc:
            raise SnapshotError(f"checksum mismatch in section "
                                f"{tag.decode('ascii', 'replace')}")
        if tag in sections:
            raise SnapshotError(f"duplicate section {tag.decode('ascii', 'replace')}")
        sections[tag] = payload
    missing = [t.decode() for t in _SECTION_ORDER if t not in sections]
    if missing:
        raise SnapshotError(f"missing sections: {', '.join(missing)}")
    return sections


def _decode_strings(payload: bytes) -> list[str]:
    reader = _Reader(payload, "STRT")
    count = reader.u32()
    strings = []
    for _ in range(count):
        length = reader.u32()
        strings.append(reader.take(length).decode("utf-8"))
    reader.done()
    return strings


def load_snapshot(path) -> FrozenGraph:
    with open(path, "rb") as fh:
        raw = fh.read()
    sections = _read_sections(raw)

    try:
        manifest = json.loads(sections[b"MANI"].decode("utf-8"))
    except ValueError as exc:
        raise SnapshotError(f"bad manifest: {exc}") from None
    if manifest.get("format_version") != FORMAT_VERSION:
        raise SnapshotError(
            f"unsupported format_version {manifest.get('format_version')!r}")

    strings = _decode_strings(sections[b"STRT"])

    def string_at(ref: int) -> str:
        if not 0 <= ref < len(strings):
            raise SnapshotError(f"string reference {ref} out of range")
        return strings[ref]

    reader = _Reader(sections[b"SRCS"], "SRCS")
    sources = [string_at(reader.u32()) for _ in range(reader.u32())]
    reader.done()

    n_nodes = manifest.get("node_count", 0)
    n_edges = manifest.get("edge_count", 0)
    if len(sections[b"NODE"]) != n_nodes * _NODE_ROW.size:
        raise SnapshotError("node table size disagrees with manifest")
    if len(sections[b"NMET"]) != n_nodes * _NMET_ROW.size:
        raise SnapshotError("node metadata size disagrees with manifest")
    if len(sections[b"EDGE"]) != n_edges * _EDGE_ROW.size:
        raise SnapshotError("edge table size disagrees with manifest")
    if len(sections[b"EMET"]) != n_edges * _EMET_ROW.size:
        raise SnapshotError("edge metadata size disagrees with manifest")

    builder = GraphBuilder(
        static_slots=manifest.get("static_slots") or DEFAULT_STATIC_SLOTS)
    representatives = []
    for i in range(n_nodes):
        source_ref, representative = _NODE_ROW.unpack_from(
            sections[b"NODE"], i * _NODE_ROW.size)
        kind_ord, label_ref = _NMET_ROW.unpack_from(
            sections[b"NMET"], i * _NMET_ROW.size)
        if not 0 <= source_ref < len(sources):
            raise SnapshotError(f"node {i}: source reference out of range")
        if not 0 <= kind_ord < len(_NODE_KINDS):
            raise SnapshotError(f"node {i}: unknown node kind {kind_ord}")
        builder.add_node(sources[source_ref], _NODE_KINDS[kind_ord],
                         string_at(label_ref))
        representatives.append(representative)

    stored_specificity = []
    for i in range(n_edges):
        src, dst, specificity = _EDGE_ROW.unpack_from(
            sections[b"EDGE"], i * _EDGE_ROW.size)
        kind_ord, label_ref, confidence = _EMET_ROW.unpack_from(
            sections[b"EMET"], i * _EMET_ROW.size)
        if not 0 <= kind_ord < len(_EDGE_KINDS):
            raise SnapshotError(f"edge {i}: unknown edge kind {kind_ord}")
        builder.add_edge(src, dst, _EDGE_KINDS[kind_ord],
                         string_at(label_ref), confidence)
        stored_specificity.append(specificity)

    for node, representative in enumerate(representatives):
        if representative != node:
            if not 0 <= representative < n_nodes:
                raise SnapshotError(f"node {node}: representative out of range")
            builder.set_representative(node, representative)

    graph = builder.freeze()

    for i in range(n_edges):
        if graph.edges[i].specificity != stored_specificity[i]:
            raise SnapshotError(
                f"edge {i}: stored specificity disagrees with graph structure")
    return graph
