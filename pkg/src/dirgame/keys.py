"""Canonical vertex-key encoding.

Vertex identifiers are opaque hashable values built from ints, strings and
(possibly nested) tuples: path words for tree families, coordinate vectors
for lattice families, ``(copy, label)`` pairs for chain families.  Payoff
sampling and serialization both need a stable byte/string form, so there is
exactly one canonical encoding: JSON with tuples rendered as arrays and no
whitespace.  It is injective on the key shapes the generators produce and
identical across runs and platforms.
"""

from __future__ import annotations

import json
from typing import Any

VertexId = Any


def _jsonable(v: VertexId):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, (int, str)):
        return v
    raise TypeError(f"unsupported vertex key component: {v!r}")


def _tupled(obj):
    if isinstance(obj, list):
        return tuple(_tupled(x) for x in obj)
    return obj


def key_str(v: VertexId) -> str:
    """Canonical printable form of a vertex key."""
    return json.dumps(_jsonable(v), separators=(",", ":"), ensure_ascii=True)


def key_bytes(v: VertexId) -> bytes:
    """Canonical byte form, the input to the payoff PRF."""
    return key_str(v).encode("ascii")


def parse_key(s: str) -> VertexId:
    """Inverse of key_str (JSON arrays come back as tuples)."""
    return _tupled(json.loads(s))
