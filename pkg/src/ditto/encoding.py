"""Canonical serialization and deterministic hash-derived randomness.

Everything that crosses the wire or lands in the journal goes through
``canonical_json`` so that two independent implementations (or two runs)
produce byte-identical text. Numbers are the tricky part: integers are
emitted bare, floats are formatted to six decimal places and trimmed, so a
value survives serialize -> parse -> serialize unchanged as long as it is
representable in millionths. All mock randomness is therefore kept in
integer millionths.
"""

import hashlib
import json

MILLION = 1_000_000

_SEP = b"\x1f"


def format_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("bool is not a JSON number here")
    if isinstance(x, int):
        return str(x)
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    if s in ("-0", ""):
        return "0"
    return s


def canonical_json(obj) -> str:
    """Serialize with sorted keys, no whitespace, and canonical numbers."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(k, ensure_ascii=True) + ":" + canonical_json(v) for k, v in items) + "}"
    raise TypeError(f"not canonically serializable: {type(obj)!r}")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _digest(*parts) -> bytes:
    h = hashlib.sha256()
    first = True
    for p in parts:
        if not first:
            h.update(_SEP)
        first = False
        if isinstance(p, bytes):
            h.update(p)
        else:
            h.update(str(p).encode("utf-8"))
    return h.digest()


def hash_u64(*parts) -> int:
    """First 8 bytes of SHA-256 over the tagged parts, big-endian."""
    return int.from_bytes(_digest(*parts)[:8], "big")


def hash_millionths(*parts) -> int:
    """Deterministic uniform draw on [0, 1_000_000)."""
    return hash_u64(*parts) % MILLION


def hash_bytes(*parts) -> bytes:
    return _digest(*parts)
