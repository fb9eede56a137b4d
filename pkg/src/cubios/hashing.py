"""FNV-1a 64-bit hashing and deterministic sub-seed derivation.

Both helpers exist to keep every digest and every RNG stream identical
across platforms and interpreter runs: no builtin hash(), no locale, no
endianness surprises.
"""

from __future__ import annotations

import struct

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes, h: int = FNV64_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * FNV64_PRIME) & _MASK
    return h


def derive_seed(*parts: int | str) -> int:
    """Fold ints and strings into one 64-bit seed, type-tagged so that
    (1, "a") and ("1a",) cannot collide."""
    h = FNV64_OFFSET
    for p in parts:
        if isinstance(p, bool) or not isinstance(p, (int, str)):
            raise TypeError(f"unseedable part: {p!r}")
        if isinstance(p, int):
            h = fnv1a64(b"i" + struct.pack("<q", p), h)
        else:
            h = fnv1a64(b"s" + p.encode("utf-8"), h)
    return h
