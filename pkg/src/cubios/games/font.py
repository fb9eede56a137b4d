"""5x7 bitmap glyphs for on-facet labels.

Row values are 5-bit integers, bit 4 = leftmost column.  Rendered by
integer upscaling so every size stays crisp and deterministic.
"""

from __future__ import annotations

import numpy as np

GLYPH_W = 5
GLYPH_H = 7

GLYPHS: dict[str, tuple[int, ...]] = {
    "A": (0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11),
    "B": (0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E),
    "C": (0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E),
    "D": (0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C),
    "E": (0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F),
    "F": (0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10),
    "G": (0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F),
    "H": (0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11),
    "I": (0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E),
    "J": (0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C),
    "K": (0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11),
    "L": (0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F),
    "M": (0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11),
    "N": (0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11),
    "O": (0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E),
    "P": (0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10),
    "Q": (0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D),
    "R": (0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11),
    "S": (0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E),
    "T": (0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04),
    "U": (0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E),
    "V": (0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04),
    "W": (0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A),
    "X": (0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11),
    "Y": (0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04),
    "Z": (0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F),
    "0": (0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E),
    "1": (0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E),
    "2": (0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F),
    "3": (0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E),
    "4": (0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02),
    "5": (0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E),
    "6": (0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E),
    "7": (0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08),
    "8": (0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E),
    "9": (0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C),
}


def glyph_mask(ch: str) -> np.ndarray:
    rows = GLYPHS[ch]
    out = np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    for r, bits in enumerate(rows):
        for c in range(GLYPH_W):
            out[r, c] = bool(bits >> (GLYPH_W - 1 - c) & 1)
    return out


def text_size(text: str, scale: int) -> tuple[int, int]:
    """(height, width) in pixels; one blank column between glyphs."""
    if not text:
        return (GLYPH_H * scale, 0)
    w = (len(text) * (GLYPH_W + 1) - 1) * scale
    return (GLYPH_H * scale, w)


def blit(dst: np.ndarray, text: str, y: int, x: int, scale: int, color) -> None:
    """Paint text into an (H, W, 3) uint8 image at top-left (y, x)."""
    cx = x
    for ch in text:
        mask = np.kron(glyph_mask(ch), np.ones((scale, scale), dtype=bool))
        h, w = mask.shape
        dst[y : y + h, cx : cx + w][mask] = color
        cx += (GLYPH_W + 1) * scale


def blit_center(dst: np.ndarray, text: str, scale: int, color) -> None:
    h, w = text_size(text, scale)
    y = (dst.shape[0] - h) // 2
    x = (dst.shape[1] - w) // 2
    blit(dst, text, y, x, scale, color)
