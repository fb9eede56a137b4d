"""WordMatch: spell nouns along the cube's facet rings.

Each facet shows one letter of a 24-letter alphabet (Q and Z omitted).
Turning sides rearranges the letters; every contiguous run of 3 to 8
letters along any of the six closed rings, read in either direction,
that matches the dictionary scores its length in points.  Rings are
closed bands, so runs may wrap.  A word instance is identified by
(word, ring, start, direction); instances present before an event score
nothing, newly formed ones are awarded and highlighted.
"""

from __future__ import annotations

import random
from typing import NamedTuple

from ..faces import ALL_FACETS, FacetAddress, facet_index
from ..geometry import FaceTurn, facet_permutation, transport_labeling
from ..hashing import derive_seed
from ..surface import Field, facet_rings
from . import SurfaceGame
from .font import blit_center

ALPHABET = "ABCDEFGHIJKLMNOPRSTUVWXY"  # 26 letters minus Q and Z
MIN_LEN = 3
MAX_LEN = 8


class BadAlphabet(Exception):
    pass


def load_dictionary(path: str) -> tuple[frozenset[str], int]:
    """Uppercase words usable on the surface; returns (words, skipped)."""
    words = set()
    skipped = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            w = line.strip().upper()
            if not w:
                continue
            if any(ch not in ALPHABET for ch in w) or not MIN_LEN <= len(w) <= MAX_LEN:
                skipped += 1
                continue
            words.add(w)
    return frozenset(words), skipped


class WordHit(NamedTuple):
    word: str
    ring: int
    start: int
    direction: int  # +1 with ring order, -1 against it


def find_words(labeling: dict[FacetAddress, str], words: frozenset[str]) -> tuple[WordHit, ...]:
    """Every scoring run in the labeling; pure in its inputs."""
    for lab in labeling.values():
        if lab not in ALPHABET:
            raise BadAlphabet(f"label {lab!r} is not a surface letter")
    hits = []
    rings = facet_rings()
    for ri, ring in enumerate(rings):
        seq = [labeling[f] for f in ring]
        for direction in (1, -1):
            for start in range(len(ring)):
                for length in range(MIN_LEN, MAX_LEN + 1):
                    run = "".join(
                        seq[(start + direction * k) % len(ring)] for k in range(length)
                    )
                    if run in words:
                        hits.append(WordHit(run, ri, start, direction))
    return tuple(sorted(hits))


def score_hits(hits: tuple[WordHit, ...]) -> int:
    return sum(len(h.word) for h in hits)


def hit_facets(hit: WordHit) -> tuple[FacetAddress, ...]:
    ring = facet_rings()[hit.ring]
    return tuple(
        ring[(hit.start + hit.direction * k) % len(ring)] for k in range(len(hit.word))
    )


_BG = (24, 28, 44)
_HI_BG = (168, 120, 16)
_INK = (235, 235, 240)


class WordMatch(SurfaceGame):
    name = "wordmatch"

    def __init__(self, seed: int, words: frozenset[str]):
        super().__init__(seed)
        self.words = words
        letters = list(ALPHABET)
        random.Random(derive_seed(seed, "wordmatch", "deal")).shuffle(letters)
        self.labeling: dict[FacetAddress, str] = dict(zip(ALL_FACETS, letters))
        self._current = set(find_words(self.labeling, words))  # baseline, unscored
        self._fresh: tuple[WordHit, ...] = ()

    def on_turn(self, t: FaceTurn) -> None:
        self.labeling = transport_labeling(self.labeling, facet_permutation(t))
        self._rescore()

    def _rescore(self) -> None:
        hits = find_words(self.labeling, self.words)
        fresh = tuple(h for h in hits if h not in self._current)
        self._score += score_hits(fresh)
        self._current = set(hits)
        self._fresh = fresh
        self._message = " ".join(sorted({h.word for h in fresh})) if fresh else ""

    def field(self) -> Field:
        fld = Field()
        lit = {f for h in self._fresh for f in hit_facets(h)}
        for f in ALL_FACETS:
            rect = fld.facet_rect(f)
            rect[:] = _HI_BG if f in lit else _BG
            rect[:2, :] = rect[-2:, :] = rect[:, :2] = rect[:, -2:] = (12, 14, 22)
            blit_center(rect, self.labeling[f], 14, _INK)
        return fld

    def canonical_state(self) -> bytes:
        items = sorted((facet_index(f), lab) for f, lab in self.labeling.items())
        cur = sorted(self._current)
        return repr((items, cur, self._score, self._phase.value)).encode()
