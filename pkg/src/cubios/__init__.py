"""Deterministic twin of a 2x2x2 cube of display-bearing networked cubies.

Layers, bottom up: `geometry` (rigid poses, turns, state enumeration),
`faces`/`surface` (the shared 24-facet pixel world), `mesh` (the firmware
network simulation), `games` (the four playable games), `session`
(event-driven engine, logs, replay), `server`/`cli` (the serving
surfaces).  Import the layer you need; nothing is re-exported here.
"""

__version__ = "0.1.0"
